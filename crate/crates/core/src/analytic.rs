//! Closed-form bounds for a noiseless channel in dimension `N` followed by a
//! two-outcome measurement `{|φ⟩⟨φ|, 1 − |φ⟩⟨φ|}`.
//!
//! The dual variables are restricted to `λ(i,ψ,φ) = α_i |⟨φ|ψ⟩|² + β_i`.
//! With `α = α₁ − α₂`, `β = β₁ − β₂` and the worst partition of the
//! measurement space taken to be a cone of half-angle `θ`, feasibility reads
//! `F(θ, α, β) ≥ α₂/N + β₂` for all `θ`, where
//!
//! ```text
//! F(θ,α,β) = −S(θ)[β + α(sin²θ/N + cos²θ)] − log[ (N−1)γ(N−1, y) / y^{N−1} ],
//! y = α S(θ) cos²θ,   S(θ) = sin^{2N−2}θ.
//! ```
//!
//! The bound is `I = β/N + 2α/(N(N+1)) + min_θ F`. The minimum sits at
//! `sin^{2N−2}θ_m = 1/N`; dropping the gamma term gives `α` in closed form,
//! keeping it gives a scalar equation in `α` solved by Newton's method.
//! Only `N ∈ {2, 3, 4}` is supported: beyond that the minimizer is not a
//! smooth function of `(α, β)` and the stationarity argument breaks down.

use std::f64::consts::{E, FRAC_PI_2, LN_2, PI};

use crate::dual::DualPoint;
use crate::error::{Error, Result};
use crate::info::nats_to_bits;
use crate::quantum::{PureState, TwoOutcomeMeasurement};
use crate::special::{factorial, log_scaled_lower_gamma};

pub const SUPPORTED_DIMENSIONS: std::ops::RangeInclusive<usize> = 2..=4;

const NEWTON_MAX_ITER: usize = 100;
const REGION_TOL: f64 = 1e-9;
const MINIMUM_GRID: usize = 2000;

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::DomainError(format!("dimension {n} must be at least 2")));
    }
    Ok(())
}

fn check_supported(n: usize) -> Result<()> {
    if !SUPPORTED_DIMENSIONS.contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    Ok(())
}

/// `N^{1/(1−N)}`.
fn root_term(n: usize) -> f64 {
    let nf = n as f64;
    nf.powf(1.0 / (1.0 - nf))
}

/// Angle with `sin^{2N−2}θ = 1/N`.
pub fn theta_m(n: usize) -> Result<f64> {
    check_dim(n)?;
    let nf = n as f64;
    Ok(nf.powf(-1.0 / (2.0 * nf - 2.0)).asin())
}

/// `α = N²(N+1) / (N − (N+1) N^{1/(1−N)})`, the optimum with the gamma term dropped.
pub fn alpha_approx(n: usize) -> Result<f64> {
    check_dim(n)?;
    let nf = n as f64;
    Ok(nf * nf * (nf + 1.0) / (nf - (nf + 1.0) * root_term(n)))
}

/// Interval `[−2α/(N+1), −α/(N+1)]` of `β` for which the bound can be positive.
pub fn significant_region(alpha: f64, n: usize) -> (f64, f64) {
    let d = n as f64 + 1.0;
    (-2.0 * alpha / d, -alpha / d)
}

/// `β = ([(1 − N^{1/(1−N)})^{−1} − 1]/N − 2) α/(N+1)`.
pub fn beta_of_alpha(alpha: f64, n: usize) -> Result<f64> {
    check_dim(n)?;
    if !(alpha > 0.0) {
        return Err(Error::DomainError(format!("alpha {alpha} must be positive")));
    }
    let nf = n as f64;
    let beta = ((1.0 / (1.0 - root_term(n)) - 1.0) / nf - 2.0) * alpha / (nf + 1.0);
    let (lo, hi) = significant_region(alpha, n);
    if beta < lo - REGION_TOL || beta > hi + REGION_TOL {
        return Err(Error::RegionViolation { beta, lo, hi });
    }
    Ok(beta)
}

/// `F(θ, α, β)` in nats. `θ = 0` and `α = 0` are the continuous limits.
pub fn f_value(theta: f64, alpha: f64, beta: f64, n: usize) -> Result<f64> {
    check_dim(n)?;
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::DomainError(format!("angle {theta} outside [0, π/2]")));
    }
    if !(alpha >= 0.0) || !beta.is_finite() {
        return Err(Error::DomainError(format!("need alpha ≥ 0 and finite beta, got ({alpha}, {beta})")));
    }
    let nf = n as f64;
    let (sin, cos) = theta.sin_cos();
    let s = sin.powi(2 * n as i32 - 2);
    let y = alpha * s * cos * cos;
    Ok(-s * (beta + alpha * (sin * sin / nf + cos * cos)) - log_scaled_lower_gamma(n - 1, y))
}

/// `F` with the incomplete gamma term dropped, `(N−1)γ(N−1,y) → (N−1)!`.
pub fn f_value_without_gamma(theta: f64, alpha: f64, beta: f64, n: usize) -> Result<f64> {
    check_dim(n)?;
    let nf = n as f64;
    let (sin, cos) = theta.sin_cos();
    let s = sin.powi(2 * n as i32 - 2);
    let y = alpha * s * cos * cos;
    if !(y > 0.0) {
        return Err(Error::DomainError("gamma-free form needs α S(θ) cos²θ > 0".into()));
    }
    Ok(-s * (beta + alpha * (sin * sin / nf + cos * cos)) - (factorial(n - 1).ln() - (nf - 1.0) * y.ln()))
}

/// `β/N + 2α/(N(N+1))`, the part of the objective not fixed by the constraint.
fn linear_part(alpha: f64, beta: f64, n: usize) -> f64 {
    let nf = n as f64;
    beta / nf + 2.0 * alpha / (nf * (nf + 1.0))
}

/// Closed-form maximum with the gamma term dropped, in nats.
pub fn bound_approx_nats(n: usize) -> Result<f64> {
    check_supported(n)?;
    let nf = n as f64;
    let r = root_term(n);
    let numerator = nf * (nf + 1.0) * (r - 1.0) / E;
    let denominator = ((1.0 + nf) * r - nf) * factorial(n - 1).powf(1.0 / (nf - 1.0));
    Ok((nf - 1.0) * (numerator / denominator).ln())
}

pub fn bound_approx_bits(n: usize) -> Result<f64> {
    Ok(nats_to_bits(bound_approx_nats(n)?))
}

/// Residual and derivative of the stationarity equation in `α`:
///
/// ```text
/// R(α) = (N^{N/(1−N)} − 1/(N+1)) α/N + 1 − e^{−y} y^{N−1} / [(N−1)! − (N−1)Γ(N−1, y)]
/// ```
///
/// with `y = cos²θ_m α/N`. The last term is `exp(−y − log[(N−1)γ(N−1,y)/y^{N−1}])`.
fn residual_with_slope(alpha: f64, n: usize, with_gamma: bool) -> Result<(f64, f64)> {
    let nf = n as f64;
    let cos2 = theta_m(n)?.cos().powi(2);
    let coef = (nf.powf(nf / (1.0 - nf)) - 1.0 / (nf + 1.0)) / nf;
    if !with_gamma {
        return Ok((coef * alpha + 1.0, coef));
    }
    let y = cos2 * alpha / nf;
    let rhs = (-y - log_scaled_lower_gamma(n - 1, y)).exp();
    let drhs_dy = -rhs * (1.0 + (nf - 1.0) / y * (rhs - 1.0));
    Ok((coef * alpha + 1.0 - rhs, coef - drhs_dy * cos2 / nf))
}

/// Residual of the stationarity equation; `with_gamma = false` drops the right-hand term.
pub fn alpha_residual(alpha: f64, n: usize, with_gamma: bool) -> Result<f64> {
    check_dim(n)?;
    Ok(residual_with_slope(alpha, n, with_gamma)?.0)
}

/// Root of the stationarity equation by Newton's method from [`alpha_approx`],
/// falling back to bisection on `[α₀/2, 4α₀]` when a step leaves the bracket.
pub fn alpha_exact(n: usize, tol: f64) -> Result<f64> {
    check_supported(n)?;
    if !(tol > 0.0) {
        return Err(Error::DomainError(format!("tolerance {tol} must be positive")));
    }
    let start = alpha_approx(n)?;
    let (mut lo, mut hi) = (start / 2.0, 4.0 * start);
    let r_lo = residual_with_slope(lo, n, true)?.0;
    let r_hi = residual_with_slope(hi, n, true)?.0;
    if r_lo.signum() == r_hi.signum() {
        return Err(Error::DomainError(format!("no sign change of the residual on [{lo}, {hi}]")));
    }
    let lo_sign = r_lo.signum();
    let mut alpha = start;
    let mut best = f64::INFINITY;
    for _ in 0..NEWTON_MAX_ITER {
        let (r, slope) = residual_with_slope(alpha, n, true)?;
        best = best.min(r.abs());
        if r.abs() <= tol {
            return Ok(alpha);
        }
        if r.signum() == lo_sign {
            lo = alpha;
        } else {
            hi = alpha;
        }
        let next = alpha - r / slope;
        alpha = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }
    Err(Error::NonConvergence { iterations: NEWTON_MAX_ITER, best_gap: best })
}

/// Parameters of the ansatz with the offset `α₂/N + β₂` pinned to `F(θ_m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub theta_m: f64,
    pub offset: f64,
}

impl AnalyticParams {
    /// Checks `α ≥ 0` and that `β` lies in the significant region.
    pub fn new(n: usize, alpha: f64, beta: f64, theta_m: f64, offset: f64) -> Result<Self> {
        check_dim(n)?;
        if !(alpha >= 0.0) {
            return Err(Error::DomainError(format!("alpha {alpha} must be nonnegative")));
        }
        let (lo, hi) = significant_region(alpha, n);
        if beta < lo - REGION_TOL || beta > hi + REGION_TOL {
            return Err(Error::RegionViolation { beta, lo, hi });
        }
        Ok(Self { n, alpha, beta, theta_m, offset })
    }

    /// Ansatz at a given `α`, with `β` from [`beta_of_alpha`] and `θ = θ_m`.
    pub fn at_alpha(n: usize, alpha: f64) -> Result<Self> {
        let beta = beta_of_alpha(alpha, n)?;
        let theta = theta_m(n)?;
        Self::new(n, alpha, beta, theta, f_value(theta, alpha, beta, n)?)
    }

    /// `β/N + 2α/(N(N+1)) + offset` in nats.
    pub fn objective_nats(&self) -> f64 {
        linear_part(self.alpha, self.beta, self.n) + self.offset
    }
}

/// Located minimum of `F` over `θ ∈ (0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FMinimum {
    pub theta: f64,
    pub value: f64,
}

/// Grid search followed by golden-section refinement around the best node.
pub fn f_minimum(n: usize, alpha: f64, beta: f64) -> Result<FMinimum> {
    let profile = f_profile(n, alpha, beta, MINIMUM_GRID)?;
    let &(theta, value) = profile.iter().min_by(|x, y| x.1.total_cmp(&y.1)).expect("grid is not empty");
    let step = FRAC_PI_2 / MINIMUM_GRID as f64;
    let (mut lo, mut hi) = ((theta - step).max(0.0), (theta + step).min(FRAC_PI_2));
    let f = |t: f64| f_value(t, alpha, beta, n);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let (t_best, f_best) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    // endpoint minima: refinement can only approach the node from inside
    Ok(if f_best < value { FMinimum { theta: t_best, value: f_best } } else { FMinimum { theta, value } })
}

/// One row of the bound table for a dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub theta_m: f64,
    /// Closed-form maximum with the gamma term dropped.
    pub bound_bits_approx: f64,
    /// Objective at the exact stationary `α`, with the offset `F(θ_m)`.
    pub bound_bits_refined: f64,
    /// Same `α, β` with the offset `min_θ F`; satisfies every cone constraint.
    pub bound_bits_feasible: f64,
}

impl BoundRow {
    pub fn params(&self) -> Result<AnalyticParams> {
        AnalyticParams::at_alpha(self.n, self.alpha)
    }
}

/// Default residual tolerance of the Newton solve.
pub const ALPHA_TOL: f64 = 1e-12;

pub fn bound_refined_bits(n: usize) -> Result<BoundRow> {
    check_supported(n)?;
    let alpha = alpha_exact(n, ALPHA_TOL)?;
    let params = AnalyticParams::at_alpha(n, alpha)?;
    let minimum = f_minimum(n, alpha, params.beta)?;
    Ok(BoundRow {
        n,
        alpha,
        beta: params.beta,
        theta_m: params.theta_m,
        bound_bits_approx: bound_approx_bits(n)?,
        bound_bits_refined: nats_to_bits(params.objective_nats()),
        bound_bits_feasible: nats_to_bits(linear_part(alpha, params.beta, n) + minimum.value),
    })
}

/// `F` on the uniform grid `θ_k = k·(π/2)/grid_points`, `k = 1..=grid_points`.
pub fn f_profile(n: usize, alpha: f64, beta: f64, grid_points: usize) -> Result<Vec<(f64, f64)>> {
    if grid_points < 2 {
        return Err(Error::DomainError("need at least two grid points".into()));
    }
    let step = FRAC_PI_2 / grid_points as f64;
    (1..=grid_points)
        .map(|k| {
            let theta = if k == grid_points { FRAC_PI_2 } else { k as f64 * step };
            Ok((theta, f_value(theta, alpha, beta, n)?))
        })
        .collect()
}

/// Earlier two-dimensional bound `1 + log₂(π/e)`.
pub fn prior_reference_bits() -> f64 {
    1.0 + (PI / E).ln() / LN_2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundComparison {
    pub row: BoundRow,
    /// One bit: what a two-outcome measurement can carry.
    pub trivial_bits: f64,
    /// `log₂ N`, the trivial bound for full rank-1 measurements.
    pub rank1_trivial_bits: f64,
    /// Only defined for `N = 2`.
    pub prior_reference_bits: Option<f64>,
    pub exceeds_trivial: bool,
    pub exceeds_rank1_trivial: bool,
    pub exceeds_prior_reference: Option<bool>,
}

pub fn bound_table() -> Result<Vec<BoundComparison>> {
    SUPPORTED_DIMENSIONS
        .map(|n| {
            let row = bound_refined_bits(n)?;
            let rank1 = (n as f64).log2();
            let reference = (n == 2).then(prior_reference_bits);
            Ok(BoundComparison {
                row,
                trivial_bits: 1.0,
                rank1_trivial_bits: rank1,
                prior_reference_bits: reference,
                exceeds_trivial: row.bound_bits_refined > 1.0,
                exceeds_rank1_trivial: row.bound_bits_refined > rank1,
                exceeds_prior_reference: reference.map(|r| row.bound_bits_refined > r),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig2Row {
    pub n: usize,
    pub bound_refined_bits: f64,
    pub bound_approx_bits: f64,
    /// `N − 1`, a reference line resting on the unproven double-cap conjecture.
    pub reference_doublecap: f64,
    pub reference_trivial: f64,
}

pub fn fig2_rows() -> Result<Vec<Fig2Row>> {
    SUPPORTED_DIMENSIONS
        .map(|n| {
            let row = bound_refined_bits(n)?;
            Ok(Fig2Row {
                n,
                bound_refined_bits: row.bound_bits_refined,
                bound_approx_bits: row.bound_bits_approx,
                reference_doublecap: n as f64 - 1.0,
                reference_trivial: 1.0,
            })
        })
        .collect()
}

/// Discretizes the ansatz over finite state and axis sets:
/// `λ(0,a,b) = (α|⟨φ_b|ψ_a⟩|² + β)/M` and `λ(1,a,b) = 0`, where outcome 0 is
/// the rank-1 event. The result still has to be normalized.
pub fn ansatz_dual_point(
    states: &[PureState],
    axes: &[TwoOutcomeMeasurement],
    alpha: f64,
    beta: f64,
) -> Result<DualPoint> {
    if states.is_empty() || axes.is_empty() {
        return Err(Error::EmptyInput("ansatz needs states and axes"));
    }
    let m = axes.len() as f64;
    let mut lp = DualPoint::zeros(states.len(), axes.len(), 2);
    for (a, psi) in states.iter().enumerate() {
        for (b, axis) in axes.iter().enumerate() {
            lp.set(0, a, b, (alpha * psi.overlap(&axis.axis)? + beta) / m);
        }
    }
    Ok(lp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_m_cases() {
        assert!((theta_m(2).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let t4 = theta_m(4).unwrap();
        assert!((t4.sin().powi(6) - 0.25).abs() < 1e-15);
        assert!(theta_m(1).is_err());
    }

    #[test]
    fn alpha_approx_cases() {
        assert!((alpha_approx(2).unwrap() - 24.0).abs() < 1e-12);
        let want3 = 36.0 / (3.0 - 4.0 / 3f64.sqrt());
        assert!((alpha_approx(3).unwrap() - want3).abs() < 1e-12);
        // 40-digit evaluation: 52.128665117265297…
        assert!((alpha_approx(3).unwrap() - 52.128_665_117_265_3).abs() < 1e-10);
    }

    #[test]
    fn beta_cases() {
        assert!((beta_of_alpha(24.0, 2).unwrap() + 12.0).abs() < 1e-12);
        let b1 = beta_of_alpha(10.0, 3).unwrap();
        let b2 = beta_of_alpha(20.0, 3).unwrap();
        assert!((b2 - 2.0 * b1).abs() < 1e-12);
        assert!(beta_of_alpha(0.0, 2).is_err());
        assert!(AnalyticParams::new(2, 24.0, -1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn approximate_bounds_match_reference_values() {
        for (n, want) in [(2, 1.14227), (3, 1.86776), (4, 2.45238)] {
            assert!((bound_approx_bits(n).unwrap() - want).abs() < 1e-4);
        }
        assert_eq!(bound_approx_bits(5).unwrap_err(), Error::UnsupportedDimension(5));
        assert_eq!(bound_approx_bits(1).unwrap_err(), Error::UnsupportedDimension(1));
    }

    #[test]
    fn closed_form_alpha_zeroes_gamma_free_residual() {
        for n in 2..=12 {
            let r = alpha_residual(alpha_approx(n).unwrap(), n, false).unwrap();
            assert!(r.abs() < 1e-12, "n={n}: {r}");
        }
    }

    #[test]
    fn newton_reaches_tolerance() {
        for n in 2..=4 {
            let a = alpha_exact(n, 1e-12).unwrap();
            assert!(alpha_residual(a, n, true).unwrap().abs() <= 1e-12);
        }
        assert!(matches!(alpha_exact(5, 1e-12), Err(Error::UnsupportedDimension(5))));
        assert!(alpha_exact(2, 0.0).is_err());
    }

    #[test]
    fn f_limits() {
        let (a, b) = (24.0, -12.0);
        assert_eq!(f_value(0.0, a, b, 2).unwrap(), 0.0);
        // θ = π/2: S = 1, y = 0, and the log term vanishes
        for n in 2..6 {
            let f = f_value(FRAC_PI_2, a, b, n).unwrap();
            assert!((f + (b + a / n as f64)).abs() < 1e-12);
        }
        assert!(f_value(-0.1, a, b, 2).is_err());
        assert!(f_value(0.5, -1.0, b, 2).is_err());
    }

    #[test]
    fn profile_grid() {
        let p = f_profile(2, 24.0, -12.0, 4).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p[3].0, FRAC_PI_2);
        assert!(f_profile(2, 24.0, -12.0, 1).is_err());
    }

    #[test]
    fn prior_reference_value() {
        assert!((prior_reference_bits() - 1.2088).abs() < 1e-4);
    }
}
