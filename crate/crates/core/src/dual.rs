//! The geometric-programming side of the duality.
//!
//! A dual point is a table `λ(s,a,b)` in nats. Its objective is the linear form
//! `Σ P(s|a,b) ρ(a) λ(s,a,b)` and it is feasible when, for every outcome tuple
//! `s⃗`,
//!
//! ```text
//! Σ_a ρ(a) exp(Σ_b λ(s_b,a,b)) ≤ 1.
//! ```
//!
//! Every feasible point bounds the asymptotic communication complexity from
//! below. Shifting all `λ(·,·,b)` by `c/M` lowers every constraint by `c` and
//! the objective by exactly `c`, so any table can be made feasible and the
//! surrogate `I(λ) − max_s⃗ lse(λ, s⃗)` is the bound that table certifies.

use crate::cbox::{CBox, OutcomeSpace, Prior, SVector, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::primal::{minimize_mutual_info, PrimalOptions, PrimalResult};

pub const DEFAULT_CLAMP_FLOOR: f64 = -50.0;

/// Largest constraint value a certificate may show and still verify.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Dual variables `λ(s,a,b)`, stored flat in `[s][a][b]` order.
///
/// The clamp floor bounds solver iterates from below. A normalized point may
/// sit below it by at most the normalization shift.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    a_count: usize,
    m_count: usize,
    s_count: usize,
    lambda: Vec<f64>,
    clamp_floor: f64,
}

impl DualPoint {
    pub fn zeros(a_count: usize, m_count: usize, s_count: usize) -> Self {
        Self::constant(a_count, m_count, s_count, 0.0)
    }

    pub fn constant(a_count: usize, m_count: usize, s_count: usize, value: f64) -> Self {
        Self {
            a_count,
            m_count,
            s_count,
            lambda: vec![value; a_count * m_count * s_count],
            clamp_floor: DEFAULT_CLAMP_FLOOR,
        }
    }

    /// From a nested `[s][a][b]` table of finite values.
    pub fn from_nested(lambda: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let s_count = lambda.len();
        let a_count = lambda.first().map_or(0, Vec::len);
        let m_count = lambda.first().and_then(|x| x.first()).map_or(0, Vec::len);
        if s_count == 0 || a_count == 0 || m_count == 0 {
            return Err(Error::InvalidShape("lambda needs three axes with positive extents".into()));
        }
        let mut flat = Vec::with_capacity(s_count * a_count * m_count);
        for by_a in &lambda {
            if by_a.len() != a_count || by_a.iter().any(|r| r.len() != m_count) {
                return Err(Error::InvalidShape("lambda table is ragged".into()));
            }
            for row in by_a {
                flat.extend_from_slice(row);
            }
        }
        if flat.iter().any(|v| !v.is_finite()) {
            return Err(Error::DomainError("lambda entries must be finite".into()));
        }
        Ok(Self { a_count, m_count, s_count, lambda: flat, clamp_floor: DEFAULT_CLAMP_FLOOR })
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.s_count)
            .map(|s| (0..self.a_count).map(|a| (0..self.m_count).map(|b| self.get(s, a, b)).collect()).collect())
            .collect()
    }

    pub fn with_clamp_floor(mut self, floor: f64) -> Self {
        self.clamp_floor = floor;
        self
    }

    pub fn clamp_floor(&self) -> f64 {
        self.clamp_floor
    }

    pub fn a_count(&self) -> usize {
        self.a_count
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn s_count(&self) -> usize {
        self.s_count
    }

    #[inline]
    fn idx(&self, s: usize, a: usize, b: usize) -> usize {
        (s * self.a_count + a) * self.m_count + b
    }

    #[inline]
    pub fn get(&self, s: usize, a: usize, b: usize) -> f64 {
        self.lambda[self.idx(s, a, b)]
    }

    pub fn set(&mut self, s: usize, a: usize, b: usize, value: f64) {
        let i = self.idx(s, a, b);
        self.lambda[i] = value;
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.lambda
    }

    fn check_box(&self, cbox: &CBox) -> Result<()> {
        if (self.a_count, self.m_count, self.s_count) != (cbox.a_count(), cbox.m_count(), cbox.s_count()) {
            return Err(Error::ShapeMismatch(format!(
                "dual point ({}, {}, {}) vs box ({}, {}, {})",
                self.a_count,
                self.m_count,
                self.s_count,
                cbox.a_count(),
                cbox.m_count(),
                cbox.s_count()
            )));
        }
        Ok(())
    }

    fn check_prior(&self, prior: &Prior) -> Result<()> {
        prior.check_len(self.a_count)
    }

    /// `Σ_b λ(s_b,a,b)` for each input `a`.
    fn exponents(&self, entries: &[usize], out: &mut [f64]) {
        for (a, t) in out.iter_mut().enumerate() {
            *t = entries.iter().enumerate().map(|(b, &s)| self.get(s, a, b)).sum();
        }
    }

    /// Subtracts `shift / M` from every entry.
    fn shifted(&self, shift: f64) -> DualPoint {
        let per_setting = shift / self.m_count as f64;
        let mut out = self.clone();
        out.lambda.iter_mut().for_each(|v| *v -= per_setting);
        out
    }
}

/// `log Σ_a w_a e^{t_a}` over inputs with positive weight.
fn log_sum_exp(weights: &[f64], exponents: &[f64]) -> f64 {
    let max =
        weights.iter().zip(exponents).filter(|(w, _)| **w > 0.0).map(|(_, t)| *t).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = weights.iter().zip(exponents).filter(|(w, _)| **w > 0.0).map(|(w, t)| w * (t - max).exp()).sum();
    max + sum.ln()
}

/// `Σ_{s,a,b} P(s|a,b) ρ(a) λ(s,a,b)` in nats.
pub fn dual_objective(lp: &DualPoint, cbox: &CBox, prior: &Prior) -> Result<f64> {
    lp.check_box(cbox)?;
    lp.check_prior(prior)?;
    let mut total = 0.0;
    for (a, &w) in prior.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for b in 0..cbox.m_count() {
            for (s, &p) in cbox.row(a, b).iter().enumerate() {
                if p != 0.0 {
                    inner += p * lp.get(s, a, b);
                }
            }
        }
        total += w * inner;
    }
    Ok(total)
}

/// `log Σ_a ρ(a) exp(Σ_b λ(s_b,a,b))`; the tuple is feasible iff this is `≤ 0`.
pub fn constraint_lse(lp: &DualPoint, prior: &Prior, entries: &[usize]) -> Result<f64> {
    lp.check_prior(prior)?;
    if entries.len() != lp.m_count || entries.iter().any(|&s| s >= lp.s_count) {
        return Err(Error::ShapeMismatch(format!("tuple {entries:?} does not fit the dual point")));
    }
    let mut t = vec![0.0; lp.a_count];
    lp.exponents(entries, &mut t);
    Ok(log_sum_exp(prior.weights(), &t))
}

/// Largest constraint value and the tuple attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub value: f64,
    pub witness: SVector,
}

/// Exhaustive scan: `(max constraint value, index of the first maximizer)`.
fn scan(lp: &DualPoint, weights: &[f64], space: &OutcomeSpace) -> (f64, usize) {
    let mut t = vec![0.0; lp.a_count];
    let mut best = (f64::NEG_INFINITY, 0);
    space.for_each(|k, entries| {
        lp.exponents(entries, &mut t);
        let c = log_sum_exp(weights, &t);
        if c > best.0 {
            best = (c, k);
        }
    });
    best
}

/// Maximum of [`constraint_lse`] over all `s_count^M` tuples.
pub fn max_violation(lp: &DualPoint, prior: &Prior, cap: usize) -> Result<Violation> {
    lp.check_prior(prior)?;
    let space = OutcomeSpace::new(lp.s_count, lp.m_count, cap)?;
    let (value, k) = scan(lp, prior.weights(), &space);
    Ok(Violation { value, witness: space.decode(k)? })
}

/// Shifts `λ` so that the largest constraint value is exactly zero.
pub fn normalize_feasible(lp: &DualPoint, prior: &Prior, cap: usize) -> Result<DualPoint> {
    let c = max_violation(lp, prior, cap)?.value;
    Ok(lp.shifted(c))
}

#[derive(Debug, Clone)]
pub struct DualOptions {
    pub max_iter: usize,
    /// Initial step; iteration `k` uses `step0 / √k`.
    pub step0: f64,
    pub clamp_floor: f64,
    pub cap: usize,
    /// Stop once `upper_bound − bound ≤ gap_tol`.
    pub gap_tol: f64,
    /// A known primal value; enables the gap stopping rule.
    pub upper_bound: Option<f64>,
    pub warm_start: Option<DualPoint>,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self {
            max_iter: 200_000,
            step0: 1.0,
            clamp_floor: DEFAULT_CLAMP_FLOOR,
            cap: DEFAULT_ENUMERATION_CAP,
            gap_tol: 1e-3,
            upper_bound: None,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualStatus {
    /// The gap to `upper_bound` closed to `gap_tol`.
    Converged,
    /// Ran out of iterations; the bound is still valid.
    IterationLimit,
}

/// A new best bound, reported through a normalized (feasible) point.
#[derive(Debug)]
pub struct DualReport<'a> {
    pub iteration: usize,
    pub bound_nats: f64,
    pub point: &'a DualPoint,
}

#[derive(Debug, Clone)]
pub struct DualResult {
    /// Feasible point attaining `bound_nats`.
    pub point: DualPoint,
    pub bound_nats: f64,
    pub iterations: usize,
    pub status: DualStatus,
    /// `(iteration, bound)` for every improvement, nondecreasing in bound.
    pub history: Vec<(usize, f64)>,
}

/// Projected subgradient ascent on `I(λ) − max_s⃗ lse(λ, s⃗)`.
pub fn maximize_dual(cbox: &CBox, prior: &Prior, opts: &DualOptions) -> Result<DualResult> {
    maximize_dual_observed(cbox, prior, opts, |_| {})
}

/// As [`maximize_dual`], calling `observer` with each new best feasible point.
pub fn maximize_dual_observed(
    cbox: &CBox,
    prior: &Prior,
    opts: &DualOptions,
    mut observer: impl FnMut(&DualReport<'_>),
) -> Result<DualResult> {
    prior.check_len(cbox.a_count())?;
    let space = cbox.outcome_space(opts.cap)?;
    let (a_count, m_count, s_count) = (cbox.a_count(), cbox.m_count(), cbox.s_count());
    let mut lambda = match &opts.warm_start {
        Some(p) => {
            p.check_box(cbox)?;
            p.clone()
        }
        None => DualPoint::zeros(a_count, m_count, s_count),
    }
    .with_clamp_floor(opts.clamp_floor);

    // ∂I/∂λ(s,a,b) = P(s|a,b) ρ(a), laid out like λ
    let mut linear = DualPoint::zeros(a_count, m_count, s_count);
    for a in 0..a_count {
        for b in 0..m_count {
            for s in 0..s_count {
                linear.set(s, a, b, cbox.p(a, b, s) * prior.weights()[a]);
            }
        }
    }
    let weights = prior.weights();

    let mut best: Option<(f64, DualPoint)> = None;
    let mut history = Vec::new();
    let mut t = vec![0.0; a_count];
    let mut iterations = 0;
    let mut status = DualStatus::IterationLimit;
    for k in 1..=opts.max_iter.max(1) {
        iterations = k;
        let (c, argmax) = scan(&lambda, weights, &space);
        let objective: f64 = linear.lambda.iter().zip(&lambda.lambda).map(|(g, l)| g * l).sum();
        let value = objective - c;
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            let point = lambda.shifted(c);
            observer(&DualReport { iteration: k, bound_nats: value, point: &point });
            history.push((k, value));
            best = Some((value, point));
        }
        if let Some(upper) = opts.upper_bound {
            if upper - best.as_ref().map_or(f64::NEG_INFINITY, |b| b.0) <= opts.gap_tol {
                status = DualStatus::Converged;
                break;
            }
        }
        if k == opts.max_iter {
            break;
        }

        let entries = space.decode(argmax)?.entries;
        lambda.exponents(&entries, &mut t);
        let step = opts.step0 / (k as f64).sqrt();
        for (l, g) in lambda.lambda.iter_mut().zip(&linear.lambda) {
            *l += step * g;
        }
        for a in 0..a_count {
            if weights[a] == 0.0 {
                continue;
            }
            let w = weights[a] * (t[a] - c).exp();
            for (b, &s) in entries.iter().enumerate() {
                let i = lambda.idx(s, a, b);
                lambda.lambda[i] -= step * w;
            }
        }
        let floor = lambda.clamp_floor;
        lambda.lambda.iter_mut().for_each(|l| *l = l.max(floor));
    }
    let (bound_nats, point) = best.expect("at least one iteration runs");
    Ok(DualResult { point, bound_nats, iterations, status, history })
}

#[derive(Debug, Clone, Default)]
pub struct GapOptions {
    pub primal: PrimalOptions,
    pub dual: DualOptions,
}

#[derive(Debug, Clone)]
pub struct DualityGap {
    pub primal_nats: f64,
    pub dual_nats: f64,
    /// `primal − dual`; nonnegative up to rounding by weak duality.
    pub gap: f64,
    pub primal: PrimalResult,
    pub dual: DualResult,
}

/// Solves both sides. The dual ascent starts from the point read off the
/// primal solver's fitted factors and stops at `opts.dual.gap_tol`.
pub fn duality_gap(cbox: &CBox, prior: &Prior, opts: &GapOptions) -> Result<DualityGap> {
    duality_gap_observed(cbox, prior, opts, |_| {})
}

/// [`duality_gap`] with every improving dual report passed to `observer`.
pub fn duality_gap_observed(
    cbox: &CBox,
    prior: &Prior,
    opts: &GapOptions,
    observer: impl FnMut(&DualReport<'_>),
) -> Result<DualityGap> {
    let primal = minimize_mutual_info(cbox, prior, &opts.primal)?;
    let dual_opts = DualOptions {
        warm_start: Some(primal.dual_point.clone()),
        upper_bound: Some(primal.value_nats),
        ..opts.dual.clone()
    };
    let dual = maximize_dual_observed(cbox, prior, &dual_opts, observer)?;
    Ok(DualityGap {
        primal_nats: primal.value_nats,
        dual_nats: dual.bound_nats,
        gap: primal.value_nats - dual.bound_nats,
        primal,
        dual,
    })
}
