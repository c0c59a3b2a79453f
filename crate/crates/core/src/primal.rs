//! Minimum mutual information over the couplings that reproduce a box.
//!
//! For a fixed prior the minimum of `I(S⃗;A)` over the coupling set is found
//! by alternating minimization of `Σ_a ρ(a) D(ρ(·|a) ‖ q)`:
//!
//! 1. `q(s⃗) = Σ_a ρ(a) ρ(s⃗|a)`;
//! 2. for every `a`, replace `ρ(·|a)` by the I-projection of `q` onto the
//!    tuples whose marginals are `P(·|a,b)`, computed by iterative
//!    proportional fitting. The projection has the form
//!    `q(s⃗) Π_b f_{a,b}(s_b)`.
//!
//! At the fixed point `log f_{a,b}(s)` is a dual optimum, so the fitted
//! factors double as a candidate `λ(s,a,b)`; after normalization it certifies
//! the gap of every returned solution.

use std::f64::consts::LOG2_E;

use crate::cbox::{check_membership, product_coupling, CBox, Coupling, OutcomeSpace, Prior, DEFAULT_ENUMERATION_CAP};
use crate::dual::{dual_objective, normalize_feasible, DualPoint, DEFAULT_CLAMP_FLOOR};
use crate::error::{Error, Result};
use crate::info::{nats_to_bits, output_distribution, relative_entropy};

#[derive(Debug, Clone)]
pub struct PrimalOptions {
    /// Stop once an outer iteration lowers the objective by less than this.
    pub tol: f64,
    /// Largest marginal violation accepted on convergence.
    pub feasibility_tol: f64,
    /// Inner fitting target.
    pub ipf_tol: f64,
    /// Required certified gap `value − dual bound` on convergence.
    pub gap_tol: f64,
    pub max_iter: usize,
    pub ipf_sweeps: usize,
    pub cap: usize,
    pub clamp_floor: f64,
}

impl Default for PrimalOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            feasibility_tol: 1e-8,
            ipf_tol: 1e-14,
            gap_tol: 1e-6,
            max_iter: 200_000,
            ipf_sweeps: 200,
            cap: DEFAULT_ENUMERATION_CAP,
            clamp_floor: DEFAULT_CLAMP_FLOOR,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PrimalResult {
    pub coupling: Coupling,
    pub value_nats: f64,
    /// Largest marginal deviation of `coupling`.
    pub constraint_violation: f64,
    pub prior: Prior,
    pub iterations: usize,
    /// Feasible dual point built from the fitted factors.
    pub dual_point: DualPoint,
    /// Objective of `dual_point`; a certified lower bound.
    pub dual_bound_nats: f64,
    /// Objective after each outer iteration.
    pub history: Vec<f64>,
}

impl PrimalResult {
    pub fn value_bits(&self) -> f64 {
        nats_to_bits(self.value_nats)
    }

    pub fn certified_gap(&self) -> f64 {
        self.value_nats - self.dual_bound_nats
    }
}

const NEGLIGIBLE: f64 = 1e-250;

/// Per-input fitting state: multiplicative factors `f[b][s]`.
struct Fit {
    factors: Vec<f64>,
}

fn check_options(opts: &PrimalOptions) -> Result<()> {
    if !(opts.tol > 0.0 && opts.feasibility_tol > 0.0 && opts.ipf_tol > 0.0 && opts.gap_tol > 0.0) {
        return Err(Error::DomainError("tolerances must be positive".into()));
    }
    Ok(())
}

/// Minimizes `I(S⃗;A)` over the coupling set at a fixed prior.
pub fn minimize_mutual_info(cbox: &CBox, prior: &Prior, opts: &PrimalOptions) -> Result<PrimalResult> {
    let start = product_coupling(cbox, opts.cap)?;
    minimize_from(cbox, prior, opts, start)
}

fn minimize_from(cbox: &CBox, prior: &Prior, opts: &PrimalOptions, start: Coupling) -> Result<PrimalResult> {
    check_options(opts)?;
    prior.check_len(cbox.a_count())?;
    let space = cbox.outcome_space(opts.cap)?;
    let (m_count, s_count, len) = (cbox.m_count(), cbox.s_count(), space.len());
    let weights = prior.weights();
    let active: Vec<usize> = (0..cbox.a_count()).filter(|&a| weights[a] > 0.0).collect();

    let mut table = start.as_flat().to_vec();
    // support reduction: a zero in P(·|a,b) pins the factor to zero
    let mut fits: Vec<Fit> = (0..cbox.a_count())
        .map(|a| Fit {
            factors: (0..m_count)
                .flat_map(|b| cbox.row(a, b).iter().map(|&p| if p > 0.0 { 1.0 } else { 0.0 }))
                .collect(),
        })
        .collect();

    let mut history = Vec::new();
    let mut best_gap = f64::INFINITY;
    let mut previous = objective(&table, weights, &mixture(&table, weights, len), len);
    let mut scratch = vec![0.0; s_count];
    for iteration in 1..=opts.max_iter {
        let q = mixture(&table, weights, len);
        let mut violation: f64 = 0.0;
        for &a in &active {
            let row = &mut table[a * len..][..len];
            let v = project(&q, cbox, a, &space, &mut fits[a], row, opts, &mut scratch);
            violation = violation.max(v);
        }
        let q_new = mixture(&table, weights, len);
        let value = objective(&table, weights, &q_new, len);
        history.push(value);
        let decrease = previous - value;
        previous = value;

        let settled = decrease < opts.tol && violation <= opts.feasibility_tol;
        if settled || iteration % 100 == 0 || iteration == opts.max_iter {
            let (dual_point, bound) = certificate(cbox, prior, &fits, opts)?;
            let gap = value - bound;
            best_gap = best_gap.min(gap);
            if settled && gap <= opts.gap_tol {
                let coupling = Coupling::new(cbox.a_count(), space, table)?;
                let constraint_violation = check_membership(&coupling, cbox, f64::INFINITY)?.max_deviation;
                return Ok(PrimalResult {
                    coupling,
                    value_nats: value,
                    constraint_violation,
                    prior: prior.clone(),
                    iterations: iteration,
                    dual_point,
                    dual_bound_nats: bound,
                    history,
                });
            }
        }
    }
    Err(Error::NonConvergence { iterations: opts.max_iter, best_gap })
}

fn mixture(table: &[f64], weights: &[f64], len: usize) -> Vec<f64> {
    let mut q = vec![0.0; len];
    for (row, &w) in table.chunks(len).zip(weights) {
        if w > 0.0 {
            q.iter_mut().zip(row).for_each(|(qk, r)| *qk += w * r);
        }
    }
    q
}

fn objective(table: &[f64], weights: &[f64], q: &[f64], len: usize) -> f64 {
    table
        .chunks(len)
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(row, w)| w * relative_entropy(row, q))
        .sum::<f64>()
        .max(0.0)
}

/// Fits `row = q · Π_b f_b(s_b)` to the marginals of input `a`; returns the
/// remaining violation.
#[allow(clippy::too_many_arguments)]
fn project(
    q: &[f64],
    cbox: &CBox,
    a: usize,
    space: &OutcomeSpace,
    fit: &mut Fit,
    row: &mut [f64],
    opts: &PrimalOptions,
    marginal: &mut [f64],
) -> f64 {
    let (m_count, s_count) = (cbox.m_count(), cbox.s_count());
    row.copy_from_slice(q);
    for b in 0..m_count {
        let f = &fit.factors[b * s_count..][..s_count];
        space.for_each_digit(b, |k, s| row[k] *= f[s]);
    }
    let mut violation = f64::INFINITY;
    for _ in 0..opts.ipf_sweeps {
        for b in 0..m_count {
            marginal.fill(0.0);
            space.for_each_digit(b, |k, s| marginal[s] += row[k]);
            let target = cbox.row(a, b);
            for s in 0..s_count {
                // m = 0 with a positive target cannot be fixed by rescaling
                marginal[s] = if marginal[s] > 0.0 { target[s] / marginal[s] } else { 1.0 };
                fit.factors[b * s_count + s] *= marginal[s];
            }
            space.for_each_digit(b, |k, s| row[k] *= marginal[s]);
        }
        violation = 0.0;
        for b in 0..m_count {
            marginal.fill(0.0);
            space.for_each_digit(b, |k, s| marginal[s] += row[k]);
            for (m, p) in marginal.iter().zip(cbox.row(a, b)) {
                violation = violation.max((m - p).abs());
            }
        }
        if violation <= opts.ipf_tol {
            break;
        }
    }
    // entries this small would underflow once weighted into the mixture
    row.iter_mut().filter(|x| **x < NEGLIGIBLE).for_each(|x| *x = 0.0);
    violation
}

/// `λ(s,a,b) = log f_{a,b}(s)` (floored), normalized to feasibility.
fn certificate(cbox: &CBox, prior: &Prior, fits: &[Fit], opts: &PrimalOptions) -> Result<(DualPoint, f64)> {
    let (a_count, m_count, s_count) = (cbox.a_count(), cbox.m_count(), cbox.s_count());
    let mut lp = DualPoint::zeros(a_count, m_count, s_count).with_clamp_floor(opts.clamp_floor);
    for (a, fit) in fits.iter().enumerate() {
        if prior.weights()[a] == 0.0 {
            continue;
        }
        for b in 0..m_count {
            for s in 0..s_count {
                lp.set(s, a, b, fit.factors[b * s_count + s].ln().max(opts.clamp_floor));
            }
        }
    }
    let lp = normalize_feasible(&lp, prior, opts.cap)?;
    let bound = dual_objective(&lp, cbox, prior)?;
    Ok((lp, bound))
}

#[derive(Debug, Clone)]
pub struct PriorOptions {
    pub primal: PrimalOptions,
    /// Stop once the certified upper bound is within this of the value.
    pub tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for PriorOptions {
    fn default() -> Self {
        Self { primal: PrimalOptions::default(), tol: 1e-6, max_iter: 500, initial_step: 1.0, min_step: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct PriorSearchResult {
    pub prior: Prior,
    pub result: PrimalResult,
    /// `max_a D(ρ(·|a) ‖ q)` at the final coupling, an upper bound on the
    /// asymptotic complexity up to the coupling's feasibility slack.
    pub upper_bound_nats: f64,
    pub iterations: usize,
}

fn input_divergences(result: &PrimalResult) -> Vec<f64> {
    let c = &result.coupling;
    let q = output_distribution(c, result.prior.weights());
    (0..c.a_count()).map(|a| relative_entropy(c.row(a), &q)).collect()
}

/// Mirror ascent over the prior simplex, starting from the uniform prior.
///
/// The gradient of the minimum with respect to `ρ(a)` is `D(ρ(·|a) ‖ q)`
/// (up to a constant), so each step is `ρ(a) ∝ ρ(a) e^{η D_a}`; the step
/// `η` is halved whenever a proposal does not improve the value.
pub fn outer_maximize_prior(cbox: &CBox, opts: &PriorOptions) -> Result<PriorSearchResult> {
    let mut current = minimize_mutual_info(cbox, &Prior::uniform(cbox.a_count())?, &opts.primal)?;
    let mut step = opts.initial_step;
    let mut iterations = 0;
    let mut divergences = input_divergences(&current);
    let mut upper = divergences.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    while iterations < opts.max_iter && upper - current.value_nats > opts.tol && step >= opts.min_step {
        iterations += 1;
        let proposal: Vec<f64> =
            current.prior.weights().iter().zip(&divergences).map(|(w, d)| w * (step * (d - upper)).exp()).collect();
        let prior = Prior::normalized(proposal)?;
        let candidate = minimize_from(cbox, &prior, &opts.primal, current.coupling.clone())?;
        if candidate.value_nats > current.value_nats {
            current = candidate;
            divergences = input_divergences(&current);
            upper = divergences.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        } else {
            step *= 0.5;
        }
    }
    Ok(PriorSearchResult { prior: current.prior.clone(), result: current, upper_bound_nats: upper, iterations })
}

/// A lower bound on both the asymptotic and the one-shot communication
/// complexity, obtained at a fixed prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// Converged primal minimum.
    pub bits: f64,
    /// Objective of a feasible dual point; rigorous regardless of convergence.
    pub certified_bits: f64,
}

pub fn lower_bound_at_prior(cbox: &CBox, prior: &Prior, opts: &PrimalOptions) -> Result<LowerBound> {
    let r = minimize_mutual_info(cbox, prior, opts)?;
    Ok(LowerBound { bits: r.value_bits(), certified_bits: nats_to_bits(r.dual_bound_nats) })
}

/// Upper end of the one-shot sandwich `C ≤ C_ch ≤ C + 2 log₂(C + 1) + 2 log₂ e`.
pub fn one_shot_upper_bits(asymptotic_bits: f64) -> f64 {
    asymptotic_bits + 2.0 * (asymptotic_bits + 1.0).log2() + 2.0 * LOG2_E
}
