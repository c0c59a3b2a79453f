#![allow(dead_code)]

pub mod conic_reference;

use commbound::cbox::{CBox, Coupling, OutcomeSpace, Prior};
use commbound::quantum::PureState;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random box with strictly positive rows bounded away from zero.
pub fn random_box(rng: &mut ChaCha8Rng, a_count: usize, m_count: usize, s_count: usize) -> CBox {
    let mut raw = Vec::with_capacity(a_count);
    for _ in 0..a_count {
        let mut settings = Vec::with_capacity(m_count);
        for _ in 0..m_count {
            let row: Vec<f64> = (0..s_count).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = row.iter().sum();
            settings.push(row.iter().map(|p| p / total).collect());
        }
        raw.push(settings);
    }
    CBox::new(raw).unwrap()
}

pub fn random_prior(rng: &mut ChaCha8Rng, n: usize) -> Prior {
    Prior::normalized((0..n).map(|_| rng.random_range(0.1..1.0)).collect()).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    let v = (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    PureState::normalized(v).unwrap()
}

/// Haar-random unitary as columns, from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> =
            (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        for c in &cols {
            let proj: Complex64 = c.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            v.iter_mut().zip(c).for_each(|(y, x)| *y -= proj * x);
        }
        let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    cols
}

pub fn apply(u: &[Vec<Complex64>], psi: &PureState) -> PureState {
    let dim = u.len();
    let amps = psi.amplitudes();
    let out = (0..dim).map(|i| (0..dim).map(|j| u[j][i] * amps[j]).sum()).collect();
    PureState::normalized(out).unwrap()
}

/// Tuples as digit vectors with `s_1` least significant, by plain counting.
pub fn all_tuples(s_count: usize, m_count: usize) -> Vec<Vec<usize>> {
    let total = s_count.pow(m_count as u32);
    (0..total)
        .map(|mut k| {
            (0..m_count)
                .map(|_| {
                    let d = k % s_count;
                    k /= s_count;
                    d
                })
                .collect()
        })
        .collect()
}

/// `Σ_a ρ(a) Σ_s⃗ ρ(s⃗|a) log(ρ(s⃗|a)/q(s⃗))` as a plain double sum.
pub fn mutual_information_oracle(table: &[Vec<f64>], prior: &[f64]) -> f64 {
    let len = table[0].len();
    let q: Vec<f64> = (0..len).map(|k| table.iter().zip(prior).map(|(r, w)| w * r[k]).sum()).collect();
    let mut total = 0.0;
    for (row, w) in table.iter().zip(prior) {
        for k in 0..len {
            if row[k] > 0.0 && *w > 0.0 {
                total += w * row[k] * (row[k] / q[k]).ln();
            }
        }
    }
    total
}

/// Marginal of a coupling row on setting `b`, by explicit decoding.
pub fn marginal_oracle(row: &[f64], s_count: usize, m_count: usize, b: usize) -> Vec<f64> {
    let mut out = vec![0.0; s_count];
    for (k, t) in all_tuples(s_count, m_count).iter().enumerate() {
        out[t[b]] += row[k];
    }
    out
}

/// Iterative proportional fitting of a positive start table to the box
/// marginals; a test-local way of drawing members of the coupling set.
pub fn fit_to_box(cbox: &CBox, start: &[Vec<f64>], sweeps: usize) -> Coupling {
    let (s, m) = (cbox.s_count(), cbox.m_count());
    let tuples = all_tuples(s, m);
    let mut rows = start.to_vec();
    for (a, row) in rows.iter_mut().enumerate() {
        for _ in 0..sweeps {
            for b in 0..m {
                let marg = marginal_oracle(row, s, m, b);
                for (k, t) in tuples.iter().enumerate() {
                    row[k] *= cbox.p(a, b, t[b]) / marg[t[b]];
                }
            }
        }
    }
    let space = OutcomeSpace::new(s, m, usize::MAX).unwrap();
    Coupling::new(cbox.a_count(), space, rows.concat()).unwrap()
}

pub fn random_member(rng: &mut ChaCha8Rng, cbox: &CBox) -> Coupling {
    let len = cbox.s_count().pow(cbox.m_count() as u32);
    let start: Vec<Vec<f64>> =
        (0..cbox.a_count()).map(|_| (0..len).map(|_| rng.random_range(0.01..1.0)).collect()).collect();
    fit_to_box(cbox, &start, 500)
}

/// Constraint `log Σ_a ρ(a) exp(Σ_b λ(s_b,a,b))` evaluated from nested `λ[s][a][b]`.
pub fn constraint_oracle(lambda: &[Vec<Vec<f64>>], prior: &[f64], tuple: &[usize]) -> f64 {
    let total: f64 = prior
        .iter()
        .enumerate()
        .map(|(a, w)| w * tuple.iter().enumerate().map(|(b, &s)| lambda[s][a][b]).sum::<f64>().exp())
        .sum();
    total.ln()
}

pub fn max_violation_oracle(lambda: &[Vec<Vec<f64>>], prior: &[f64], s_count: usize, m_count: usize) -> f64 {
    all_tuples(s_count, m_count).iter().map(|t| constraint_oracle(lambda, prior, t)).fold(f64::NEG_INFINITY, f64::max)
}

/// `Σ_{s,a,b} P(s|a,b) ρ(a) λ(s,a,b)`.
pub fn dual_objective_oracle(lambda: &[Vec<Vec<f64>>], cbox: &CBox, prior: &[f64]) -> f64 {
    let mut total = 0.0;
    for (s, per_a) in lambda.iter().enumerate() {
        for (a, per_b) in per_a.iter().enumerate() {
            for (b, l) in per_b.iter().enumerate() {
                total += cbox.p(a, b, s) * prior[a] * l;
            }
        }
    }
    total
}

/// `(a_count, m_count, s_count, seed)` for small random instances.
pub fn small_instance() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (1usize..=3, 1usize..=3, 2usize..=3, any::<u64>())
}
