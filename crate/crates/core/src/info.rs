//! Mutual information and channel capacity. Everything is in nats.

use std::f64::consts::LN_2;

use crate::cbox::{Coupling, Prior, CONSTRUCTION_TOL};
use crate::error::{Error, Result};

/// Converts nats to bits.
pub fn nats_to_bits(nats: f64) -> f64 {
    nats / LN_2
}

pub fn bits_to_nats(bits: f64) -> f64 {
    bits * LN_2
}

/// A row-stochastic table `W(y|x)`.
pub trait ConditionalTable {
    fn n_inputs(&self) -> usize;
    fn n_outputs(&self) -> usize;
    fn row(&self, x: usize) -> &[f64];
}

impl ConditionalTable for Coupling {
    fn n_inputs(&self) -> usize {
        self.a_count()
    }

    fn n_outputs(&self) -> usize {
        self.space().len()
    }

    fn row(&self, x: usize) -> &[f64] {
        Coupling::row(self, x)
    }
}

/// A discrete memoryless channel stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    n_inputs: usize,
    n_outputs: usize,
    data: Vec<f64>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_outputs = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || n_outputs == 0 {
            return Err(Error::NonStochasticInput("empty channel".into()));
        }
        if rows.iter().any(|r| r.len() != n_outputs) {
            return Err(Error::NonStochasticInput("ragged rows".into()));
        }
        Self::from_flat(rows.len(), n_outputs, rows.concat())
    }

    pub fn from_flat(n_inputs: usize, n_outputs: usize, data: Vec<f64>) -> Result<Self> {
        if n_inputs == 0 || n_outputs == 0 || data.len() != n_inputs * n_outputs {
            return Err(Error::NonStochasticInput("shape does not match data".into()));
        }
        for (x, row) in data.chunks(n_outputs).enumerate() {
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::NonStochasticInput(format!("row {x} has a negative or non-finite entry")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > CONSTRUCTION_TOL {
                return Err(Error::NonStochasticInput(format!("row {x} sums to {total}")));
            }
        }
        Ok(Self { n_inputs, n_outputs, data })
    }

    /// Channel of two independent uses: input `(x1, x2)` maps to index `x1·n2 + x2`.
    pub fn product(&self, other: &Channel) -> Channel {
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for x1 in 0..self.n_inputs {
            for x2 in 0..other.n_inputs {
                for &w1 in ConditionalTable::row(self, x1) {
                    data.extend(ConditionalTable::row(other, x2).iter().map(|w2| w1 * w2));
                }
            }
        }
        Channel { n_inputs: self.n_inputs * other.n_inputs, n_outputs: self.n_outputs * other.n_outputs, data }
    }

    /// Same channel with all-zero output columns removed.
    fn without_dead_outputs(&self) -> Channel {
        let live: Vec<usize> = (0..self.n_outputs)
            .filter(|&y| (0..self.n_inputs).any(|x| self.data[x * self.n_outputs + y] > 0.0))
            .collect();
        if live.len() == self.n_outputs {
            return self.clone();
        }
        let data = (0..self.n_inputs)
            .flat_map(|x| live.iter().map(move |&y| (x, y)))
            .map(|(x, y)| self.data[x * self.n_outputs + y])
            .collect();
        Channel { n_inputs: self.n_inputs, n_outputs: live.len(), data }
    }
}

impl ConditionalTable for Channel {
    fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.n_outputs..][..self.n_outputs]
    }
}

/// Output distribution `q(y) = Σ_x p(x) W(y|x)`.
pub fn output_distribution<T: ConditionalTable + ?Sized>(table: &T, weights: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; table.n_outputs()];
    for (x, &p) in weights.iter().enumerate() {
        if p > 0.0 {
            for (qy, w) in q.iter_mut().zip(table.row(x)) {
                *qy += p * w;
            }
        }
    }
    q
}

/// `D(row ‖ q)` with the convention `0·log(0/·) = 0`.
pub fn relative_entropy(row: &[f64], q: &[f64]) -> f64 {
    row.iter().zip(q).filter(|(w, _)| **w > 0.0).map(|(w, qy)| w * (w / qy).ln()).sum()
}

/// `I(Y;X) = Σ_x p(x) D(W(·|x) ‖ q)` in nats; never negative.
pub fn mutual_information<T: ConditionalTable + ?Sized>(table: &T, prior: &Prior) -> Result<f64> {
    if prior.len() != table.n_inputs() {
        return Err(Error::ShapeMismatch(format!(
            "prior has {} weights, table has {} inputs",
            prior.len(),
            table.n_inputs()
        )));
    }
    let q = output_distribution(table, prior.weights());
    let total: f64 = prior
        .weights()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(x, p)| p * relative_entropy(table.row(x), &q))
        .sum();
    Ok(total.max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// Certified lower estimate; the true capacity lies in `[capacity_nats, capacity_nats + gap_bound]`.
    pub capacity_nats: f64,
    pub optimal_prior: Prior,
    pub iterations: usize,
    pub gap_bound: f64,
}

const CAPACITY_MAX_ITER: usize = 1_000_000;

/// Blahut–Arimoto iteration stopped once `max_x D(W_x‖q) − log Σ_x p(x) e^{D(W_x‖q)} ≤ tol`.
pub fn channel_capacity(channel: &Channel, tol: f64) -> Result<CapacityResult> {
    if !(tol > 0.0) {
        return Err(Error::DomainError(format!("tolerance {tol} must be positive")));
    }
    let ch = channel.without_dead_outputs();
    let n = ch.n_inputs();
    let mut p = vec![1.0 / n as f64; n];
    let mut divergences = vec![0.0; n];
    let mut best_gap = f64::INFINITY;
    for iteration in 1..=CAPACITY_MAX_ITER {
        let q = output_distribution(&ch, &p);
        for (x, d) in divergences.iter_mut().enumerate() {
            *d = relative_entropy(ch.row(x), &q);
        }
        let upper = divergences.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = p.iter().zip(&divergences).map(|(px, d)| px * (d - upper).exp()).sum();
        let lower = upper + z.ln();
        let gap = (upper - lower).max(0.0);
        best_gap = best_gap.min(gap);
        if gap <= tol {
            return Ok(CapacityResult {
                capacity_nats: lower.max(0.0),
                optimal_prior: Prior::normalized(p)?,
                iterations: iteration,
                gap_bound: gap,
            });
        }
        for (px, d) in p.iter_mut().zip(&divergences) {
            *px *= (d - upper).exp() / z;
        }
    }
    Err(Error::NonConvergence { iterations: CAPACITY_MAX_ITER, best_gap })
}
