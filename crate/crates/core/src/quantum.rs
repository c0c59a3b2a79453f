//! Pure states, two-outcome rank-1 measurements and Haar-measure geometry.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cbox::CBox;
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// A unit vector in `C^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Requires `Σ|amplitude|² = 1` within 1e-12.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyInput("state has no amplitudes"));
        }
        let norm_sq: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
        if !((norm_sq - 1.0).abs() <= NORM_TOL) {
            return Err(Error::InvalidState(format!("squared norm {norm_sq}")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyInput("state has no amplitudes"));
        }
        let norm = amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    /// Computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, len: dim });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(x, y)| x.conj() * y).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().min(1.0))
    }
}

/// Measurement with the rank-1 event `|φ⟩⟨φ|` (outcome 0) and its complement (outcome 1).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoOutcomeMeasurement {
    pub axis: PureState,
}

impl TwoOutcomeMeasurement {
    pub fn new(axis: PureState) -> Self {
        Self { axis }
    }
}

/// The unit vectors `φ` with `|⟨χ|φ⟩|² ≥ cos²θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    pub axis: PureState,
    pub half_angle: f64,
}

impl Cone {
    pub fn new(axis: PureState, half_angle: f64) -> Result<Self> {
        check_angle(half_angle)?;
        Ok(Self { axis, half_angle })
    }

    pub fn contains(&self, phi: &PureState) -> Result<bool> {
        Ok(self.axis.overlap(phi)? >= cone_threshold(self.half_angle))
    }

    /// Haar measure of the cone, `sin^{2N−2}θ`.
    pub fn measure(&self) -> Result<f64> {
        cone_measure(self.half_angle, self.axis.dim())
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::DomainError(format!("angle {theta} outside [0, π/2]")));
    }
    Ok(())
}

fn cone_threshold(theta: f64) -> f64 {
    if theta >= FRAC_PI_2 {
        0.0
    } else {
        theta.cos().powi(2)
    }
}

/// Outcome probabilities `(|⟨ψ|φ⟩|², 1 − |⟨ψ|φ⟩|²)`.
pub fn born_probability(psi: &PureState, measurement: &TwoOutcomeMeasurement) -> Result<(f64, f64)> {
    let p1 = psi.overlap(&measurement.axis)?;
    Ok((p1, 1.0 - p1))
}

/// Box with one input per state, one setting per axis and two outcomes.
pub fn build_quantum_cbox(states: &[PureState], axes: &[TwoOutcomeMeasurement]) -> Result<CBox> {
    let first = states.first().ok_or(Error::EmptyInput("no states"))?;
    if axes.is_empty() {
        return Err(Error::EmptyInput("no measurement axes"));
    }
    let dim = first.dim();
    if let Some(bad) = states.iter().map(PureState::dim).chain(axes.iter().map(|m| m.axis.dim())).find(|&d| d != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad });
    }
    let mut probs = Vec::with_capacity(states.len() * axes.len() * 2);
    for psi in states {
        for m in axes {
            let (p1, p2) = born_probability(psi, m)?;
            probs.push(p1);
            probs.push(p2);
        }
    }
    CBox::from_flat(states.len(), axes.len(), 2, probs)
}

fn gaussian_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
}

/// `count` Haar-random states in `C^dim`, reproducible from `seed`.
pub fn haar_sample(dim: usize, count: usize, seed: u64) -> Result<Vec<PureState>> {
    if dim == 0 {
        return Err(Error::DomainError("dimension must be at least 1".into()));
    }
    if count == 0 {
        return Err(Error::DomainError("count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        // a zero draw has probability zero; skip it if it ever happens
        if let Ok(state) = PureState::normalized(gaussian_vector(&mut rng, dim)) {
            out.push(state);
        }
    }
    Ok(out)
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

impl McEstimate {
    /// `(estimate − expected) / stderr`; zero when both the error and the difference vanish.
    pub fn z_score(&self, expected: f64) -> f64 {
        let diff = self.estimate - expected;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr
        }
    }

    fn from_sums(sum: f64, sum_sq: f64, n: usize) -> Self {
        let n = n as f64;
        let mean = sum / n;
        let var = ((sum_sq / n - mean * mean) * n / (n - 1.0).max(1.0)).max(0.0);
        Self { estimate: mean, stderr: (var / n).sqrt() }
    }
}

/// Overlap `|⟨e_1|φ⟩|²` of a Haar sample; exactly 1 in dimension one.
fn sampled_overlap(rng: &mut ChaCha8Rng, dim: usize) -> f64 {
    loop {
        let v = gaussian_vector(rng, dim);
        let total: f64 = v.iter().map(Complex64::norm_sqr).sum();
        if total > 0.0 {
            return v[0].norm_sqr() / total;
        }
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::DomainError("need at least two samples".into()));
    }
    Ok(())
}

/// Estimate of `∫dφ |⟨φ|ψ⟩|^k` for `k ∈ {2, 4}` with `ψ = e_1`.
pub fn mc_overlap_moment(dim: usize, k: u32, samples: usize, seed: u64) -> Result<McEstimate> {
    if k != 2 && k != 4 {
        return Err(Error::UnsupportedMoment(k));
    }
    if dim == 0 {
        return Err(Error::DomainError("dimension must be at least 1".into()));
    }
    check_samples(samples)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let x = sampled_overlap(&mut rng, dim).powi(k as i32 / 2);
        sum += x;
        sum_sq += x * x;
    }
    Ok(McEstimate::from_sums(sum, sum_sq, samples))
}

/// Exact moments `1/N` (k = 2) and `2/(N(N+1))` (k = 4).
pub fn overlap_moment(dim: usize, k: u32) -> Result<f64> {
    let n = dim as f64;
    match k {
        2 => Ok(1.0 / n),
        4 => Ok(2.0 / (n * (n + 1.0))),
        _ => Err(Error::UnsupportedMoment(k)),
    }
}

/// `S(θ) = sin^{2N−2}θ`, the Haar measure of a cone of half-angle `θ`.
pub fn cone_measure(theta: f64, dim: usize) -> Result<f64> {
    check_angle(theta)?;
    if dim < 2 {
        return Err(Error::DomainError("cone measure needs N ≥ 2".into()));
    }
    Ok(theta.sin().powi(2 * dim as i32 - 2))
}

/// `∫_{Ω(θ)} dφ |⟨ψ|φ⟩|² = S(θ)(cos²θ·|⟨ψ|χ⟩|² + sin²θ/N)`.
pub fn cone_overlap_integral(theta: f64, overlap: f64, dim: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::DomainError(format!("overlap {overlap} outside [0, 1]")));
    }
    let s = cone_measure(theta, dim)?;
    let (sin, cos) = theta.sin_cos();
    Ok(s * (cos * cos * overlap + sin * sin / dim as f64))
}

/// Fraction of Haar samples inside a cone of half-angle `θ`.
pub fn mc_cone_measure(theta: f64, dim: usize, samples: usize, seed: u64) -> Result<McEstimate> {
    check_angle(theta)?;
    check_samples(samples)?;
    if dim < 2 {
        return Err(Error::DomainError("cone measure needs N ≥ 2".into()));
    }
    let threshold = cone_threshold(theta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..samples).filter(|_| sampled_overlap(&mut rng, dim) >= threshold).count();
    let p = hits as f64 / samples as f64;
    Ok(McEstimate { estimate: p, stderr: (p * (1.0 - p) / samples as f64).sqrt() })
}

/// Monte Carlo estimate of [`cone_overlap_integral`] by rejection sampling.
///
/// The cone axis is `e_1` and `ψ = √o·e_1 + √(1−o)·e_2`.
pub fn mc_cone_overlap_integral(theta: f64, overlap: f64, dim: usize, samples: usize, seed: u64) -> Result<McEstimate> {
    check_angle(theta)?;
    check_samples(samples)?;
    if dim < 2 {
        return Err(Error::DomainError("cone integral needs N ≥ 2".into()));
    }
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::DomainError(format!("overlap {overlap} outside [0, 1]")));
    }
    let threshold = cone_threshold(theta);
    let (c0, c1) = (overlap.sqrt(), (1.0 - overlap).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let v = gaussian_vector(&mut rng, dim);
        let total: f64 = v.iter().map(Complex64::norm_sqr).sum();
        let x = if v[0].norm_sqr() / total >= threshold { (v[0] * c0 + v[1] * c1).norm_sqr() / total } else { 0.0 };
        sum += x;
        sum_sq += x * x;
    }
    Ok(McEstimate::from_sums(sum, sum_sq, samples))
}
