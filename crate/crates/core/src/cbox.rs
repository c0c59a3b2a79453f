//! Two-party boxes `P(s|a,b)`, priors over the sender input, outcome tuples
//! and couplings `ρ(s⃗|a)`.
//!
//! Tables are stored flat. A box is indexed `[a][b][s]`; a coupling is indexed
//! `[a][k]` where `k` is the base-`s_count` encoding of the outcome tuple
//! `(s_1, …, s_M)` with `s_1` as the least significant digit.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Row-sum tolerance applied when a box or coupling is constructed.
pub const CONSTRUCTION_TOL: f64 = 1e-9;
/// Default tolerance for [`check_membership`].
pub const MEMBERSHIP_TOL: f64 = 1e-6;
/// Prior weights must sum to one within this tolerance.
pub const PRIOR_TOL: f64 = 1e-12;
/// Default bound on the number of outcome tuples `s_count^m_count`.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// Number of outcome tuples, or `SizeOverflow` when it exceeds `cap`.
pub fn tuple_count(s_count: usize, m_count: usize, cap: usize) -> Result<usize> {
    let required = u32::try_from(m_count).ok().and_then(|m| (s_count as u128).checked_pow(m)).unwrap_or(u128::MAX);
    if required > cap as u128 {
        return Err(Error::SizeOverflow { required, cap });
    }
    Ok(required as usize)
}

/// A conditional distribution `P(s|a,b)` over `s_count` outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct CBox {
    a_count: usize,
    m_count: usize,
    s_count: usize,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CBoxDoc {
    a_count: usize,
    m_count: usize,
    s_count: usize,
    probs: Vec<Vec<Vec<f64>>>,
}

impl CBox {
    /// Validates a nested `[a][b][s]` table.
    pub fn new(raw: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let a_count = raw.len();
        let m_count = raw.first().map_or(0, Vec::len);
        let s_count = raw.first().and_then(|r| r.first()).map_or(0, Vec::len);
        if a_count == 0 || m_count == 0 || s_count == 0 {
            return Err(Error::InvalidShape("box table needs three axes with positive extents".into()));
        }
        let mut probs = Vec::with_capacity(a_count * m_count * s_count);
        for (a, by_b) in raw.iter().enumerate() {
            if by_b.len() != m_count {
                return Err(Error::InvalidShape(format!(
                    "input a={a} has {} settings, expected {m_count}",
                    by_b.len()
                )));
            }
            for (b, row) in by_b.iter().enumerate() {
                if row.len() != s_count {
                    return Err(Error::InvalidShape(format!(
                        "row (a={a}, b={b}) has {} outcomes, expected {s_count}",
                        row.len()
                    )));
                }
                probs.extend_from_slice(row);
            }
        }
        Self::from_flat(a_count, m_count, s_count, probs)
    }

    /// Validates a flat `[a][b][s]` table.
    pub fn from_flat(a_count: usize, m_count: usize, s_count: usize, probs: Vec<f64>) -> Result<Self> {
        if a_count == 0 || m_count == 0 || s_count == 0 {
            return Err(Error::InvalidShape("extents must be positive".into()));
        }
        if probs.len() != a_count * m_count * s_count {
            return Err(Error::InvalidShape(format!(
                "expected {} entries, found {}",
                a_count * m_count * s_count,
                probs.len()
            )));
        }
        for a in 0..a_count {
            for b in 0..m_count {
                let row = &probs[(a * m_count + b) * s_count..][..s_count];
                for (s, &p) in row.iter().enumerate() {
                    if !p.is_finite() {
                        return Err(Error::NonFinite { a, b, s });
                    }
                    if p < 0.0 {
                        return Err(Error::NegativeProbability { a, b, s, value: p });
                    }
                }
                let deficit = 1.0 - row.iter().sum::<f64>();
                if deficit.abs() > CONSTRUCTION_TOL {
                    return Err(Error::RowNotNormalized { a, b, deficit });
                }
            }
        }
        Ok(Self { a_count, m_count, s_count, probs })
    }

    pub fn a_count(&self) -> usize {
        self.a_count
    }

    /// Number of measurement settings `M`.
    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn s_count(&self) -> usize {
        self.s_count
    }

    #[inline]
    pub fn p(&self, a: usize, b: usize, s: usize) -> f64 {
        self.probs[(a * self.m_count + b) * self.s_count + s]
    }

    /// Outcome distribution for input `a` and setting `b`.
    pub fn row(&self, a: usize, b: usize) -> &[f64] {
        &self.probs[(a * self.m_count + b) * self.s_count..][..self.s_count]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.probs
    }

    /// The `[a][s]` table for setting `b`.
    pub fn slice(&self, b: usize) -> Result<Vec<Vec<f64>>> {
        if b >= self.m_count {
            return Err(Error::IndexOutOfRange { index: b, len: self.m_count });
        }
        Ok((0..self.a_count).map(|a| self.row(a, b).to_vec()).collect())
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.a_count).map(|a| (0..self.m_count).map(|b| self.row(a, b).to_vec()).collect()).collect()
    }

    pub fn outcome_space(&self, cap: usize) -> Result<OutcomeSpace> {
        OutcomeSpace::new(self.s_count, self.m_count, cap)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CBoxDoc = serde_json::from_str(text)?;
        let cbox = Self::new(doc.probs)?;
        if (cbox.a_count, cbox.m_count, cbox.s_count) != (doc.a_count, doc.m_count, doc.s_count) {
            return Err(Error::InvalidShape(format!(
                "declared extents ({}, {}, {}) disagree with probs ({}, {}, {})",
                doc.a_count, doc.m_count, doc.s_count, cbox.a_count, cbox.m_count, cbox.s_count
            )));
        }
        Ok(cbox)
    }

    pub fn to_json(&self) -> String {
        let doc =
            CBoxDoc { a_count: self.a_count, m_count: self.m_count, s_count: self.s_count, probs: self.to_nested() };
        serde_json::to_string_pretty(&doc).expect("box serializes")
    }

    /// Canonical text hashed by [`CBox::digest`]: sorted keys, no whitespace,
    /// every probability printed with 12 fractional digits in scientific form.
    pub fn canonical_document(&self) -> String {
        let mut out = format!("{{\"a_count\":{},\"m_count\":{},\"probs\":[", self.a_count, self.m_count);
        for a in 0..self.a_count {
            if a > 0 {
                out.push(',');
            }
            out.push('[');
            for b in 0..self.m_count {
                if b > 0 {
                    out.push(',');
                }
                out.push('[');
                for (s, p) in self.row(a, b).iter().enumerate() {
                    if s > 0 {
                        out.push(',');
                    }
                    // adding 0.0 folds -0.0 into 0.0
                    out.push_str(&format!("{:.12e}", p + 0.0));
                }
                out.push(']');
            }
            out.push(']');
        }
        out.push_str(&format!("],\"s_count\":{}}}", self.s_count));
        out
    }

    /// Lowercase hex SHA-256 of [`CBox::canonical_document`].
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_document().as_bytes()))
    }
}

/// Weights `ρ(a)` over the sender inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prior {
    weights: Vec<f64>,
}

impl Prior {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidPrior("no weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidPrior(format!("weight {w} is not a probability")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PRIOR_TOL {
            return Err(Error::InvalidPrior(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    /// Rescales nonnegative weights to sum to one.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidPrior("weights must be nonnegative with positive sum".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPrior("no weights".into()));
        }
        Ok(Self { weights: vec![1.0 / n as f64; n] })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            weights: Vec<f64>,
        }
        Self::new(serde_json::from_str::<Doc>(text)?.weights)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("prior serializes")
    }

    pub(crate) fn check_len(&self, a_count: usize) -> Result<()> {
        if self.weights.len() != a_count {
            return Err(Error::ShapeMismatch(format!(
                "prior has {} weights, box has {a_count} inputs",
                self.weights.len()
            )));
        }
        Ok(())
    }
}

/// An outcome tuple `(s_1, …, s_M)` together with its index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SVector {
    pub entries: Vec<usize>,
    pub index: usize,
}

/// The set of outcome tuples for `m_count` settings with `s_count` outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeSpace {
    s_count: usize,
    m_count: usize,
    len: usize,
}

impl OutcomeSpace {
    pub fn new(s_count: usize, m_count: usize, cap: usize) -> Result<Self> {
        if s_count == 0 || m_count == 0 {
            return Err(Error::InvalidShape("extents must be positive".into()));
        }
        let len = tuple_count(s_count, m_count, cap)?;
        Ok(Self { s_count, m_count, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn s_count(&self) -> usize {
        self.s_count
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn decode(&self, index: usize) -> Result<SVector> {
        if index >= self.len {
            return Err(Error::IndexOutOfRange { index, len: self.len });
        }
        let mut rest = index;
        let entries = (0..self.m_count)
            .map(|_| {
                let digit = rest % self.s_count;
                rest /= self.s_count;
                digit
            })
            .collect();
        Ok(SVector { entries, index })
    }

    pub fn encode(&self, entries: &[usize]) -> Result<usize> {
        if entries.len() != self.m_count {
            return Err(Error::ShapeMismatch(format!(
                "tuple has {} entries, expected {}",
                entries.len(),
                self.m_count
            )));
        }
        let mut index = 0;
        for &s in entries.iter().rev() {
            if s >= self.s_count {
                return Err(Error::IndexOutOfRange { index: s, len: self.s_count });
            }
            index = index * self.s_count + s;
        }
        Ok(index)
    }

    /// Outcome `s_b` of the tuple with the given index.
    #[inline]
    pub fn digit(&self, index: usize, b: usize) -> usize {
        (index / self.s_count.pow(b as u32)) % self.s_count
    }

    /// Calls `f(index, s_b)` for every tuple, walking the index space in strides.
    pub fn for_each_digit(&self, b: usize, mut f: impl FnMut(usize, usize)) {
        let low = self.s_count.pow(b as u32);
        let high = self.len / (low * self.s_count);
        for h in 0..high {
            for s in 0..self.s_count {
                let base = (h * self.s_count + s) * low;
                for index in base..base + low {
                    f(index, s);
                }
            }
        }
    }

    /// Calls `f(index, entries)` for every tuple in index order.
    pub fn for_each(&self, mut f: impl FnMut(usize, &[usize])) {
        let mut entries = vec![0usize; self.m_count];
        for index in 0..self.len {
            f(index, &entries);
            for e in entries.iter_mut() {
                *e += 1;
                if *e < self.s_count {
                    break;
                }
                *e = 0;
            }
        }
    }
}

/// A conditional distribution `ρ(s⃗|a)` over outcome tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    a_count: usize,
    space: OutcomeSpace,
    table: Vec<f64>,
}

impl Coupling {
    /// Checks nonnegativity and per-input normalization (tolerance 1e-9).
    pub fn new(a_count: usize, space: OutcomeSpace, table: Vec<f64>) -> Result<Self> {
        if a_count == 0 {
            return Err(Error::InvalidShape("coupling needs at least one input".into()));
        }
        if table.len() != a_count * space.len() {
            return Err(Error::InvalidShape(format!(
                "expected {} entries, found {}",
                a_count * space.len(),
                table.len()
            )));
        }
        for (a, row) in table.chunks(space.len()).enumerate() {
            if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidCoupling(format!("entry {v} for input {a}")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > CONSTRUCTION_TOL {
                return Err(Error::InvalidCoupling(format!("input {a} sums to {total}")));
            }
        }
        Ok(Self { a_count, space, table })
    }

    pub fn a_count(&self) -> usize {
        self.a_count
    }

    pub fn m_count(&self) -> usize {
        self.space.m_count()
    }

    pub fn s_count(&self) -> usize {
        self.space.s_count()
    }

    pub fn space(&self) -> OutcomeSpace {
        self.space
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.table[a * self.space.len()..][..self.space.len()]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.table
    }

    pub fn to_nested(&self) -> Vec<Vec<f64>> {
        self.table.chunks(self.space.len()).map(<[f64]>::to_vec).collect()
    }
}

/// `Σ_{s⃗ : s_b = s} ρ(s⃗|a)` for each `(a, s)`.
pub fn coupling_marginal(c: &Coupling, b: usize) -> Result<Vec<Vec<f64>>> {
    if b >= c.m_count() {
        return Err(Error::IndexOutOfRange { index: b, len: c.m_count() });
    }
    let space = c.space();
    Ok((0..c.a_count())
        .map(|a| {
            let mut m = vec![0.0; space.s_count()];
            for (k, v) in c.row(a).iter().enumerate() {
                m[space.digit(k, b)] += v;
            }
            m
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipReport {
    /// Largest `|marginal − P(s|a,b)|` over all `(a, b, s)`.
    pub max_deviation: f64,
    pub min_entry: f64,
    pub member: bool,
}

/// Whether `c` reproduces every marginal of `cbox` within `tol`.
pub fn check_membership(c: &Coupling, cbox: &CBox, tol: f64) -> Result<MembershipReport> {
    if (c.a_count(), c.m_count(), c.s_count()) != (cbox.a_count(), cbox.m_count(), cbox.s_count()) {
        return Err(Error::ShapeMismatch(format!(
            "coupling ({}, {}, {}) vs box ({}, {}, {})",
            c.a_count(),
            c.m_count(),
            c.s_count(),
            cbox.a_count(),
            cbox.m_count(),
            cbox.s_count()
        )));
    }
    let mut max_deviation: f64 = 0.0;
    for b in 0..cbox.m_count() {
        for (a, m) in coupling_marginal(c, b)?.iter().enumerate() {
            for (s, v) in m.iter().enumerate() {
                max_deviation = max_deviation.max((v - cbox.p(a, b, s)).abs());
            }
        }
    }
    let min_entry = c.as_flat().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MembershipReport { max_deviation, min_entry, member: max_deviation <= tol && min_entry >= -tol })
}

/// `ρ(s⃗|a) = Π_b P(s_b|a,b)`, the canonical member of the coupling set.
pub fn product_coupling(cbox: &CBox, cap: usize) -> Result<Coupling> {
    let space = cbox.outcome_space(cap)?;
    let mut table = Vec::with_capacity(cbox.a_count() * space.len());
    for a in 0..cbox.a_count() {
        space.for_each(|_, entries| {
            table.push(entries.iter().enumerate().map(|(b, &s)| cbox.p(a, b, s)).product());
        });
    }
    Ok(Coupling { a_count: cbox.a_count(), space, table })
}
