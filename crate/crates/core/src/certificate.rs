//! Portable lower-bound certificates.
//!
//! A certificate binds a dual point to a box through the SHA-256 digest of
//! the box's canonical document. Verification re-enumerates every constraint
//! and recomputes the objective; it trusts nothing else in the file.

use serde::{Deserialize, Serialize};

use crate::cbox::{CBox, Prior};
use crate::dual::{dual_objective, max_violation, DualPoint, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::info::nats_to_bits;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Slack allowed between the claimed and the verified bound, in bits.
pub const CLAIM_TOL_BITS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub box_digest: String,
    pub prior: Vec<f64>,
    /// `λ(s,a,b)` in nats, nested `[s][a][b]`.
    pub lambda: Vec<Vec<Vec<f64>>>,
    pub claimed_bound_bits: f64,
    pub tool_version: String,
    /// Creation time as seconds since the Unix epoch.
    pub created: u64,
}

impl Certificate {
    pub fn new(cbox: &CBox, prior: &Prior, point: &DualPoint, bound_nats: f64, created: u64) -> Self {
        Self {
            box_digest: cbox.digest(),
            prior: prior.weights().to_vec(),
            lambda: point.to_nested(),
            claimed_bound_bits: nats_to_bits(bound_nats),
            tool_version: TOOL_VERSION.to_string(),
            created,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifiedBound {
    pub bound_bits: f64,
    pub bound_nats: f64,
    /// Largest constraint value found by the exhaustive scan.
    pub max_violation: f64,
}

/// Checks a certificate against `cbox` by exhaustive enumeration.
///
/// The returned bound is the dual objective minus any positive constraint
/// slack, so it never exceeds the objective of the certificate's `λ`.
pub fn check_certificate(cert: &Certificate, cbox: &CBox, cap: usize) -> Result<VerifiedBound> {
    let found = cbox.digest();
    if cert.box_digest != found {
        return Err(Error::DigestMismatch { expected: cert.box_digest.clone(), found });
    }
    let prior = Prior::new(cert.prior.clone())?;
    let point = DualPoint::from_nested(cert.lambda.clone())?;
    let violation = max_violation(&point, &prior, cap)?;
    if violation.value > FEASIBILITY_TOL {
        return Err(Error::Infeasible { violation: violation.value, witness: violation.witness.entries });
    }
    let bound_nats = dual_objective(&point, cbox, &prior)? - violation.value.max(0.0);
    let bound_bits = nats_to_bits(bound_nats);
    if bound_bits < cert.claimed_bound_bits - CLAIM_TOL_BITS {
        return Err(Error::OverClaimed { claimed: cert.claimed_bound_bits, verified: bound_bits });
    }
    Ok(VerifiedBound { bound_bits, bound_nats, max_violation: violation.value })
}
