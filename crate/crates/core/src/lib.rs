//! Lower bounds on the communication cost of simulating two-party boxes.
//!
//! A box `P(s|a,b)` is simulated by a message whose mutual information with
//! the input `a` is bounded below by
//!
//! ```text
//! I = min over couplings ρ(s_1..s_M | a) with marginals P(·|a,b) of I(A; S_1..S_M)
//! ```
//!
//! [`primal`] computes the minimum directly, [`dual`] finds certified lower
//! bounds through the convex dual, and [`analytic`] holds closed-form bounds
//! for noiseless quantum channels in small dimensions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cbox;
pub mod certificate;
pub mod dual;
pub mod error;
pub mod info;
pub mod primal;
pub mod quantum;
pub mod special;

pub use cbox::{CBox, Coupling, OutcomeSpace, Prior, SVector};
pub use certificate::{check_certificate, Certificate, VerifiedBound};
pub use dual::{duality_gap, maximize_dual, DualOptions, DualPoint, DualResult};
pub use error::{Error, Result};
pub use info::{channel_capacity, mutual_information, Channel};
pub use primal::{minimize_mutual_info, outer_maximize_prior, PrimalOptions, PrimalResult};
pub use quantum::{build_quantum_cbox, PureState, TwoOutcomeMeasurement};
