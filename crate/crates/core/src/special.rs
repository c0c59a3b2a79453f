//! Incomplete gamma functions of integer order.

use crate::error::{Error, Result};

/// `(n)!` as a float; exact for `n ≤ 22`.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Upper incomplete gamma `Γ(n, x) = (n−1)! e^{−x} Σ_{k<n} x^k/k!` for integer `n ≥ 1`.
pub fn upper_incomplete_gamma_int(n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::DomainError("order must be at least 1".into()));
    }
    if !(x >= 0.0) {
        return Err(Error::DomainError(format!("argument {x} must be nonnegative")));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..n {
        term *= x / k as f64;
        sum += term;
    }
    Ok(factorial(n - 1) * (-x).exp() * sum)
}

/// Lower incomplete gamma `γ(n, x) = (n−1)! − Γ(n, x)`, summed without cancellation.
pub fn lower_incomplete_gamma_int(n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::DomainError("order must be at least 1".into()));
    }
    if !(x >= 0.0) {
        return Err(Error::DomainError(format!("argument {x} must be nonnegative")));
    }
    Ok((log_scaled_lower_gamma(n, x) + n as f64 * x.ln()).exp() / n as f64)
}

/// `log[ n·γ(n, y) / y^n ]`, continuous at `y = 0` where it vanishes.
///
/// With `n = N−1` this is the log of `∫dψ e^{y|⟨ψ|χ⟩|²} · e^{−y}` over Haar
/// states in dimension `N`. For `y` below `n + 30` the positive series
/// `e^{−y} Σ_j y^j n!/(j+n)!` is used, otherwise the direct form
/// `n! (1 − Q(n, y)) / y^n`, whose complement `Q` is then small.
pub fn log_scaled_lower_gamma(n: usize, y: f64) -> f64 {
    debug_assert!(n >= 1 && y >= 0.0);
    if y == 0.0 {
        return 0.0;
    }
    if y < n as f64 + 30.0 {
        let mut term = 1.0;
        let mut tail = 0.0;
        let mut j = 0usize;
        loop {
            j += 1;
            term *= y / (j + n) as f64;
            tail += term;
            if term < (1.0 + tail) * 1e-17 {
                break;
            }
        }
        tail.ln_1p() - y
    } else {
        let mut term = 1.0;
        let mut partial = 1.0;
        for k in 1..n {
            term *= y / k as f64;
            partial += term;
        }
        let q = (-y).exp() * partial;
        factorial(n).ln() + (-q).ln_1p() - n as f64 * y.ln()
    }
}
