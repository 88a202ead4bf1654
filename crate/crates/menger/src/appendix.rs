//! Closed-form reference integrals and their numeric cross-checks.
//!
//! Two families of one-dimensional integrals underpin the explicit energy
//! bounds on the three-arm example set:
//!
//! * `integral_ii`: `I(z, y) = \int_0^1 x^2 / (x^2 + z y)^2 dx`, which has
//!   the closed form `(arctan(1/sqrt(zy))/sqrt(zy) - 1/(1 + zy)) / 2`;
//! * `integral_i`: `J_p(z, y) = \int_0^1 x^p / ((x^2+y^2)(x^2+z^2))^{p/2} dx`,
//!   which for `p >= 2` is bounded by `pi / 2^p * (z y)^{-(p-1)/2}` via the
//!   arithmetic-geometric mean inequality.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad::adaptive_integrate;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AppendixError {
    #[error("parameters must be positive and finite, got z = {0}, y = {1}")]
    InvalidParameters(f64, f64),
    #[error("the closed bound needs p >= 2, got {0}")]
    InvalidExponent(f64),
}

fn check_zy(z: f64, y: f64) -> Result<(), AppendixError> {
    if !(z > 0.0 && z.is_finite() && y > 0.0 && y.is_finite()) {
        return Err(AppendixError::InvalidParameters(z, y));
    }
    Ok(())
}

/// Closed form of `\int_0^1 x^2/(x^2 + zy)^2 dx`.
pub fn integral_ii_closed_form(z: f64, y: f64) -> Result<f64, AppendixError> {
    check_zy(z, y)?;
    let s = (z * y).sqrt();
    Ok(0.5 * ((1.0 / s).atan() / s - 1.0 / (1.0 + z * y)))
}

/// Antiderivative `F(x) = (arctan(x/s)/s - x/(x^2 + s^2)) / 2` with
/// `s = sqrt(zy)`; `F(1) - F(0)` is the closed form above and `F' `
/// recovers the integrand, which the derivative-identity test checks.
pub fn integral_ii_antiderivative(x: f64, z: f64, y: f64) -> Result<f64, AppendixError> {
    check_zy(z, y)?;
    let s = (z * y).sqrt();
    Ok(0.5 * ((x / s).atan() / s - x / (x * x + z * y)))
}

/// One closed-form-vs-quadrature comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegralCheck {
    pub z: f64,
    pub y: f64,
    pub closed_form: f64,
    pub quadrature: f64,
    pub quadrature_error: f64,
    pub abs_err: f64,
    pub evaluations: u64,
}

/// Evaluate `\int_0^1 x^2/(x^2+zy)^2 dx` by adaptive quadrature and compare
/// with the closed form.
pub fn integral_ii_check(z: f64, y: f64) -> Result<IntegralCheck, AppendixError> {
    check_zy(z, y)?;
    let zy = z * y;
    let f = move |x: f64| {
        let d = x * x + zy;
        x * x / (d * d)
    };
    let (q, qerr, evals) = adaptive_integrate(&f, 0.0, 1.0, 1e-14, 1e-13, 50);
    let c = integral_ii_closed_form(z, y)?;
    Ok(IntegralCheck {
        z,
        y,
        closed_form: c,
        quadrature: q,
        quadrature_error: qerr,
        abs_err: (q - c).abs(),
        evaluations: evals,
    })
}

/// One bound check for the `p`-weighted integral.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCheck {
    pub z: f64,
    pub y: f64,
    pub p: f64,
    pub quadrature: f64,
    pub quadrature_error: f64,
    pub bound: f64,
    pub slack: f64,
    pub evaluations: u64,
}

/// The closed upper bound `pi/2^p * (zy)^{-(p-1)/2}` for
/// `\int_0^1 x^p/((x^2+y^2)(x^2+z^2))^{p/2} dx`, valid for `p >= 2`.
pub fn integral_i_bound(z: f64, y: f64, p: f64) -> Result<f64, AppendixError> {
    check_zy(z, y)?;
    if !(p >= 2.0) {
        return Err(AppendixError::InvalidExponent(p));
    }
    Ok(std::f64::consts::PI / 2f64.powf(p) * (z * y).powf(-(p - 1.0) / 2.0))
}

/// Quadrature of the `p`-weighted integral compared against its closed
/// upper bound; `slack = bound - quadrature` should be nonnegative up to the
/// quadrature error.
pub fn integral_i_check(z: f64, y: f64, p: f64) -> Result<BoundCheck, AppendixError> {
    let bound = integral_i_bound(z, y, p)?;
    let f = move |x: f64| {
        let a = x * x + y * y;
        let b = x * x + z * z;
        x.powf(p) * (a * b).powf(-p / 2.0)
    };
    let (q, qerr, evals) = adaptive_integrate(&f, 0.0, 1.0, 1e-14, 1e-12, 50);
    Ok(BoundCheck {
        z,
        y,
        p,
        quadrature: q,
        quadrature_error: qerr,
        bound,
        slack: bound - q,
        evaluations: evals,
    })
}

/// Pointwise inequality behind the `integral_i` bound:
/// `(x^2+y^2)(x^2+z^2) >= (x^2 + yz)^2`, a Cauchy-Schwarz instance.
/// Returns `(lhs, rhs) = ((x^2+y^2)(x^2+z^2), (x^2+yz)^2)` so tests can
/// assert `lhs >= rhs` on a grid.
pub fn am_gm_pointwise(x: f64, z: f64, y: f64) -> (f64, f64) {
    let lhs = (x * x + y * y) * (x * x + z * z);
    let r = x * x + y * z;
    (lhs, r * r)
}

/// The grid `{10^-3, ..., 10}` with `n` logarithmically spaced points, used
/// for parameter sweeps.
pub fn log_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let (lo, hi) = (1e-3_f64.ln(), 10.0_f64.ln());
    (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
