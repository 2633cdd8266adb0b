//! Standard normal density, distribution and quantile functions.
//!
//! Tail probabilities are always evaluated through `erfc` so that upper
//! tails keep full relative precision far from the mode.

use libm::erfc;
use std::f64::consts::{FRAC_2_SQRT_PI, SQRT_2};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal density.
#[inline]
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub fn ln_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard normal CDF, `P(X <= x)`.
#[inline]
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Upper tail `P(X > x)`.
#[inline]
pub fn sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Inverse of `erfc` on `(0, 2)`: a rational starting point polished with
/// Newton steps against `erfc` itself, so quantiles and CDF agree to
/// rounding.
fn erfc_inv(y: f64) -> f64 {
    if y <= 0.0 {
        return f64::INFINITY;
    }
    if y >= 2.0 {
        return f64::NEG_INFINITY;
    }
    let mut x = statrs::function::erf::erfc_inv(y);
    for _ in 0..3 {
        let slope = -FRAC_2_SQRT_PI * (-x * x).exp();
        if slope == 0.0 {
            break;
        }
        let step = (erfc(x) - y) / slope;
        x -= step;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    x
}

/// Quantile of the upper tail: the `x` with `sf(x) = q`.
///
/// `q` must lie in `[0, 1]`; the endpoints map to `+inf` and `-inf`.
pub fn isf(q: f64) -> f64 {
    if q <= 0.0 {
        f64::INFINITY
    } else if q >= 1.0 {
        f64::NEG_INFINITY
    } else {
        SQRT_2 * erfc_inv(2.0 * q)
    }
}

/// Quantile function, `Φ⁻¹(p)`.
pub fn ppf(p: f64) -> f64 {
    -isf(p)
}

/// `Φ⁻¹(1 − p/2)` computed without forming `1 − p/2`.
pub(crate) fn two_sided_critical(p: f64) -> f64 {
    if p >= 2.0 {
        return f64::NEG_INFINITY;
    }
    SQRT_2 * erfc_inv(p)
}
