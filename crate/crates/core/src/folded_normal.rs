//! Folded normal kernel with unit scale.
//!
//! If `X ~ N(mu, 1)` then `|X|` has density `φ(z − mu) + φ(z + mu)` on
//! `z ≥ 0`. All interval masses go through the survival function so that
//! probabilities deep in the upper tail keep their relative precision.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::normal;
use crate::observations::p_to_z;

/// A mixture component: a folded normal with mean `mu ≥ 0` and unit scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Component(f64);

impl Component {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(domain(format!("component mean {mu} must be finite and nonnegative")));
        }
        Ok(Component(mu))
    }

    pub fn mu(self) -> f64 {
        self.0
    }
}

/// Support `[a, b]` of the truncated model; `b` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationWindow {
    pub a: f64,
    #[serde(with = "crate::serde_util::upper_bound")]
    pub b: f64,
}

impl TruncationWindow {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && a < b) || a.is_infinite() || b.is_nan() {
            return Err(domain(format!("invalid truncation window [{a}, {b}]")));
        }
        Ok(TruncationWindow { a, b })
    }

    /// Window starting at the two-sided critical z for `alpha`.
    pub fn from_alpha(alpha: f64, upper: Option<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain(format!("alpha {alpha} outside (0, 1)")));
        }
        Self::new(p_to_z(alpha, true)?, upper.unwrap_or(f64::INFINITY))
    }

    pub fn contains(&self, z: f64) -> bool {
        self.a <= z && z <= self.b
    }
}

fn check_z(z: f64) -> Result<()> {
    if z >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("z = {z} is negative or NaN")))
    }
}

fn check_mu(mu: f64) -> Result<()> {
    Component::new(mu).map(|_| ())
}

pub fn folded_pdf(z: f64, mu: f64) -> Result<f64> {
    check_z(z)?;
    check_mu(mu)?;
    Ok(normal::pdf(z - mu) + normal::pdf(z + mu))
}

pub fn folded_cdf(z: f64, mu: f64) -> Result<f64> {
    check_z(z)?;
    check_mu(mu)?;
    if z.is_infinite() {
        return Ok(1.0);
    }
    Ok((normal::cdf(z - mu) - normal::cdf(-z - mu)).clamp(0.0, 1.0))
}

/// `P(|X| > z)`, accurate in the upper tail.
pub fn folded_sf(z: f64, mu: f64) -> f64 {
    if z.is_infinite() {
        return 0.0;
    }
    normal::sf(z - mu) + normal::sf(z + mu)
}

/// Log density, finite for any finite `z` and `mu`.
pub(crate) fn ln_folded_pdf(z: f64, mu: f64) -> f64 {
    normal::ln_pdf(z - mu) + (-2.0 * z * mu).exp().ln_1p()
}

/// Two-sided rejection probability of a z-test with noncentrality `mu`.
pub fn power(mu: f64, alpha: f64) -> Result<f64> {
    check_mu(mu)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha {alpha} outside (0, 1)")));
    }
    let crit = p_to_z(alpha, true)?;
    Ok(folded_sf(crit, mu))
}

/// Probability that the truncated folded normal falls in `[lo, hi]`.
///
/// For a degenerate interval `lo == hi` this is the truncated density at
/// `lo`, not a probability.
pub fn truncated_interval_prob(window: &TruncationWindow, lo: f64, hi: f64, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let (l, h) = intersect(window, lo, hi)?;
    let mass = folded_sf(window.a, mu) - folded_sf(window.b, mu);
    if lo == hi {
        return Ok(folded_pdf(l, mu)? / mass);
    }
    Ok(((folded_sf(l, mu) - folded_sf(h, mu)) / mass).clamp(0.0, 1.0))
}

fn intersect(window: &TruncationWindow, lo: f64, hi: f64) -> Result<(f64, f64)> {
    if !(lo >= 0.0 && lo <= hi) {
        return Err(domain(format!("invalid censoring interval [{lo}, {hi}]")));
    }
    let l = lo.max(window.a);
    let h = hi.min(window.b);
    if l > h || (l == h && lo != hi) {
        return Err(domain(format!(
            "interval [{lo}, {hi}] does not intersect window [{}, {}]",
            window.a, window.b
        )));
    }
    Ok((l, h))
}

/// Log of the likelihood contribution of one observation under one
/// component: log truncated density for exact observations, log truncated
/// interval probability otherwise. Always finite.
pub(crate) fn ln_truncated_term(window: &TruncationWindow, lo: f64, hi: f64, mu: f64) -> Result<f64> {
    let (l, h) = intersect(window, lo, hi)?;
    let ln_mass = (folded_sf(window.a, mu) - folded_sf(window.b, mu)).ln();
    let ln_num = if lo == hi {
        ln_folded_pdf(l, mu)
    } else {
        let diff = folded_sf(l, mu) - folded_sf(h, mu);
        if diff > 0.0 {
            diff.ln()
        } else if h.is_finite() {
            // underflow: density at the midpoint times the width
            ln_folded_pdf(0.5 * (l + h), mu) + (h - l).ln()
        } else {
            // underflow in the right tail: Mills-ratio asymptote
            ln_folded_pdf(l, mu) - (l - mu).max(1.0).ln()
        }
    };
    Ok((ln_num - ln_mass).max(LN_FLOOR))
}

pub(crate) const LN_FLOOR: f64 = -1.0e4;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Z_05: f64 = 1.959_963_984_540_054;

    /// Adaptive Simpson quadrature, independent of the CDF route.
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
    }

    #[test]
    fn pdf_examples() {
        assert!((folded_pdf(0.0, 0.0).unwrap() - 0.797_884_560_802_865_4).abs() < 1e-15);
        assert!((folded_pdf(3.0, 3.0).unwrap() - 0.398_942_286_477_315_5).abs() < 1e-15);
        assert!(folded_pdf(-0.1, 0.0).is_err());
        assert!(folded_pdf(1.0, -1.0).is_err());
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(folded_cdf(0.0, 2.0).unwrap(), 0.0);
        assert_eq!(folded_cdf(f64::INFINITY, 2.0).unwrap(), 1.0);
        assert!((folded_cdf(Z_05, 0.0).unwrap() - 0.95).abs() < 1e-12);
        assert!(folded_cdf(-1.0, 0.0).is_err());
    }

    #[test]
    fn power_examples() {
        assert!((power(0.0, 0.05).unwrap() - 0.05).abs() < 1e-14);
        assert!((power(Z_05, 0.05).unwrap() - 0.500_044_287_719_160_7).abs() < 1e-12);
        assert!((power(3.0, 0.05).unwrap() - 0.850_838_768_327_056_1).abs() < 1e-12);
        assert!(power(6.0, 0.05).unwrap() >= 0.9999);
        assert!(power(1.0, 1.0).is_err());
    }

    #[test]
    fn interval_prob_examples() {
        let w = TruncationWindow::new(Z_05, f64::INFINITY).unwrap();
        assert!((truncated_interval_prob(&w, Z_05, f64::INFINITY, 2.0).unwrap() - 1.0).abs() < 1e-15);
        // p in [0.015, 0.025] carries 0.01 of the 0.05 null mass above z_crit
        let p = truncated_interval_prob(&w, 2.241_402_727_604_945, 2.432_379_058_584_447, 0.0).unwrap();
        assert!((p - 0.2).abs() < 1e-12, "{p}");
        assert!(truncated_interval_prob(&w, 0.5, 1.5, 0.0).is_err());
    }

    #[test]
    fn degenerate_interval_returns_truncated_density() {
        let w = TruncationWindow::new(Z_05, f64::INFINITY).unwrap();
        let d = truncated_interval_prob(&w, Z_05, Z_05, 0.0).unwrap();
        assert!((d - folded_pdf(Z_05, 0.0).unwrap() / 0.05).abs() < 1e-12);
    }

    #[test]
    fn finite_upper_truncation() {
        let w = TruncationWindow::new(Z_05, 6.0).unwrap();
        assert!((truncated_interval_prob(&w, 3.0, 10.0, 1.0).unwrap()
            - truncated_interval_prob(&w, 3.0, 6.0, 1.0).unwrap())
        .abs()
            < 1e-15);
        assert!(truncated_interval_prob(&w, 6.5, 7.0, 1.0).is_err());
    }

    #[test]
    fn window_validation() {
        assert!(TruncationWindow::new(2.0, 2.0).is_err());
        assert!(TruncationWindow::new(-1.0, 2.0).is_err());
        assert!(TruncationWindow::from_alpha(0.0, None).is_err());
        let w = TruncationWindow::from_alpha(0.05, Some(6.0)).unwrap();
        assert!((w.a - Z_05).abs() < 1e-12 && w.b == 6.0);
    }

    #[test]
    fn normalization_by_quadrature() {
        for mu in 0..=6 {
            let mu = mu as f64;
            let total = simpson(&|z| folded_pdf(z, mu).unwrap(), 0.0, 40.0, 1e-12);
            assert!((total - 1.0).abs() < 1e-8, "mu = {mu}: {total}");
        }
    }

    #[test]
    fn log_terms_are_finite_far_from_the_data() {
        let w = TruncationWindow::new(Z_05, f64::INFINITY).unwrap();
        for (lo, hi) in [(2.0, 2.0), (30.0, 30.0), (37.0, f64::INFINITY), (39.0, f64::INFINITY), (30.0, 30.5)] {
            for mu in [0.0, 6.0] {
                let v = ln_truncated_term(&w, lo, hi, mu).unwrap();
                assert!(v.is_finite(), "[{lo}, {hi}] mu {mu}: {v}");
            }
        }
    }

    proptest! {
        #[test]
        fn cdf_consistent_with_pdf(z in 0.01f64..8.0, mu in 0.0f64..6.0) {
            let h = 1e-5;
            let fd = (folded_cdf(z + h, mu).unwrap() - folded_cdf(z - h, mu).unwrap()) / (2.0 * h);
            prop_assert!((fd - folded_pdf(z, mu).unwrap()).abs() < 1e-6);
        }

        #[test]
        fn cdf_nondecreasing(z in 0.0f64..10.0, dz in 0.0f64..1.0, mu in 0.0f64..6.0) {
            prop_assert!(folded_cdf(z + dz, mu).unwrap() >= folded_cdf(z, mu).unwrap());
        }

        #[test]
        fn power_increasing(mu in 0.0f64..8.0, dmu in 0.001f64..1.0) {
            prop_assert!(power(mu + dmu, 0.05).unwrap() > power(mu, 0.05).unwrap()
                || power(mu, 0.05).unwrap() == 1.0);
        }

        #[test]
        fn interval_prob_additive(lo in 1.96f64..6.0, w1 in 0.01f64..1.0, w2 in 0.01f64..1.0, mu in 0.0f64..6.0) {
            let win = TruncationWindow::new(Z_05, f64::INFINITY).unwrap();
            let mid = lo + w1;
            let hi = mid + w2;
            let left = truncated_interval_prob(&win, lo, mid, mu).unwrap();
            let right = truncated_interval_prob(&win, mid, hi, mu).unwrap();
            let whole = truncated_interval_prob(&win, lo, hi, mu).unwrap();
            prop_assert!((left + right - whole).abs() < 1e-10);
        }

        #[test]
        fn interval_prob_matches_quadrature(lo in 1.96f64..8.0, width in 0.001f64..3.0, mu in 0.0f64..6.0) {
            let win = TruncationWindow::new(Z_05, f64::INFINITY).unwrap();
            let hi = lo + width;
            let mass = simpson(&|z| folded_pdf(z, mu).unwrap(), Z_05, 40.0, 1e-13);
            let num = simpson(&|z| folded_pdf(z, mu).unwrap(), lo, hi, 1e-13);
            let got = truncated_interval_prob(&win, lo, hi, mu).unwrap();
            prop_assert!((got - num / mass).abs() < 1e-8, "got {} want {}", got, num / mass);
        }
    }
}
