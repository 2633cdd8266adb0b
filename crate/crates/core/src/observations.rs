//! Reported p-values and confidence intervals, and their conversion into
//! censoring intervals on the absolute z scale.
//!
//! An exact report becomes a degenerate interval `[z, z]`. A rounded report
//! `p = v` with `d` printed decimals covers every p in `v ± 5·10^-(d+1)`, and
//! an inequality `p < c` only bounds z from below, giving `[z(c), +inf)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::normal;

pub type GroupKeys = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "style", rename_all = "snake_case")]
pub enum ReportStyle {
    Exact,
    Rounded { decimals: u32 },
    LessThan,
    LessEqual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueReport {
    pub value: f64,
    #[serde(flatten)]
    pub style: ReportStyle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_id: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub group_keys: GroupKeys,
}

impl PValueReport {
    pub fn new(value: f64, style: ReportStyle) -> Result<Self> {
        let report = PValueReport {
            value,
            style,
            source_id: None,
            group_keys: GroupKeys::new(),
        };
        report.validate()?;
        Ok(report)
    }

    pub fn exact(value: f64) -> Result<Self> {
        Self::new(value, ReportStyle::Exact)
    }

    pub fn rounded(value: f64, decimals: u32) -> Result<Self> {
        Self::new(value, ReportStyle::Rounded { decimals })
    }

    pub fn less_than(value: f64) -> Result<Self> {
        Self::new(value, ReportStyle::LessThan)
    }

    pub fn with_source(mut self, source_id: impl Into<String>) -> Self {
        self.source_id = Some(source_id.into());
        self
    }

    pub fn with_groups(mut self, group_keys: GroupKeys) -> Self {
        self.group_keys = group_keys;
        self
    }

    /// Checks the value range and, for rounded reports, that the value
    /// carries no more digits than its declared precision.
    ///
    /// A rounded value of exactly zero is allowed ("p = 0.000").
    pub fn validate(&self) -> Result<()> {
        if !self.value.is_finite() || self.value > 1.0 {
            return Err(domain(format!("p-value {} outside (0, 1]", self.value)));
        }
        match self.style {
            ReportStyle::Rounded { decimals } => {
                if decimals == 0 || decimals > 15 {
                    return Err(domain(format!("unsupported rounding precision {decimals}")));
                }
                if self.value < 0.0 {
                    return Err(domain(format!("p-value {} is negative", self.value)));
                }
                let scaled = self.value * 10f64.powi(decimals as i32);
                if (scaled - scaled.round()).abs() > 1e-6 * scaled.abs().max(1.0) {
                    return Err(domain(format!(
                        "value {} has more than {decimals} decimals",
                        self.value
                    )));
                }
            }
            _ => {
                if self.value <= 0.0 {
                    return Err(domain(format!("p-value {} outside (0, 1]", self.value)));
                }
            }
        }
        Ok(())
    }
}

/// A z-scale observation as a censoring interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZObservation {
    pub lo: f64,
    #[serde(with = "crate::serde_util::upper_bound")]
    pub hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_id: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub group_keys: GroupKeys,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ZObservation {
    pub fn exact(z: f64) -> Self {
        Self::interval(z, z)
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        debug_assert!(0.0 <= lo && lo <= hi, "bad interval [{lo}, {hi}]");
        ZObservation {
            lo,
            hi,
            source_id: None,
            group_keys: GroupKeys::new(),
            note: None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_right_censored(&self) -> bool {
        self.hi.is_infinite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiScale {
    Additive,
    Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceIntervalReport {
    pub estimate: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub scale: CiScale,
}

impl ConfidenceIntervalReport {
    pub fn new(estimate: Option<f64>, lower: f64, upper: f64, level: f64, scale: CiScale) -> Result<Self> {
        let ci = ConfidenceIntervalReport {
            estimate,
            lower,
            upper,
            level,
            scale,
        };
        ci.validate()?;
        Ok(ci)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(domain(format!("confidence level {} outside (0, 1)", self.level)));
        }
        if !(self.lower.is_finite() && self.upper.is_finite()) {
            return Err(domain("non-finite interval bound"));
        }
        if self.lower >= self.upper {
            return Err(domain(format!(
                "interval [{}, {}] has zero or negative width",
                self.lower, self.upper
            )));
        }
        if self.scale == CiScale::Ratio {
            if self.lower <= 0.0 {
                return Err(domain("ratio-scale interval requires a positive lower bound"));
            }
            if matches!(self.estimate, Some(e) if e <= 0.0) {
                return Err(domain("ratio-scale estimate must be positive"));
            }
        }
        Ok(())
    }
}

/// Converts a p-value to an absolute z statistic.
///
/// Two-sided: `Φ⁻¹(1 − p/2)`. One-sided: `Φ⁻¹(1 − p)`, floored at zero since
/// the folded scale has no negative values.
pub fn p_to_z(p: f64, two_sided: bool) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(domain(format!("p-value {p} outside (0, 1]")));
    }
    let z = if two_sided {
        normal::two_sided_critical(p)
    } else {
        normal::isf(p)
    };
    Ok(z.max(0.0))
}

/// Inverse of [`p_to_z`] for the two-sided transform.
pub fn z_to_p(z: f64) -> f64 {
    2.0 * normal::sf(z.abs())
}

pub fn to_z_observation(report: &PValueReport, two_sided: bool) -> Result<ZObservation> {
    report.validate()?;
    let (lo, hi) = match report.style {
        ReportStyle::Exact => {
            let z = p_to_z(report.value, two_sided)?;
            (z, z)
        }
        ReportStyle::Rounded { decimals } => {
            let half_ulp = 5.0 * 10f64.powi(-(decimals as i32 + 1));
            if report.value == 0.0 {
                (p_to_z(half_ulp, two_sided)?, f64::INFINITY)
            } else {
                let p_hi = (report.value + half_ulp).min(1.0);
                let p_lo = report.value - half_ulp;
                (p_to_z(p_hi, two_sided)?, p_to_z(p_lo, two_sided)?)
            }
        }
        ReportStyle::LessThan | ReportStyle::LessEqual => (p_to_z(report.value, two_sided)?, f64::INFINITY),
    };
    Ok(ZObservation {
        lo,
        hi,
        source_id: report.source_id.clone(),
        group_keys: report.group_keys.clone(),
        note: None,
    })
}

/// Converts a confidence interval into an exact z statistic via the standard
/// error implied by its width.
pub fn ci_to_z(ci: &ConfidenceIntervalReport) -> Result<ZObservation> {
    ci.validate()?;
    let (lower, upper, estimate) = match ci.scale {
        CiScale::Additive => (ci.lower, ci.upper, ci.estimate),
        CiScale::Ratio => (ci.lower.ln(), ci.upper.ln(), ci.estimate.map(f64::ln)),
    };
    let crit = normal::two_sided_critical(1.0 - ci.level);
    let se = (upper - lower) / (2.0 * crit);
    if !(se > 0.0 && se.is_finite()) {
        return Err(domain("confidence interval has zero width"));
    }
    let mut obs = match estimate {
        Some(est) => ZObservation::exact(est.abs() / se),
        None => {
            let mut obs = ZObservation::exact((0.5 * (lower + upper)).abs() / se);
            obs.note = Some(match ci.scale {
                CiScale::Additive => "estimate imputed as interval midpoint".into(),
                CiScale::Ratio => "estimate imputed as log-scale interval midpoint".into(),
            });
            obs
        }
    };
    if obs.lo.is_nan() {
        return Err(domain("confidence interval produced NaN z"));
    }
    obs.hi = obs.lo;
    Ok(obs)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SignificanceSplit {
    pub significant: Vec<ZObservation>,
    pub nonsignificant: Vec<ZObservation>,
    pub ambiguous: Vec<ZObservation>,
}

impl SignificanceSplit {
    pub fn total(&self) -> usize {
        self.significant.len() + self.nonsignificant.len() + self.ambiguous.len()
    }
}

/// Partitions observations by whether their whole censoring interval lies
/// at or above the critical z for `alpha`, wholly below it, or straddles it.
pub fn significance_split(obs: &[ZObservation], alpha: f64, two_sided: bool) -> Result<SignificanceSplit> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha {alpha} outside (0, 1)")));
    }
    let z_crit = p_to_z(alpha, two_sided)?;
    let mut split = SignificanceSplit::default();
    for o in obs {
        if o.lo >= z_crit {
            split.significant.push(o.clone());
        } else if o.hi < z_crit {
            split.nonsignificant.push(o.clone());
        } else {
            split.ambiguous.push(o.clone());
        }
    }
    Ok(split)
}
