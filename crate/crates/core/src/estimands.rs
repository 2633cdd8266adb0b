//! Quantities derived from a fitted model: expected discovery rate,
//! Soric's false discovery risk, expected replication rate, observed
//! discovery rate and the alpha search built on them.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fit::{fit, FitConfig, ZCurveModel};
use crate::observations::ZObservation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimandSet {
    pub edr: f64,
    pub fdr: f64,
    pub err: f64,
    pub odr: Option<f64>,
    pub alpha: f64,
    /// `odr − edr`.
    pub selection_bias_index: Option<f64>,
    /// `odr / edr`.
    pub selection_bias_ratio: Option<f64>,
}

/// Soric's bound before clamping.
pub fn soric_fdr_unclamped(discovery_rate: f64, alpha: f64) -> Result<f64> {
    if !(discovery_rate > 0.0 && discovery_rate <= 1.0) {
        return Err(domain(format!("discovery rate {discovery_rate} outside (0, 1]")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha {alpha} outside (0, 1)")));
    }
    Ok(((1.0 - discovery_rate) * alpha) / (discovery_rate * (1.0 - alpha)))
}

/// Maximum false discovery rate compatible with a discovery rate.
pub fn soric_fdr(discovery_rate: f64, alpha: f64) -> Result<f64> {
    Ok(soric_fdr_unclamped(discovery_rate, alpha)?.clamp(0.0, 1.0))
}

/// Expected discovery rate before selection: the harmonic mean of the
/// component powers under the fitted (post-selection) weights.
pub fn edr(model: &ZCurveModel) -> f64 {
    edr_with_tail(model, 0.0)
}

/// [`edr`] when a share `tail` of the significant results lies above the
/// upper truncation point and is taken to have power 1.
pub fn edr_with_tail(model: &ZCurveModel, tail: f64) -> f64 {
    let inverse: f64 = model
        .weights
        .iter()
        .zip(model.component_powers())
        .map(|(w, p)| w / p)
        .sum();
    1.0 / ((1.0 - tail) * inverse + tail)
}

/// Expected replication rate: mean power of the significant results.
pub fn err(model: &ZCurveModel) -> f64 {
    err_with_tail(model, 0.0)
}

pub fn err_with_tail(model: &ZCurveModel, tail: f64) -> f64 {
    let mean: f64 = model
        .weights
        .iter()
        .zip(model.component_powers())
        .map(|(w, p)| w * p)
        .sum();
    (1.0 - tail) * mean + tail
}

pub fn odr(n_significant: usize, n_total: usize) -> Result<f64> {
    if n_total == 0 {
        return Err(domain("observed discovery rate needs at least one result"));
    }
    if n_significant > n_total {
        return Err(domain("more significant results than results"));
    }
    Ok(n_significant as f64 / n_total as f64)
}

/// Discovery rate implied by a share of true hypotheses tested at a given power.
pub fn theoretical_discovery_rate(prior_true: f64, power_true: f64, alpha: f64) -> Result<f64> {
    for (name, v) in [("prior", prior_true), ("power", power_true), ("alpha", alpha)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(domain(format!("{name} {v} outside [0, 1]")));
        }
    }
    Ok(prior_true * power_true + (1.0 - prior_true) * alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationDecomposition {
    /// Power of exact replications of true discoveries.
    pub power_true_replications: f64,
    /// Probability that a replication of a false discovery is significant again.
    pub p_false_positive_replicates: f64,
}

/// Splits the expected replication rate into its true- and false-discovery
/// parts using `err = (1 − fdr)·power_true + fdr·alpha`.
pub fn replication_decomposition(err: f64, fdr: f64, alpha: f64) -> Result<ReplicationDecomposition> {
    if !(0.0..1.0).contains(&fdr) {
        return Err(domain(format!("fdr {fdr} must lie in [0, 1)")));
    }
    if !(0.0..=1.0).contains(&err) || !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("err must lie in [0, 1] and alpha in (0, 1)"));
    }
    let p_fp = fdr * alpha;
    let power_true = (err - p_fp) / (1.0 - fdr);
    if !(0.0..=1.0).contains(&power_true) {
        return Err(Error::Inconsistent(format!(
            "err {err}, fdr {fdr} and alpha {alpha} imply a true-discovery power of {power_true}"
        )));
    }
    Ok(ReplicationDecomposition {
        power_true_replications: power_true,
        p_false_positive_replicates: p_fp,
    })
}

/// Full estimand set for a fitted model. Also returns the unclamped FDR.
pub fn estimand_set(model: &ZCurveModel, tail: f64, odr: Option<f64>) -> Result<(EstimandSet, f64)> {
    let edr = edr_with_tail(model, tail);
    let err = err_with_tail(model, tail);
    let raw = soric_fdr_unclamped(edr, model.alpha_fit)?;
    Ok((
        EstimandSet {
            edr,
            fdr: raw.clamp(0.0, 1.0),
            err,
            odr,
            alpha: model.alpha_fit,
            selection_bias_index: odr.map(|o| o - edr),
            selection_bias_ratio: odr.map(|o| o / edr),
        },
        raw,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AlphaRow {
    Fitted { alpha: f64, edr: f64, fdr: f64, n_used: usize },
    InsufficientData { alpha: f64, n_used: usize },
}

impl AlphaRow {
    pub fn alpha(&self) -> f64 {
        match *self {
            AlphaRow::Fitted { alpha, .. } | AlphaRow::InsufficientData { alpha, .. } => alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaAdjustment {
    pub target_fdr: f64,
    pub alpha_star: Option<f64>,
    pub per_alpha: Vec<AlphaRow>,
}

/// Refits the model at every alpha in a descending grid and returns the
/// largest alpha whose false discovery risk is at most `target_fdr`.
pub fn adjust_alpha(obs: &[ZObservation], target_fdr: f64, alpha_grid: &[f64], config: &FitConfig) -> Result<AlphaAdjustment> {
    if alpha_grid.is_empty() {
        return Err(domain("alpha grid is empty"));
    }
    if alpha_grid.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(domain("every grid alpha must lie in (0, 1)"));
    }
    if alpha_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(domain("alpha grid must be sorted in descending order"));
    }
    if !(0.0..=1.0).contains(&target_fdr) {
        return Err(domain(format!("target fdr {target_fdr} outside [0, 1]")));
    }
    let mut per_alpha = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        match fit(obs, config, alpha) {
            Ok(res) => per_alpha.push(AlphaRow::Fitted {
                alpha,
                edr: res.estimands.edr,
                fdr: res.estimands.fdr,
                n_used: res.n_used,
            }),
            Err(Error::InsufficientData { got, .. }) => per_alpha.push(AlphaRow::InsufficientData { alpha, n_used: got }),
            Err(e) => return Err(e),
        }
    }
    let alpha_star = per_alpha.iter().find_map(|row| match *row {
        AlphaRow::Fitted { alpha, fdr, .. } if fdr <= target_fdr => Some(alpha),
        _ => None,
    });
    Ok(AlphaAdjustment {
        target_fdr,
        alpha_star,
        per_alpha,
    })
}
