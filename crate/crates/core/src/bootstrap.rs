//! Nonparametric percentile bootstrap for the fitted estimands.
//!
//! Each replicate resamples the input observations with replacement and
//! refits. Replicate `r` draws from stream `r` of the seed, so the result is
//! the same however rayon schedules the work.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fit::{fit_prepared, FitConfig, Prepared};
use crate::observations::ZObservation;
use crate::rng::{child_seed, stream_rng};

/// Share of failed replicates above which intervals are flagged unreliable.
pub const MAX_FAILURE_SHARE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub method: String,
    pub level: f64,
    pub replicates: usize,
    pub failures: usize,
    pub unreliable: bool,
    pub seed: u64,
    pub intervals: BTreeMap<String, Interval>,
}

#[derive(Debug, Clone)]
pub struct ReplicateFit {
    pub weights: Vec<f64>,
    pub edr: f64,
    pub fdr: f64,
    pub err: f64,
}

#[derive(Debug, Clone)]
pub struct BootstrapResult {
    pub summary: BootstrapSummary,
    /// Successful replicates in replicate order.
    pub fits: Vec<ReplicateFit>,
}

/// Linear-interpolation quantile of sorted data (type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

pub fn percentile_interval(values: &[f64], level: f64) -> Interval {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Interval {
        lo: quantile_sorted(&v, tail),
        hi: quantile_sorted(&v, 1.0 - tail),
    }
}

/// 95% percentile intervals for EDR, FDR and ERR from `replicates` refits.
pub fn bootstrap(obs: &[ZObservation], config: &FitConfig, alpha_fit: f64, replicates: usize, seed: u64) -> Result<BootstrapResult> {
    if replicates < 2 {
        return Err(domain("bootstrap needs at least 2 replicates"));
    }
    if obs.is_empty() {
        return Err(domain("bootstrap needs observations"));
    }
    let prep = Prepared::new(obs, config, alpha_fit)?;
    let n = obs.len();

    let outcomes: Vec<Option<ReplicateFit>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r as u64);
            let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let (counts, tally) = prep.counts_for(&indices);
            let replicate_config = FitConfig {
                seed: child_seed(seed, r as u64),
                ..config.clone()
            };
            fit_prepared(&prep, &counts, tally, &replicate_config)
                .ok()
                .map(|res| ReplicateFit {
                    weights: res.model.weights,
                    edr: res.estimands.edr,
                    fdr: res.estimands.fdr,
                    err: res.estimands.err,
                })
        })
        .collect();

    let fits: Vec<ReplicateFit> = outcomes.into_iter().flatten().collect();
    let failures = replicates - fits.len();
    let level = 0.95;
    let mut intervals = BTreeMap::new();
    if !fits.is_empty() {
        let pick = |f: fn(&ReplicateFit) -> f64| fits.iter().map(f).collect::<Vec<_>>();
        intervals.insert("edr".to_string(), percentile_interval(&pick(|f| f.edr), level));
        intervals.insert("fdr".to_string(), percentile_interval(&pick(|f| f.fdr), level));
        intervals.insert("err".to_string(), percentile_interval(&pick(|f| f.err), level));
    }
    Ok(BootstrapResult {
        summary: BootstrapSummary {
            method: "percentile".into(),
            level,
            replicates,
            failures,
            unreliable: failures as f64 > MAX_FAILURE_SHARE * replicates as f64,
            seed,
            intervals,
        },
        fits,
    })
}
