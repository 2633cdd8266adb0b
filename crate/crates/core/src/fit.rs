//! Censored z-curve: a mixture of truncated folded normals with fixed
//! component means, fitted to significant z statistics by EM over the
//! mixture weights.
//!
//! Because the means never move, every per-observation component
//! likelihood is computed once up front. EM then only rescales a fixed
//! matrix, which also makes bootstrap refits cheap: a resample is just a
//! vector of row multiplicities.

use std::cmp::Ordering;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::bootstrap::BootstrapSummary;
use crate::error::{domain, Error, Result};
use crate::estimands::{self, EstimandSet};
use crate::folded_normal::{self, ln_truncated_term, TruncationWindow};
use crate::observations::ZObservation;
use crate::rng::stream_rng;

pub const DEFAULT_MEANS: [f64; 7] = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];

/// Smallest number of in-window observations a fit will accept.
pub const MIN_OBSERVATIONS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZCurveModel {
    pub means: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha_fit: f64,
    pub window: TruncationWindow,
}

impl ZCurveModel {
    pub fn new(means: Vec<f64>, weights: Vec<f64>, alpha_fit: f64, upper: Option<f64>) -> Result<Self> {
        validate_means(&means)?;
        if weights.len() != means.len() {
            return Err(domain("weights and means differ in length"));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(domain("mixture weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(domain(format!("mixture weights sum to {total}, not 1")));
        }
        let window = TruncationWindow::from_alpha(alpha_fit, upper)?;
        Ok(ZCurveModel {
            means,
            weights,
            alpha_fit,
            window,
        })
    }

    /// Power of each component at the fitting alpha.
    pub fn component_powers(&self) -> Vec<f64> {
        self.means
            .iter()
            .map(|&mu| folded_normal::power(mu, self.alpha_fit).expect("validated model"))
            .collect()
    }

    /// Mixture density of the truncated model at `z`; zero outside the window.
    pub fn density(&self, z: f64) -> f64 {
        if !(z >= self.window.a && z <= self.window.b) {
            return 0.0;
        }
        self.means
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&mu, &w)| {
                let mass = folded_normal::folded_sf(self.window.a, mu) - folded_normal::folded_sf(self.window.b, mu);
                w * folded_normal::folded_pdf(z, mu).unwrap_or(0.0) / mass
            })
            .sum()
    }
}

fn validate_means(means: &[f64]) -> Result<()> {
    if means.is_empty() {
        return Err(domain("at least one component mean is required"));
    }
    if means[0] != 0.0 {
        return Err(domain("the first component mean must be 0"));
    }
    if means.windows(2).any(|w| !(w[1] > w[0])) || means.iter().any(|m| !m.is_finite()) {
        return Err(domain("component means must be finite and strictly increasing"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub max_iterations: usize,
    /// Absolute change in log-likelihood that ends EM.
    pub tolerance: f64,
    /// Number of EM starts; the first is uniform, the rest Dirichlet(1).
    pub restarts: usize,
    pub seed: u64,
    pub means: Vec<f64>,
    /// Upper truncation point `b`; `None` is `+inf`.
    pub upper_truncation: Option<f64>,
    pub two_sided: bool,
    pub ambiguous: AmbiguousPolicy,
}

/// Treatment of observations whose interval straddles the critical z.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbiguousPolicy {
    /// Leave them out of the likelihood; they still count for the observed
    /// discovery rate.
    #[default]
    Exclude,
    /// Treat them as significant and fit the part of the interval above
    /// the critical z. Appropriate when every input is known to be
    /// significant, as in simulated selections.
    Clip,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iterations: 10_000,
            tolerance: 1e-6,
            restarts: 1,
            seed: 0,
            means: DEFAULT_MEANS.to_vec(),
            upper_truncation: None,
            two_sided: true,
            ambiguous: AmbiguousPolicy::Exclude,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.restarts == 0 {
            return Err(domain("max_iterations and restarts must be positive"));
        }
        if !(self.tolerance > 0.0) {
            return Err(domain("tolerance must be positive"));
        }
        validate_means(&self.means)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    /// Observations whose interval lies wholly above `b`.
    pub n_above_upper: usize,
    pub n_nonsignificant: usize,
    pub n_ambiguous: usize,
    pub n_total: usize,
    /// Soric transform before clamping to `[0, 1]`.
    pub fdr_unclamped: f64,
    pub messages: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: ZCurveModel,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub n_used: usize,
    pub n_excluded: usize,
    pub estimands: EstimandSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapSummary>,
    pub diagnostics: FitDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ObsClass {
    Used(usize),
    AboveUpper,
    Nonsignificant,
    Ambiguous,
}

/// Observations classified against the fitting window, with the
/// per-component likelihood of every distinct in-window interval.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    pub window: TruncationWindow,
    pub means: Vec<f64>,
    pub alpha: f64,
    pub classes: Vec<ObsClass>,
    /// Distinct in-window intervals in ascending order.
    pub rows: Vec<(f64, f64)>,
    pub counts: Vec<f64>,
    /// `exp(ln L_ij - offset_i)`, row-major.
    pub scaled: Vec<f64>,
    pub offsets: Vec<f64>,
}

impl Prepared {
    pub fn new(obs: &[ZObservation], config: &FitConfig, alpha: f64) -> Result<Self> {
        config.validate()?;
        let window = TruncationWindow::from_alpha(alpha, config.upper_truncation)?;
        let z_crit = window.a;
        let clip = config.ambiguous == AmbiguousPolicy::Clip;
        let key_of = |o: &ZObservation| if clip { (o.lo.max(z_crit), o.hi) } else { (o.lo, o.hi) };
        let mut keyed: Vec<(f64, f64)> = Vec::new();
        let mut classes = Vec::with_capacity(obs.len());
        for o in obs {
            if !(o.lo >= 0.0 && o.lo <= o.hi) {
                return Err(domain(format!("invalid censoring interval [{}, {}]", o.lo, o.hi)));
            }
            let class = if o.lo >= z_crit || (clip && o.hi >= z_crit) {
                if o.lo > window.b || (o.lo == window.b && o.hi > o.lo) {
                    ObsClass::AboveUpper
                } else {
                    keyed.push(key_of(o));
                    ObsClass::Used(usize::MAX)
                }
            } else if o.hi < z_crit {
                ObsClass::Nonsignificant
            } else {
                ObsClass::Ambiguous
            };
            classes.push(class);
        }

        let cmp = |a: &(f64, f64), b: &(f64, f64)| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1));
        let mut rows = keyed.clone();
        rows.sort_by(cmp);
        rows.dedup();
        let mut counts = vec![0.0; rows.len()];
        for class_slot in classes.iter_mut().zip(obs) {
            if let (ObsClass::Used(slot), o) = class_slot {
                let key = key_of(o);
                let idx = rows.binary_search_by(|r| cmp(r, &key)).expect("row present");
                *slot = idx;
                counts[idx] += 1.0;
            }
        }

        let j = config.means.len();
        let mut scaled = vec![0.0; rows.len() * j];
        let mut offsets = vec![0.0; rows.len()];
        let mut ln_row = vec![0.0; j];
        for (i, &(lo, hi)) in rows.iter().enumerate() {
            for (k, &mu) in config.means.iter().enumerate() {
                ln_row[k] = ln_truncated_term(&window, lo, hi, mu)?;
            }
            let max = ln_row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            offsets[i] = max;
            for k in 0..j {
                scaled[i * j + k] = (ln_row[k] - max).exp();
            }
        }

        Ok(Prepared {
            window,
            means: config.means.clone(),
            alpha,
            classes,
            rows,
            counts,
            scaled,
            offsets,
        })
    }

    pub fn n_components(&self) -> usize {
        self.means.len()
    }

    /// Multiplicity of each distinct row for a resample given as input indices.
    pub fn counts_for(&self, indices: &[usize]) -> (Vec<f64>, Tally) {
        let mut counts = vec![0.0; self.rows.len()];
        let mut tally = Tally::default();
        for &i in indices {
            tally.add(self.classes[i]);
            if let ObsClass::Used(r) = self.classes[i] {
                counts[r] += 1.0;
            }
        }
        (counts, tally)
    }

    pub fn tally(&self) -> Tally {
        let mut tally = Tally::default();
        for &c in &self.classes {
            tally.add(c);
        }
        tally
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Tally {
    pub used: usize,
    pub above: usize,
    pub nonsignificant: usize,
    pub ambiguous: usize,
}

impl Tally {
    fn add(&mut self, class: ObsClass) {
        match class {
            ObsClass::Used(_) => self.used += 1,
            ObsClass::AboveUpper => self.above += 1,
            ObsClass::Nonsignificant => self.nonsignificant += 1,
            ObsClass::Ambiguous => self.ambiguous += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.used + self.above + self.nonsignificant + self.ambiguous
    }

    pub fn significant(&self) -> usize {
        self.used + self.above
    }

    pub fn above_share(&self) -> f64 {
        if self.significant() == 0 {
            0.0
        } else {
            self.above as f64 / self.significant() as f64
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct EmOutcome {
    pub weights: Vec<f64>,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Weighted EM over mixture weights on a prepared likelihood matrix.
pub(crate) fn run_em(prep: &Prepared, counts: &[f64], init: Vec<f64>, config: &FitConfig) -> EmOutcome {
    let j = prep.n_components();
    let n: f64 = counts.iter().sum();
    let mut weights = init;
    let mut next = vec![0.0; j];
    let mut prev_ll = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iterations {
        iterations += 1;
        next.iter_mut().for_each(|x| *x = 0.0);
        let mut ll = 0.0;
        for (i, &c) in counts.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let row = &prep.scaled[i * j..(i + 1) * j];
            let s: f64 = row.iter().zip(&weights).map(|(l, w)| l * w).sum();
            ll += c * (s.ln() + prep.offsets[i]);
            let scale = c / s;
            for k in 0..j {
                next[k] += scale * weights[k] * row[k];
            }
        }
        debug_assert!(
            ll >= prev_ll - 1e-9 * (1.0 + ll.abs()),
            "EM decreased the log-likelihood: {prev_ll} -> {ll}"
        );
        let total: f64 = next.iter().sum();
        for k in 0..j {
            weights[k] = next[k] / total;
        }
        debug_assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        debug_assert!(total > 0.0 && (total - n).abs() <= 1e-6 * n.max(1.0));
        if (ll - prev_ll).abs() < config.tolerance {
            converged = true;
            prev_ll = ll;
            break;
        }
        prev_ll = ll;
    }

    let log_likelihood = if converged {
        prev_ll
    } else {
        weighted_ll(prep, counts, &weights)
    };
    EmOutcome {
        weights,
        log_likelihood,
        iterations,
        converged,
    }
}

fn weighted_ll(prep: &Prepared, counts: &[f64], weights: &[f64]) -> f64 {
    let j = prep.n_components();
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0.0)
        .map(|(i, &c)| {
            let row = &prep.scaled[i * j..(i + 1) * j];
            let s: f64 = row.iter().zip(weights).map(|(l, w)| l * w).sum();
            c * (s.ln() + prep.offsets[i])
        })
        .sum()
}

/// EM with restarts; the uniform start is always first and ties keep the
/// earlier start.
pub(crate) fn fit_counts(prep: &Prepared, counts: &[f64], config: &FitConfig, seed: u64) -> EmOutcome {
    let j = prep.n_components();
    let mut best: Option<EmOutcome> = None;
    for r in 0..config.restarts {
        let init = if r == 0 {
            vec![1.0 / j as f64; j]
        } else {
            dirichlet_ones(j, &mut stream_rng(seed, r as u64))
        };
        let out = run_em(prep, counts, init, config);
        let better = match &best {
            None => true,
            Some(b) => out.log_likelihood > b.log_likelihood,
        };
        if better {
            best = Some(out);
        }
    }
    best.expect("at least one restart")
}

fn dirichlet_ones<R: Rng>(j: usize, rng: &mut R) -> Vec<f64> {
    let gamma = Gamma::<f64>::new(1.0, 1.0).expect("valid shape");
    let mut w: Vec<f64> = (0..j).map(|_| gamma.sample(rng).max(1e-12_f64)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// True when every used observation is the same non-degenerate interval,
/// so the data cannot separate components.
fn indistinguishable(prep: &Prepared) -> bool {
    prep.rows.len() == 1 && prep.n_components() > 1 && prep.rows[0].0 != prep.rows[0].1
}

/// Fits the censored mixture to the observations significant at `alpha_fit`.
///
/// Non-significant and ambiguous observations are excluded from the
/// likelihood but counted for the observed discovery rate.
pub fn fit(obs: &[ZObservation], config: &FitConfig, alpha_fit: f64) -> Result<FitResult> {
    let prep = Prepared::new(obs, config, alpha_fit)?;
    fit_prepared(&prep, &prep.counts.clone(), prep.tally(), config)
}

pub(crate) fn fit_prepared(prep: &Prepared, counts: &[f64], tally: Tally, config: &FitConfig) -> Result<FitResult> {
    if tally.used < MIN_OBSERVATIONS {
        return Err(Error::InsufficientData {
            needed: MIN_OBSERVATIONS,
            got: tally.used,
        });
    }
    let em = fit_counts(prep, counts, config, config.seed);
    let mut messages = Vec::new();
    let mut converged = em.converged;
    if !em.converged {
        messages.push(format!("EM did not converge within {} iterations", config.max_iterations));
    }
    if indistinguishable(prep) && counts.iter().filter(|&&c| c > 0.0).count() == 1 {
        converged = false;
        messages.push("all observations share one censoring interval; weights are not identified".into());
    }
    if tally.above > 0 {
        messages.push(format!(
            "{} observation(s) above the upper truncation point treated as power 1",
            tally.above
        ));
    }

    let model = ZCurveModel {
        means: prep.means.clone(),
        weights: em.weights,
        alpha_fit: prep.alpha,
        window: prep.window,
    };
    let odr = if tally.total() > 0 {
        Some(tally.significant() as f64 / tally.total() as f64)
    } else {
        None
    };
    let (estimands, fdr_unclamped) = estimands::estimand_set(&model, tally.above_share(), odr)?;
    Ok(FitResult {
        model,
        log_likelihood: em.log_likelihood,
        iterations: em.iterations,
        converged,
        n_used: tally.used,
        n_excluded: tally.nonsignificant + tally.ambiguous + tally.above,
        estimands,
        bootstrap: None,
        diagnostics: FitDiagnostics {
            n_above_upper: tally.above,
            n_nonsignificant: tally.nonsignificant,
            n_ambiguous: tally.ambiguous,
            n_total: tally.total(),
            fdr_unclamped,
            messages,
        },
    })
}

/// Censored mixture log-likelihood of observations inside the model window.
pub fn log_likelihood(model: &ZCurveModel, obs: &[ZObservation]) -> Result<f64> {
    let mut total = 0.0;
    let mut terms = vec![0.0; model.means.len()];
    for o in obs {
        if !(o.lo >= model.window.a && o.lo <= model.window.b) {
            return Err(domain(format!(
                "observation [{}, {}] outside window [{}, {}]",
                o.lo, o.hi, model.window.a, model.window.b
            )));
        }
        for (k, (&mu, &w)) in model.means.iter().zip(&model.weights).enumerate() {
            terms[k] = if w > 0.0 {
                w.ln() + ln_truncated_term(&model.window, o.lo, o.hi, mu)?
            } else {
                f64::NEG_INFINITY
            };
        }
        total += log_sum_exp(&terms);
    }
    Ok(total.max(f64::MIN))
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Mixture density evaluated on a grid of z values.
pub fn density_curve(model: &ZCurveModel, grid: &[f64]) -> Vec<(f64, f64)> {
    grid.iter().map(|&z| (z, model.density(z))).collect()
}

/// Evenly spaced grid over `[from, to]` with `n` points.
pub fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..n)
            .map(|i| from + (to - from) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Pointwise percentile band of the density over bootstrap weight vectors.
pub fn pointwise_bands(model: &ZCurveModel, replicate_weights: &[Vec<f64>], grid: &[f64], level: f64) -> Vec<(f64, f64)> {
    let curves: Vec<Vec<f64>> = replicate_weights
        .iter()
        .map(|w| {
            let m = ZCurveModel {
                weights: w.clone(),
                ..model.clone()
            };
            grid.iter().map(|&z| m.density(z)).collect()
        })
        .collect();
    let tail = (1.0 - level) / 2.0;
    (0..grid.len())
        .map(|g| {
            let mut col: Vec<f64> = curves.iter().map(|c| c[g]).collect();
            col.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
            (
                crate::bootstrap::quantile_sorted(&col, tail),
                crate::bootstrap::quantile_sorted(&col, 1.0 - tail),
            )
        })
        .collect()
}
