//! Inputs shared by the benchmarks.

use fdrisk_core::rng::stream_rng;
use fdrisk_core::simulation::sample_significant_p;
use fdrisk_core::{p_to_z, PowerDistribution, ZObservation};

/// `n` exact significant z-values from the default power distribution with
/// a fifth of them from true nulls.
pub fn significant_z(n: usize, seed: u64) -> Vec<ZObservation> {
    let p = sample_significant_p(0.2, n, &PowerDistribution::default(), 0.05, &mut stream_rng(seed, 0))
        .expect("valid simulation settings");
    p.into_iter()
        .map(|p| ZObservation::exact(p_to_z(p, true).expect("p in (0, 1)")))
        .collect()
}

/// Abstract-like text with a mix of p-value and interval notations.
pub fn abstract_text(sentences: usize) -> String {
    const PARTS: [&str; 6] = [
        "Mortality was lower with treatment (hazard ratio, 0.82; 95% CI, 0.70 to 0.96; P=0.01).",
        "The primary end point did not differ between groups (P = .38).",
        "Relapse occurred in 12% vs 19% of patients (p<0.001).",
        "Adverse events were similar in both arms.",
        "The odds of response doubled (OR 2.1, 95% CI 1.4-3.2).",
        "Benefit persisted at one year (p = 3.2 x 10^-5).",
    ];
    (0..sentences).map(|i| PARTS[i % PARTS.len()]).collect::<Vec<_>>().join(" ")
}
