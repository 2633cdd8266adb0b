use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdrisk_core::{AmbiguousPolicy, Scenario};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "fdrisk", version, about = "False discovery risk from reported p-values")]
pub struct Cli {
    /// File of `key = value` defaults for long flags
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pull p-values and confidence intervals out of a corpus of abstracts
    Extract(ExtractArgs),
    /// Fit the z-curve per group and report EDR, FDR and ERR
    Fit(FitArgs),
    /// Run a simulation grid over true false discovery rates
    Simulate(SimulateArgs),
    /// Find the largest alpha whose false discovery risk meets a target
    AdjustAlpha(AdjustArgs),
    /// Rerun the command recorded in a manifest
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambiguous {
    #[default]
    Exclude,
    Clip,
}

impl From<Ambiguous> for AmbiguousPolicy {
    fn from(a: Ambiguous) -> Self {
        match a {
            Ambiguous::Exclude => AmbiguousPolicy::Exclude,
            Ambiguous::Clip => AmbiguousPolicy::Clip,
        }
    }
}

/// Settings shared by every command that fits the model.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Significance level; the fit is truncated at its critical z
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Convert p-values with the one-sided quantile
    #[arg(long)]
    pub one_sided: bool,
    /// Upper truncation point on the z scale (default: none)
    #[arg(long, value_name = "Z")]
    pub upper_truncation: Option<f64>,
    /// What to do with rounded p-values straddling alpha
    #[arg(long, value_enum, default_value_t = Ambiguous::Exclude)]
    pub ambiguous: Ambiguous,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl ModelArgs {
    pub fn fit_config(&self) -> fdrisk_core::FitConfig {
        fdrisk_core::FitConfig {
            seed: self.seed,
            upper_truncation: self.upper_truncation,
            two_sided: !self.one_sided,
            ambiguous: self.ambiguous.into(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtractArgs {
    /// Corpus of abstracts (.jsonl, .csv or .tsv)
    pub corpus: PathBuf,
    /// Observation file to write (.jsonl, .csv or .tsv)
    #[arg(long)]
    pub out: PathBuf,
    /// Study types to keep: `ct`, `rct`, `other`, `all` or `none`
    #[arg(long, default_value = "ct,rct")]
    pub types: String,
    /// Keep one randomly chosen statistic per abstract
    #[arg(long)]
    pub one_per_abstract: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Read `p = v` as exact rather than rounded to the printed digits
    #[arg(long)]
    pub exact_equals: bool,
    /// Malformed corpus lines tolerated before failing
    #[arg(long, default_value_t = 0)]
    pub max_errors: usize,
    /// Write the per-journal summary as JSON
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// Observation file (.jsonl, .csv or .tsv)
    pub observations: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Comma-separated group keys; `year-split` splits years at --year-split
    #[arg(long, value_delimiter = ',', value_name = "KEYS")]
    pub group_by: Vec<String>,
    /// Last year of the early period
    #[arg(long, default_value_t = 2010)]
    pub year_split: i32,
    /// Bootstrap replicates per group; 0 skips the intervals
    #[arg(long, default_value_t = 500)]
    pub replicates: usize,
    /// Write all fit results as JSON
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Directory for histogram, fitted curve and band CSVs
    #[arg(long, value_name = "DIR")]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// Reporting scenario: A exact, B rounded, C rounded and capped, D mixed
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Scenario,
    /// Spacing of true false discovery rates in [0, 1]
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Significant results per grid point
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Power distribution of true effects, `beta:SHAPE1,SHAPE2`
    #[arg(long, default_value = "beta:2,5", conflicts_with = "power_file")]
    pub power: String,
    /// Empirical powers, one per line
    #[arg(long, value_name = "FILE")]
    pub power_file: Option<PathBuf>,
    /// Step 0.01 and 10000 results per point unless given explicitly
    #[arg(long)]
    pub full_scale: bool,
    /// Grid results as CSV
    #[arg(long)]
    pub out: PathBuf,
    /// Error summary as JSON
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse::<Scenario>().map_err(|_| "expected A, B, C or D".to_string())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AdjustArgs {
    /// Observation file (.jsonl, .csv or .tsv)
    pub observations: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub target_fdr: f64,
    /// Comma-separated candidate alphas
    #[arg(long, default_value = "0.05,0.01,0.005,0.001")]
    pub alpha_grid: String,
    #[arg(long)]
    pub one_sided: bool,
    #[arg(long, value_enum, default_value_t = Ambiguous::Exclude)]
    pub ambiguous: Ambiguous,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the per-alpha results as JSON
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    /// Manifest written next to an earlier output
    pub manifest: PathBuf,
}
