//! False discovery risk of a literature from its reported p-values.
//!
//! Reported p-values become censoring intervals on the absolute z scale
//! ([`observations`]); significant ones are fitted with a mixture of
//! truncated folded normals ([`fit`]) whose weights give the expected
//! discovery rate and, through Soric's bound, the false discovery risk
//! ([`estimands`]).

pub mod bootstrap;
pub mod error;
pub mod estimands;
pub mod exchange;
pub mod extraction;
pub mod fit;
pub mod folded_normal;
pub mod normal;
pub mod observations;
pub mod rng;
pub mod simulation;
mod serde_util;

pub use bootstrap::{bootstrap, BootstrapResult, BootstrapSummary, Interval};
pub use error::{Error, Result};
pub use estimands::{adjust_alpha, soric_fdr, AlphaAdjustment, EstimandSet};
pub use exchange::{read_observations, write_observations, Observation, ObservationKind, ObservationRecord};
pub use extraction::{extract_statistics, AbstractRecord, ExtractionRecord, StudyType};
pub use fit::{fit, AmbiguousPolicy, FitConfig, FitResult, ZCurveModel};
pub use folded_normal::{Component, TruncationWindow};
pub use observations::{
    ci_to_z, p_to_z, significance_split, to_z_observation, CiScale, ConfidenceIntervalReport, PValueReport,
    ReportStyle, ZObservation,
};

pub use simulation::{run_grid, GridResult, PowerDistribution, Scenario, ScenarioConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
