use fdrisk_core::simulation::{fdr_grid, simulation_fit_config, ErrorSummary, GridResult};
use fdrisk_core::{run_grid, PowerDistribution, ScenarioConfig};
use serde::Serialize;

use super::create_parent;
use crate::args::SimulateArgs;
use crate::error::{CliError, CliResult};
use crate::manifest::{now, write_json, write_manifest, RunInfo};
use crate::table;

const CSV_HEADER: [&str; 13] = [
    "index",
    "true_fdr",
    "estimated_fdr",
    "estimated_edr",
    "estimated_err",
    "converged",
    "iterations",
    "n_used",
    "n_excluded",
    "n_exact",
    "n_rounded",
    "n_less_than",
    "error",
];

#[derive(Serialize)]
struct SummaryFile<'a> {
    run: &'a RunInfo,
    scenario: String,
    power_distribution: &'a str,
    n_significant: usize,
    alpha: f64,
    seed: u64,
    grid_points: usize,
    n_failed: usize,
    summary: Option<ErrorSummary>,
}

/// `beta:2,5` or `beta` for the default shapes.
pub fn parse_power(spec: &str) -> CliResult<PowerDistribution> {
    let bad = || CliError::Usage(format!("--power {spec:?}: expected beta:SHAPE1,SHAPE2"));
    let (kind, params) = spec.split_once(':').unwrap_or((spec, ""));
    if !kind.trim().eq_ignore_ascii_case("beta") {
        return Err(bad());
    }
    if params.trim().is_empty() {
        return Ok(PowerDistribution::default());
    }
    let shapes: Vec<f64> = params
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    match shapes[..] {
        [a, b] => PowerDistribution::beta(a, b).map_err(|e| CliError::Usage(e.to_string())),
        _ => Err(bad()),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv(path: &std::path::Path, result: &GridResult) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    w.write_record(CSV_HEADER)?;
    for p in &result.points {
        w.write_record([
            p.index.to_string(),
            p.true_fdr.to_string(),
            opt(p.estimated_fdr),
            opt(p.estimated_edr),
            opt(p.estimated_err),
            p.converged.to_string(),
            p.iterations.to_string(),
            p.n_used.to_string(),
            p.n_excluded.to_string(),
            p.styles.exact.to_string(),
            p.styles.rounded.to_string(),
            p.styles.less_than.to_string(),
            p.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn run(args: &SimulateArgs, recorded: &[String]) -> CliResult<()> {
    let started = now();
    let base = if args.full_scale {
        ScenarioConfig::full_scale(args.scenario, args.seed)
    } else {
        ScenarioConfig::desk_scale(args.scenario, args.seed)
    };
    let power_dist = match &args.power_file {
        Some(path) => PowerDistribution::from_file(path).map_err(|e| CliError::io(path, e))?,
        None => parse_power(&args.power)?,
    };
    let config = ScenarioConfig {
        n_significant: args.n.unwrap_or(base.n_significant),
        alpha: args.alpha,
        fdr_grid: match args.grid_step {
            Some(step) => fdr_grid(step).map_err(|e| CliError::Usage(format!("--grid-step: {e}")))?,
            None => base.fdr_grid.clone(),
        },
        power_dist,
        ..base
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let inputs: Vec<&std::path::Path> = args.power_file.iter().map(|p| p.as_path()).collect();
    let run = RunInfo::new("simulate", recorded, &config, Some(args.seed), &inputs)?;

    let result = run_grid(&config, &simulation_fit_config())?;
    create_parent(&args.out)?;
    write_csv(&args.out, &result)?;
    let mut outputs = vec![args.out.clone()];

    let cell = |s: Option<ErrorSummary>, f: fn(&ErrorSummary) -> (f64, f64)| {
        s.map_or_else(|| "-".to_string(), |s| {
            let (v, se) = f(&s);
            format!("{v:.3} ({se:.3})")
        })
    };
    print!(
        "{}",
        table::render(
            &["scenario", "points", "failed", "RMSE (se)", "bias (se)"],
            &[vec![
                result.scenario.to_string(),
                result.points.len().to_string(),
                result.n_failed.to_string(),
                cell(result.summary, |s| (s.rmse, s.se_rmse)),
                cell(result.summary, |s| (s.bias, s.se_bias)),
            ]]
        )
    );

    if let Some(path) = &args.summary {
        create_parent(path)?;
        write_json(
            path,
            &SummaryFile {
                run: &run,
                scenario: result.scenario.to_string(),
                power_distribution: &result.power_distribution,
                n_significant: result.n_significant,
                alpha: result.alpha,
                seed: result.seed,
                grid_points: result.points.len(),
                n_failed: result.n_failed,
                summary: result.summary,
            },
        )?;
        outputs.push(path.clone());
    }
    write_manifest(&args.out, &run, &outputs, started)?;
    if result.n_failed == result.points.len() {
        return Err(CliError::Analysis("every grid point failed to fit".into()));
    }
    Ok(())
}
