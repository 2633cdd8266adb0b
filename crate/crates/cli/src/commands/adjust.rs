use fdrisk_core::estimands::AlphaRow;
use fdrisk_core::{adjust_alpha, AlphaAdjustment, FitConfig};
use serde::Serialize;

use super::{create_parent, load_observations, to_z};
use crate::args::AdjustArgs;
use crate::error::{CliError, CliResult};
use crate::manifest::{now, write_json, write_manifest, RunInfo};
use crate::table;

#[derive(Serialize)]
struct AdjustFile<'a> {
    run: &'a RunInfo,
    #[serde(flatten)]
    adjustment: &'a AlphaAdjustment,
}

/// Comma-separated alphas in (0, 1), returned in descending order.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let mut grid = s
        .split(',')
        .map(|t| match t.trim().parse::<f64>() {
            Ok(a) if a > 0.0 && a < 1.0 => Ok(a),
            _ => Err(CliError::Usage(format!("--alpha-grid: {t:?} is not an alpha in (0, 1)"))),
        })
        .collect::<CliResult<Vec<f64>>>()?;
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();
    Ok(grid)
}

pub fn render(adj: &AlphaAdjustment) -> String {
    let mut rows: Vec<Vec<String>> = adj
        .per_alpha
        .iter()
        .map(|r| match *r {
            AlphaRow::Fitted { alpha, edr, fdr, n_used } => vec![
                alpha.to_string(),
                n_used.to_string(),
                format!("{edr:.3}"),
                format!("{fdr:.3}"),
                if fdr <= adj.target_fdr { "yes" } else { "no" }.into(),
            ],
            AlphaRow::InsufficientData { alpha, n_used } => {
                vec![alpha.to_string(), n_used.to_string(), "-".into(), "-".into(), "insufficient data".into()]
            }
        })
        .collect();
    match adj.alpha_star {
        Some(a) => rows.push(vec![format!("alpha* = {a}"), String::new(), String::new(), String::new(), String::new()]),
        None => rows.push(vec!["none qualifies".into(), String::new(), String::new(), String::new(), String::new()]),
    }
    table::render(&["alpha", "fitted", "EDR", "FDR", format!("FDR <= {}", adj.target_fdr).as_str()], &rows)
}

pub fn run(args: &AdjustArgs, recorded: &[String]) -> CliResult<()> {
    let started = now();
    let grid = parse_grid(&args.alpha_grid)?;
    if !(args.target_fdr > 0.0 && args.target_fdr < 1.0) {
        return Err(CliError::Usage(format!("--target-fdr {} outside (0, 1)", args.target_fdr)));
    }
    let run = RunInfo::new("adjust-alpha", recorded, args, Some(args.seed), &[args.observations.as_path()])?;
    let obs = load_observations(&args.observations)?;
    let z = to_z(&obs, !args.one_sided)?;
    let config = FitConfig {
        seed: args.seed,
        two_sided: !args.one_sided,
        ambiguous: args.ambiguous.into(),
        ..FitConfig::default()
    };
    let adj = adjust_alpha(&z, args.target_fdr, &grid, &config)?;
    print!("{}", render(&adj));
    if let Some(path) = &args.out {
        create_parent(path)?;
        write_json(path, &AdjustFile { run: &run, adjustment: &adj })?;
        write_manifest(path, &run, std::slice::from_ref(path), started)?;
    }
    Ok(())
}
