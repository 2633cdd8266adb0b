use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fdrisk_core::fit::{density_curve, linspace, pointwise_bands};
use fdrisk_core::{bootstrap, fit, FitConfig, FitResult, Observation, ZObservation};
use serde::Serialize;

use super::{create_parent, load_observations, to_z};
use crate::args::FitArgs;
use crate::error::{CliError, CliResult};
use crate::manifest::{now, write_json, write_manifest, RunInfo};
use crate::table;

pub const COMBINED: &str = "Combined";
const MISSING: &str = "(missing)";
const BIN_WIDTH: f64 = 0.1;
const PLOT_MAX: f64 = 6.0;
const CURVE_POINTS: usize = 601;

#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GroupOutcome {
    Fitted { group: String, n_observations: usize, result: Box<FitResult> },
    InsufficientData { group: String, n_observations: usize, message: String },
}

#[derive(Serialize)]
struct FitFile<'a> {
    run: &'a RunInfo,
    groups: &'a [GroupOutcome],
}

/// Label of an observation under the requested keys.
fn group_label(obs: &Observation, keys: &[String], year_split: i32) -> String {
    let g = obs.group_keys();
    keys.iter()
        .map(|k| match k.as_str() {
            "year-split" | "year_split" => match g.get("year").and_then(|y| y.trim().parse::<i32>().ok()) {
                Some(y) if y <= year_split => format!("<={year_split}"),
                Some(_) => format!(">{year_split}"),
                None => MISSING.to_string(),
            },
            key => g.get(key).cloned().unwrap_or_else(|| MISSING.to_string()),
        })
        .collect::<Vec<_>>()
        .join(" / ")
}

fn slug(label: &str) -> String {
    let mut s: String = label
        .chars()
        .map(|c| match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '-' | '_' => c,
            '<' => 'l',
            '>' => 'g',
            '=' => 'e',
            _ => '_',
        })
        .collect();
    if s.is_empty() {
        s.push('_');
    }
    s
}

/// Point used for the histogram: the value itself, an interval's midpoint,
/// or the lower bound of a right-censored interval.
fn plot_position(o: &ZObservation) -> f64 {
    if o.hi.is_finite() {
        (o.lo + o.hi) / 2.0
    } else {
        o.lo
    }
}

fn write_plot_data(dir: &Path, label: &str, z: &[ZObservation], res: &FitResult, replicate_weights: &[Vec<f64>]) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let base = slug(label);
    let n_bins = (PLOT_MAX / BIN_WIDTH).round() as usize;
    let mut counts = vec![0usize; n_bins];
    for o in z {
        let x = plot_position(o);
        if (0.0..PLOT_MAX).contains(&x) {
            counts[((x / BIN_WIDTH) as usize).min(n_bins - 1)] += 1;
        }
    }
    // scaled so the fitted density overlays the significant bins
    let scale = res.n_used.max(1) as f64 * BIN_WIDTH;
    let mut hist = String::from("bin_lo,bin_hi,count,density\n");
    for (i, c) in counts.iter().enumerate() {
        let lo = i as f64 * BIN_WIDTH;
        let _ = writeln!(hist, "{:.1},{:.1},{c},{}", lo, lo + BIN_WIDTH, *c as f64 / scale);
    }

    let grid = linspace(0.0, PLOT_MAX, CURVE_POINTS);
    let curve = density_curve(&res.model, &grid);
    let bands = if replicate_weights.is_empty() {
        None
    } else {
        Some(pointwise_bands(&res.model, replicate_weights, &grid, 0.95))
    };
    let mut text = String::from("z,density,band_lo,band_hi\n");
    for (i, (x, d)) in curve.iter().enumerate() {
        match &bands {
            Some(b) => {
                let _ = writeln!(text, "{x:.2},{d},{},{}", b[i].0, b[i].1);
            }
            None => {
                let _ = writeln!(text, "{x:.2},{d},,");
            }
        }
    }

    let hist_path = dir.join(format!("{base}.histogram.csv"));
    let curve_path = dir.join(format!("{base}.curve.csv"));
    std::fs::write(&hist_path, hist).map_err(|e| CliError::io(&hist_path, e))?;
    std::fs::write(&curve_path, text).map_err(|e| CliError::io(&curve_path, e))?;
    Ok(vec![hist_path, curve_path])
}

fn interval(res: &FitResult, key: &str) -> Option<(f64, f64)> {
    res.bootstrap.as_ref().and_then(|b| b.intervals.get(key)).map(|iv| (iv.lo, iv.hi))
}

pub fn render(outcomes: &[GroupOutcome]) -> String {
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .map(|o| match o {
            GroupOutcome::Fitted {
                group,
                n_observations,
                result,
            } => {
                let e = &result.estimands;
                let mut note = String::new();
                if !result.converged {
                    note.push_str("not converged");
                }
                if result.bootstrap.as_ref().is_some_and(|b| b.unreliable) {
                    if !note.is_empty() {
                        note.push_str("; ");
                    }
                    note.push_str("unreliable intervals");
                }
                vec![
                    group.clone(),
                    n_observations.to_string(),
                    result.n_used.to_string(),
                    e.odr.map_or_else(|| "-".into(), |v| format!("{v:.2}")),
                    table::estimate(e.edr, interval(result, "edr")),
                    table::estimate(e.fdr, interval(result, "fdr")),
                    table::estimate(e.err, interval(result, "err")),
                    note,
                ]
            }
            GroupOutcome::InsufficientData { group, n_observations, message } => {
                let mut row = vec![group.clone(), n_observations.to_string()];
                row.extend(["-", "-", "-", "-", "-"].map(String::from));
                row.push(message.clone());
                row
            }
        })
        .collect();
    table::render(&["group", "n", "fitted", "ODR", "EDR [95% CI]", "FDR [95% CI]", "ERR [95% CI]", "note"], &rows)
}

fn fit_group(
    label: String,
    z: &[ZObservation],
    config: &FitConfig,
    args: &FitArgs,
    plot_outputs: &mut Vec<PathBuf>,
) -> CliResult<GroupOutcome> {
    let alpha = args.model.alpha;
    let mut res = match fit(z, config, alpha) {
        Ok(res) => res,
        Err(e @ fdrisk_core::Error::InsufficientData { .. }) => {
            return Ok(GroupOutcome::InsufficientData {
                group: label,
                n_observations: z.len(),
                message: e.to_string(),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let mut replicate_weights = Vec::new();
    if args.replicates > 0 {
        let boot = bootstrap(z, config, alpha, args.replicates, args.model.seed)?;
        replicate_weights = boot.fits.into_iter().map(|f| f.weights).collect();
        res.bootstrap = Some(boot.summary);
    }
    if let Some(dir) = &args.plot_data {
        plot_outputs.extend(write_plot_data(dir, &label, z, &res, &replicate_weights)?);
    }
    Ok(GroupOutcome::Fitted {
        group: label,
        n_observations: z.len(),
        result: Box::new(res),
    })
}

pub fn run(args: &FitArgs, recorded: &[String]) -> CliResult<()> {
    let started = now();
    let config = args.model.fit_config();
    config.validate()?;
    if !(args.model.alpha > 0.0 && args.model.alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha {} outside (0, 1)", args.model.alpha)));
    }
    let run = RunInfo::new("fit", recorded, args, Some(args.model.seed), &[args.observations.as_path()])?;
    let obs = load_observations(&args.observations)?;
    let two_sided = !args.model.one_sided;

    let mut groups: BTreeMap<String, Vec<ZObservation>> = BTreeMap::new();
    let all = to_z(&obs, two_sided)?;
    if !args.group_by.is_empty() {
        for (o, z) in obs.iter().zip(&all) {
            groups.entry(group_label(o, &args.group_by, args.year_split)).or_default().push(z.clone());
        }
    }

    let mut plot_outputs = Vec::new();
    let mut outcomes = Vec::new();
    for (label, z) in groups {
        outcomes.push(fit_group(label, &z, &config, args, &mut plot_outputs)?);
    }
    let overall = if args.group_by.is_empty() { "All" } else { COMBINED };
    outcomes.push(fit_group(overall.to_string(), &all, &config, args, &mut plot_outputs)?);

    print!("{}", render(&outcomes));
    let mut outputs = Vec::new();
    if let Some(path) = &args.out {
        create_parent(path)?;
        write_json(path, &FitFile { run: &run, groups: &outcomes })?;
        outputs.push(path.clone());
    }
    outputs.extend(plot_outputs);
    if let Some(primary) = args.out.clone().or_else(|| args.plot_data.as_ref().map(|d| d.join("plot"))) {
        write_manifest(&primary, &run, &outputs, started)?;
    }

    let fitted = outcomes.iter().filter(|o| matches!(o, GroupOutcome::Fitted { .. })).count();
    if fitted == 0 {
        let message = match outcomes.last() {
            Some(GroupOutcome::InsufficientData { message, .. }) => message.clone(),
            _ => "no group could be fitted".into(),
        };
        return Err(CliError::Analysis(message));
    }
    Ok(())
}
