use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fdrisk_core::folded_normal::power;
use fdrisk_core::rng::stream_rng;
use fdrisk_core::simulation::sample_significant_p;
use fdrisk_core::{soric_fdr, write_observations, ObservationRecord, PValueReport, PowerDistribution};
use serde_json::Value;
use tempfile::TempDir;

fn fdrisk(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdrisk"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run fdrisk")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/corpus.jsonl")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Exact significant p-values whose true effects all have the given power.
fn write_fixed_power(path: &Path, true_fdr: f64, pow: f64, n: usize, seed: u64) {
    let dist = PowerDistribution::empirical(vec![pow], None).unwrap();
    let p = sample_significant_p(true_fdr, n, &dist, 0.05, &mut stream_rng(seed, 0)).unwrap();
    let records: Vec<ObservationRecord> = p
        .iter()
        .map(|&v| ObservationRecord::from_p(&PValueReport::exact(v).unwrap()))
        .collect();
    write_observations(path, &records).unwrap();
}

fn fitted_fdr(json: &Value, group: usize) -> f64 {
    json["groups"][group]["result"]["estimands"]["fdr"].as_f64().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&fdrisk(dir.path(), &["--help"])), 0);
    assert_eq!(code(&fdrisk(dir.path(), &["--version"])), 0);
    assert_eq!(code(&fdrisk(dir.path(), &["fit", "--help"])), 0);
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&fdrisk(d, &[])), 2);
    assert_eq!(code(&fdrisk(d, &["frobnicate"])), 2);
    let bad = fdrisk(d, &["simulate", "--scenario", "E", "--out", "x.csv"]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("Usage"), "{}", stderr(&bad));
    assert_eq!(code(&fdrisk(d, &["simulate", "--scenario", "A", "--grid-step", "0", "--out", "x.csv"])), 2);
    assert!(!d.join("x.csv").exists());
    assert_eq!(code(&fdrisk(d, &["fit", "missing.jsonl"])), 2);
    assert_eq!(code(&fdrisk(d, &["extract", "missing.jsonl", "--out", "o.jsonl"])), 2);
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let args = ["simulate", "--scenario", "A", "--grid-step", "0.5", "--n", "500", "--seed", "7"];
    let a = fdrisk(d, &[&args[..], &["--out", "a.csv"]].concat());
    let b = fdrisk(d, &[&args[..], &["--out", "b.csv"]].concat());
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(code(&b), 0);
    let a = std::fs::read(d.join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 4, "{text}");
    assert!(text.lines().nth(1).unwrap().starts_with("0,0,"));
    assert!(text.lines().nth(3).unwrap().starts_with("2,1,"));
    assert!(d.join("a.csv.manifest.json").exists());
}

#[test]
fn scenario_d_mixes_report_styles() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let run = |scenario: &str| {
        let out = format!("{scenario}.csv");
        let r = fdrisk(d, &["simulate", "--scenario", scenario, "--grid-step", "1", "--n", "1000", "--seed", "3", "--out", &out]);
        assert_eq!(code(&r), 0, "{}", stderr(&r));
        let mut reader = csv::Reader::from_path(d.join(out)).unwrap();
        let headers = reader.headers().unwrap().clone();
        let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
        let (e, r, l) = (col("n_exact"), col("n_rounded"), col("n_less_than"));
        reader
            .records()
            .map(|rec| {
                let rec = rec.unwrap();
                let get = |i: usize| rec[i].parse::<usize>().unwrap();
                (get(e), get(r), get(l))
            })
            .collect::<Vec<_>>()
    };
    for (exact, rounded, less) in run("A") {
        assert_eq!((rounded, less), (0, 0));
        assert_eq!(exact, 1000);
    }
    for (exact, rounded, less) in run("D") {
        assert_eq!(exact + rounded + less, 1000);
        // both 20% degradations apply independently, ceilings winning
        assert!((560..=720).contains(&exact), "exact {exact}");
        assert!((100..=220).contains(&rounded), "rounded {rounded}");
        assert!((140..=260).contains(&less), "less than {less}");
    }
}

#[test]
fn fit_recovers_single_power_and_alpha_01_is_no_riskier() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let pow = power(3.0, 0.05).unwrap();
    write_fixed_power(&d.join("obs.jsonl"), 0.0, pow, 2000, 11);

    let r = fdrisk(d, &["fit", "obs.jsonl", "--replicates", "20", "--out", "fit05.json"]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let table = stdout(&r);
    assert_eq!(table.lines().count(), 3, "header, rule and one row:\n{table}");
    let json = read_json(&d.join("fit05.json"));
    assert_eq!(json["groups"].as_array().unwrap().len(), 1);
    let fdr05 = fitted_fdr(&json, 0);
    let analytic = soric_fdr(pow, 0.05).unwrap();
    assert!((fdr05 - analytic).abs() < 0.02, "{fdr05} vs {analytic}");
    assert_eq!(json["run"]["command"], "fit");
    assert_eq!(json["run"]["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let r = fdrisk(d, &["fit", "obs.jsonl", "--alpha", "0.01", "--replicates", "0", "--out", "fit01.json"]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let json = read_json(&d.join("fit01.json"));
    assert_eq!(json["groups"][0]["result"]["estimands"]["alpha"].as_f64(), Some(0.01));
    assert!(fitted_fdr(&json, 0) <= fdr05, "{} > {fdr05}", fitted_fdr(&json, 0));
}

#[test]
fn empty_observation_file_is_an_analysis_failure() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(d.join("empty.jsonl"), "").unwrap();
    let r = fdrisk(d, &["fit", "empty.jsonl"]);
    assert_eq!(code(&r), 1);
    assert!(stderr(&r).contains("insufficient significant observations"), "{}", stderr(&r));
}

#[test]
fn adjust_alpha_cases() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write_fixed_power(&d.join("high.jsonl"), 0.0, power(3.5, 0.05).unwrap(), 1000, 5);
    write_fixed_power(&d.join("null.jsonl"), 1.0, 0.5, 1000, 6);

    let r = fdrisk(d, &["adjust-alpha", "high.jsonl", "--target-fdr", "0.05", "--alpha-grid", ".05,.01", "--out", "adj.json"]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert!(stdout(&r).contains("alpha* = 0.05"), "{}", stdout(&r));
    let json = read_json(&d.join("adj.json"));
    assert_eq!(json["alpha_star"].as_f64(), Some(0.05));
    assert_eq!(json["per_alpha"].as_array().unwrap().len(), 2);

    let r = fdrisk(d, &["adjust-alpha", "null.jsonl", "--target-fdr", "0.05", "--alpha-grid", ".05,.01"]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert!(stdout(&r).contains("none qualifies"), "{}", stdout(&r));

    let r = fdrisk(d, &["adjust-alpha", "high.jsonl", "--alpha-grid", ".05;.01"]);
    assert_eq!(code(&r), 2);
    let r = fdrisk(d, &["adjust-alpha", "high.jsonl", "--alpha-grid", "abc"]);
    assert_eq!(code(&r), 2);
}

#[test]
fn extract_fixture_corpus() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let c = corpus();
    let c = c.to_str().unwrap();
    let r = fdrisk(d, &["extract", c, "--out", "obs.jsonl", "--summary", "summary.json"]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let text = std::fs::read_to_string(d.join("obs.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 12);
    let summary = read_json(&d.join("summary.json"));
    assert_eq!(summary["summary"]["total"]["abstracts"], 12);
    assert_eq!(summary["observations_written"], 12);
    assert!(d.join("obs.jsonl.manifest.json").exists());

    let r = fdrisk(d, &["extract", c, "--out", "one.csv", "--one-per-abstract", "--seed", "4"]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let text = std::fs::read_to_string(d.join("one.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 9);

    let r = fdrisk(d, &["extract", c, "--out", "none.jsonl", "--types", "none"]);
    assert_eq!(code(&r), 0);
    assert!(stderr(&r).contains("warning"), "{}", stderr(&r));
    assert_eq!(std::fs::read_to_string(d.join("none.jsonl")).unwrap(), "");
}

#[test]
fn extract_tolerates_bad_lines_only_up_to_max_errors() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let mut text = std::fs::read_to_string(corpus()).unwrap();
    text.push_str("{\"id\": \"broken\"}\n");
    std::fs::write(d.join("corpus.jsonl"), text).unwrap();
    assert_eq!(code(&fdrisk(d, &["extract", "corpus.jsonl", "--out", "a.jsonl"])), 1);
    assert_eq!(code(&fdrisk(d, &["extract", "corpus.jsonl", "--out", "b.jsonl", "--max-errors", "1"])), 0);
}

#[test]
fn grouped_fit_marks_small_groups() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let c = corpus();
    assert_eq!(code(&fdrisk(d, &["extract", c.to_str().unwrap(), "--out", "obs.jsonl"])), 0);
    let r = fdrisk(
        d,
        &["fit", "obs.jsonl", "--group-by", "journal,year-split", "--replicates", "20", "--out", "fit.json", "--plot-data", "plots"],
    );
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let json = read_json(&d.join("fit.json"));
    let groups = json["groups"].as_array().unwrap();
    let last = groups.last().unwrap();
    assert_eq!(last["group"], "Combined");
    assert_eq!(last["status"], "fitted");
    assert!(groups[..groups.len() - 1].iter().all(|g| g["status"] == "insufficient_data"));
    let hist = std::fs::read_to_string(d.join("plots/Combined.histogram.csv")).unwrap();
    assert_eq!(hist.lines().count(), 61);
    let curve = std::fs::read_to_string(d.join("plots/Combined.curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 602);

    // a lone small group with no combined fit to fall back on
    std::fs::write(d.join("few.jsonl"), "{\"kind\":\"p_exact\",\"value\":0.01}\n").unwrap();
    let r = fdrisk(d, &["fit", "few.jsonl", "--group-by", "journal"]);
    assert_eq!(code(&r), 1);
}

#[test]
fn replay_reproduces_outputs_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let r = fdrisk(d, &["simulate", "--scenario", "D", "--grid-step", "0.5", "--n", "300", "--seed", "9", "--out", "sim.csv", "--summary", "sim.json"]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let csv = std::fs::read(d.join("sim.csv")).unwrap();
    let summary = std::fs::read(d.join("sim.json")).unwrap();
    std::fs::remove_file(d.join("sim.csv")).unwrap();
    std::fs::remove_file(d.join("sim.json")).unwrap();
    let r = fdrisk(d, &["replay", "sim.csv.manifest.json"]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert_eq!(std::fs::read(d.join("sim.csv")).unwrap(), csv);
    assert_eq!(std::fs::read(d.join("sim.json")).unwrap(), summary);

    write_fixed_power(&d.join("obs.jsonl"), 0.2, 0.6, 300, 2);
    assert_eq!(code(&fdrisk(d, &["fit", "obs.jsonl", "--replicates", "10", "--seed", "1", "--out", "fit.json"])), 0);
    let fit = std::fs::read(d.join("fit.json")).unwrap();
    assert_eq!(code(&fdrisk(d, &["replay", "fit.json.manifest.json"])), 0);
    assert_eq!(std::fs::read(d.join("fit.json")).unwrap(), fit);

    // changed inputs are refused
    write_fixed_power(&d.join("obs.jsonl"), 0.2, 0.6, 300, 3);
    let r = fdrisk(d, &["replay", "fit.json.manifest.json"]);
    assert_eq!(code(&r), 2);
    assert!(stderr(&r).contains("changed"), "{}", stderr(&r));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(d.join("run.cfg"), "# simulation defaults\nscenario = B\ngrid-step = 1\nn = 200\nseed = 21\n").unwrap();
    let r = fdrisk(d, &["simulate", "--config", "run.cfg", "--seed", "22", "--out", "s.csv"]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let m = read_json(&d.join("s.csv.manifest.json"));
    assert_eq!(m["seed"], 22);
    assert_eq!(m["config"]["scenario"], "B");
    assert_eq!(m["config"]["n_significant"], 200);
    let argv: Vec<&str> = m["argv"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(!argv.contains(&"--config"));

    std::fs::write(d.join("bad.cfg"), "seed 3\n").unwrap();
    assert_eq!(code(&fdrisk(d, &["simulate", "--config", "bad.cfg", "--scenario", "A", "--out", "t.csv"])), 2);
}
