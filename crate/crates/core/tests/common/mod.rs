#![allow(dead_code)]

use std::path::PathBuf;

use fdrisk_core::exchange::ObservationRecord;
use fdrisk_core::extraction::{extract_text, ExtractOptions};
use serde::Deserialize;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[derive(Debug, Deserialize)]
pub struct Expected {
    pub span: String,
    #[serde(flatten)]
    pub record: ObservationRecord,
}

#[derive(Debug, Deserialize)]
pub struct NotationFixture {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub exact_equals: bool,
    pub expect: Vec<Expected>,
}

pub fn notation_fixtures() -> Vec<NotationFixture> {
    let text = std::fs::read_to_string(fixtures_dir().join("extraction_notations.jsonl")).expect("fixture file");
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("fixture line"))
        .collect()
}

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1e-300),
        _ => false,
    }
}

/// Differences between extraction output and the fixture, one line each.
pub fn fixture_mismatches(f: &NotationFixture) -> Vec<String> {
    let ex = extract_text(&f.id, &f.text, ExtractOptions { exact_equals: f.exact_equals });
    let mut out = Vec::new();
    if ex.records.len() != f.expect.len() {
        out.push(format!("{}: {} records, expected {}: {:?}", f.id, ex.records.len(), f.expect.len(), ex.records));
        return out;
    }
    for (got, want) in ex.records.iter().zip(&f.expect) {
        let rec = got.to_observation_record(Default::default());
        let w = &want.record;
        let same = got.raw_span == want.span
            && rec.kind == w.kind
            && rec.decimals == w.decimals
            && rec.scale == w.scale
            && close(rec.value, w.value)
            && close(rec.estimate, w.estimate)
            && close(rec.lower, w.lower)
            && close(rec.upper, w.upper)
            && close(rec.level, w.level);
        if !same {
            out.push(format!("{}: got {:?} {:?}, expected {:?} {:?}", f.id, got.raw_span, rec, want.span, w));
        }
        let tail: String = f.text.chars().skip(got.position).collect();
        if !tail.starts_with(&got.raw_span) {
            out.push(format!("{}: span {:?} not at offset {}", f.id, got.raw_span, got.position));
        }
    }
    out
}
