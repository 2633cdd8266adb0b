//! Regex extraction of p-values and confidence intervals from abstract text.
//!
//! P-values (case-insensitive `p`, `p value`, `p-value`):
//!
//! - operators `=`, `:`, `of`, `was`, `is` give a report rounded to the
//!   printed decimals (or exact with [`ExtractOptions::exact_equals`]);
//! - `<`, `less than` give `less_than`; `≤`, `<=`, `=<`, `< or =` give
//!   `less_equal`; `>` and `≥` are recognized but skipped with a diagnostic;
//! - numbers may use a leading dot (`.03`), a middle dot (`0·03`),
//!   `e` notation (`1.2e-4`) or a power of ten (`2×10^-4`, `2 x 10-4`,
//!   `2×10⁻⁴`, `2x10(-4)`).
//!
//! Confidence intervals: `95% CI l to u`, `95% CI [l, u]`, `(95% CI: l–u)`
//! and the spelled-out `confidence interval`. A number right before the CI
//! is taken as its estimate. The interval is on the ratio scale when one of
//! `OR`, `RR`, `HR`, `aOR`, `aHR`, `aRR`, `IRR` (case-sensitive) or `odds
//! ratio`, `hazard ratio`, `risk ratio`, `rate ratio`, `relative risk`
//! appears between the previous CI (or the sentence start) and this one.
//! CIs are kept only from sentences without a usable p-value.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;
use std::sync::LazyLock;

use rand::Rng;
use rayon::prelude::*;
use regex::{Captures, Regex};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exchange::ObservationRecord;
use crate::observations::{CiScale, ConfidenceIntervalReport, GroupKeys, PValueReport, ReportStyle};
use crate::rng::stream_rng;

const MANTISSA: &str = r"(?:\d+(?:[.·]\d+)?|[.·]\d+)";

static P_VALUE: LazyLock<Regex> = LazyLock::new(|| {
    let op = r"(?P<op><\s*or\s*=|less\s+than\s+or\s+equal\s+to|less\s+than|greater\s+than|<=|=<|≤|⩽|>=|≥|<|>|=|:|\bof\b|\bwas\b|\bis\b)";
    let exp = r"(?:[eE](?P<e1>[-−–]?\s?\d+)|\s?[x×✕*]\s?10\s?(?:\^\s?(?:\(\s?(?P<e2>[-−–]?\s?\d+)\s?\)|(?P<e6>[-−–]?\s?\d+))|\(\s?(?P<e3>[-−–]\s?\d+)\s?\)|(?P<e4>[⁻⁺]?[⁰¹²³⁴⁵⁶⁷⁸⁹]+)|(?P<e5>[-−–]\s?\d+)))";
    Regex::new(&format!(
        r"(?i)\bp(?:\s*-?\s*values?)?\s*{op}\s*(?P<mant>{MANTISSA}){exp}?"
    ))
    .expect("p-value regex")
});

static CI: LazyLock<Regex> = LazyLock::new(|| {
    let signed = format!(r"[-−]?\s?{MANTISSA}");
    Regex::new(&format!(
        r"(?i)(?P<level>\d{{2}}(?:[.·]\d+)?)\s*%\s*(?:c\.?i\.?|confidence\s+intervals?)\s*(?:[:,=]|\bwas\b|\bof\b)?\s*[\[(]?\s*(?P<lo>{signed})\s*(?:\bto\b|–|—|-|,|;)\s*(?P<hi>{signed})\s*[\])]?"
    ))
    .expect("ci regex")
});

static ESTIMATE_BEFORE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?P<est>[-−]?{MANTISSA})\s*(?:%|[A-Za-zμ/]{{1,6}})?\s*[,;:(\[]*\s*$"
    ))
    .expect("estimate regex")
});

static RATIO_CUE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(?:a?OR|a?RR|a?HR|IRR)s?\b|(?i:\b(?:odds|hazards?|risk|rate)\s+ratios?\b|\brelative\s+risks?\b)")
        .expect("ratio cue regex")
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyType {
    #[serde(alias = "ct")]
    ClinicalTrial,
    #[serde(alias = "rct")]
    RandomizedControlledTrial,
    Other,
}

impl StudyType {
    pub fn as_str(self) -> &'static str {
        match self {
            StudyType::ClinicalTrial => "clinical_trial",
            StudyType::RandomizedControlledTrial => "randomized_controlled_trial",
            StudyType::Other => "other",
        }
    }

    /// Parses a comma-separated list such as `ct,rct`; `none` is the empty set.
    pub fn parse_set(s: &str) -> Result<BTreeSet<StudyType>> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("none") || s.is_empty() {
            return Ok(BTreeSet::new());
        }
        if s.eq_ignore_ascii_case("all") {
            return Ok([StudyType::ClinicalTrial, StudyType::RandomizedControlledTrial, StudyType::Other].into());
        }
        s.split(',').map(|t| t.parse()).collect()
    }
}

impl FromStr for StudyType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "ct" | "clinical_trial" => Ok(StudyType::ClinicalTrial),
            "rct" | "randomized_controlled_trial" => Ok(StudyType::RandomizedControlledTrial),
            "other" => Ok(StudyType::Other),
            other => Err(domain(format!("unknown study type {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractRecord {
    pub id: String,
    pub journal: String,
    pub year: i32,
    pub study_type: StudyType,
    pub text: String,
}

impl AbstractRecord {
    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(domain("abstract id is empty"));
        }
        if self.year < 1900 {
            return Err(domain(format!("year {} before 1900", self.year)));
        }
        Ok(())
    }

    pub fn group_keys(&self) -> GroupKeys {
        let mut g = GroupKeys::new();
        g.insert("journal".into(), self.journal.clone());
        g.insert("year".into(), self.year.to_string());
        g.insert("study_type".into(), self.study_type.as_str().into());
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    PValue,
    ConfidenceInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Parsed {
    PValue(PValueReport),
    ConfidenceInterval(ConfidenceIntervalReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionRecord {
    pub source_id: String,
    pub kind: StatisticKind,
    /// Matched text, verbatim.
    pub raw_span: String,
    pub parsed: Parsed,
    /// Offset of `raw_span` in the source text, in characters.
    pub position: usize,
}

impl ExtractionRecord {
    pub fn to_observation_record(&self, groups: GroupKeys) -> ObservationRecord {
        match &self.parsed {
            Parsed::PValue(p) => {
                let mut rec = ObservationRecord::from_p(p);
                rec.source_id = Some(self.source_id.clone());
                rec.groups = groups;
                rec
            }
            Parsed::ConfidenceInterval(ci) => ObservationRecord::from_ci(ci, Some(self.source_id.clone()), groups),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub source_id: String,
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractOptions {
    /// Treat `p = v` as exact instead of rounded to the printed decimals.
    pub exact_equals: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub records: Vec<ExtractionRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Byte ranges of sentences: a break follows `.`, `!` or `?` when
/// whitespace and then an uppercase letter come next.
pub fn sentences(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let rest = &text[i + c.len_utf8()..];
        let trimmed = rest.trim_start();
        if trimmed.len() < rest.len() && trimmed.chars().next().is_some_and(char::is_uppercase) {
            let end = i + c.len_utf8();
            out.push((start, end));
            start = end;
        }
    }
    if start < text.len() {
        out.push((start, text.len()));
    }
    out
}

fn char_offset(text: &str, byte: usize) -> usize {
    text[..byte].chars().count()
}

fn normalize_number(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '·' => '.',
            '−' | '–' => '-',
            c => c,
        })
        .collect()
}

fn superscript_exponent(s: &str) -> Option<i32> {
    let mut out = String::new();
    for c in s.chars() {
        out.push(match c {
            '⁻' => '-',
            '⁺' => '+',
            '⁰' => '0',
            '¹' => '1',
            '²' => '2',
            '³' => '3',
            c @ '⁴'..='⁹' => char::from_digit(c as u32 - '⁴' as u32 + 4, 10)?,
            _ => return None,
        });
    }
    out.parse().ok()
}

/// Value and printed decimals of a matched number.
fn parse_number(caps: &Captures<'_>) -> std::result::Result<(f64, i32), String> {
    let mant = normalize_number(&caps["mant"]);
    let mant_decimals = mant.split_once('.').map(|(_, f)| f.len() as i32).unwrap_or(0);
    let exponent = if let Some(m) = caps.name("e4") {
        Some(superscript_exponent(m.as_str()).ok_or_else(|| format!("bad exponent {:?}", m.as_str()))?)
    } else {
        ["e1", "e2", "e3", "e5", "e6"]
            .iter()
            .find_map(|g| caps.name(g))
            .map(|m| {
                normalize_number(m.as_str())
                    .parse::<i32>()
                    .map_err(|_| format!("bad exponent {:?}", m.as_str()))
            })
            .transpose()?
    };
    let exponent = exponent.unwrap_or(0);
    let value: f64 = format!("{mant}e{exponent}")
        .parse()
        .map_err(|_| format!("bad number {mant:?}"))?;
    Ok((value, mant_decimals - exponent))
}

fn p_report(op: &str, value: f64, decimals: i32, options: ExtractOptions) -> std::result::Result<PValueReport, String> {
    let op = op.to_ascii_lowercase();
    let op: String = op.split_whitespace().collect::<Vec<_>>().join(" ");
    let style = match op.as_str() {
        "<" | "less than" => ReportStyle::LessThan,
        "≤" | "⩽" | "<=" | "=<" | "less than or equal to" => ReportStyle::LessEqual,
        o if o.starts_with('<') => ReportStyle::LessEqual,
        ">" | ">=" | "≥" | "greater than" => return Err("lower bounds on p are not representable; skipped".into()),
        _ if options.exact_equals || decimals <= 0 => ReportStyle::Exact,
        _ => ReportStyle::Rounded {
            decimals: decimals as u32,
        },
    };
    PValueReport::new(value, style).map_err(|e| e.to_string())
}

fn ci_report(caps: &Captures<'_>, prefix: &str) -> std::result::Result<(ConfidenceIntervalReport, bool), String> {
    let num = |name: &str| {
        normalize_number(&caps[name])
            .parse::<f64>()
            .map_err(|_| format!("bad number {:?}", &caps[name]))
    };
    let level = num("level")? / 100.0;
    let (lower, upper) = (num("lo")?, num("hi")?);
    let estimate = ESTIMATE_BEFORE
        .captures(prefix)
        .and_then(|c| normalize_number(&c["est"]).parse::<f64>().ok());
    let ratio = RATIO_CUE.is_match(prefix);
    let scale = if ratio { CiScale::Ratio } else { CiScale::Additive };
    ConfidenceIntervalReport::new(estimate, lower, upper, level, scale)
        .map(|ci| (ci, ratio))
        .map_err(|e| e.to_string())
}

/// Drops a closing bracket that has no opening partner inside the span.
fn trim_unbalanced(span: &str) -> &str {
    let opens = span.matches(['(', '[']).count();
    let closes = span.matches([')', ']']).count();
    if closes > opens {
        span.trim_end_matches([')', ']']).trim_end()
    } else {
        span
    }
}

pub fn extract_statistics(a: &AbstractRecord, options: ExtractOptions) -> Extraction {
    extract_text(&a.id, &a.text, options)
}

pub fn extract_text(source_id: &str, text: &str, options: ExtractOptions) -> Extraction {
    let mut out = Extraction::default();
    let diag = |out: &mut Extraction, byte: usize, message: String| {
        out.diagnostics.push(Diagnostic {
            source_id: source_id.to_string(),
            position: char_offset(text, byte),
            message,
        })
    };
    for (s, e) in sentences(text) {
        let sentence = &text[s..e];
        let mut found_p = false;
        for caps in P_VALUE.captures_iter(sentence) {
            let m = caps.get(0).unwrap();
            let after = &sentence[m.end()..];
            if after.starts_with(|c: char| c.is_ascii_digit()) || (after.starts_with(['.', '·']) && after[1..].starts_with(|c: char| c.is_ascii_digit())) {
                diag(&mut out, s + m.start(), format!("malformed number in {:?}", m.as_str()));
                continue;
            }
            let parsed = parse_number(&caps).and_then(|(v, d)| p_report(&caps["op"], v, d, options));
            match parsed {
                Ok(report) => {
                    found_p = true;
                    out.records.push(ExtractionRecord {
                        source_id: source_id.to_string(),
                        kind: StatisticKind::PValue,
                        raw_span: m.as_str().to_string(),
                        parsed: Parsed::PValue(report.with_source(source_id)),
                        position: char_offset(text, s + m.start()),
                    });
                }
                Err(msg) => diag(&mut out, s + m.start(), format!("{:?}: {msg}", m.as_str())),
            }
        }
        if found_p {
            continue;
        }
        let mut window_start = 0;
        for caps in CI.captures_iter(sentence) {
            let m = caps.get(0).unwrap();
            let span = trim_unbalanced(m.as_str());
            let prefix = &sentence[window_start..m.start()];
            window_start = m.end();
            match ci_report(&caps, prefix) {
                Ok((ci, ratio)) => {
                    if !ratio {
                        diag(&mut out, s + m.start(), format!("{span:?}: no ratio cue, additive scale assumed"));
                    }
                    out.records.push(ExtractionRecord {
                        source_id: source_id.to_string(),
                        kind: StatisticKind::ConfidenceInterval,
                        raw_span: span.to_string(),
                        parsed: Parsed::ConfidenceInterval(ci),
                        position: char_offset(text, s + m.start()),
                    });
                }
                Err(msg) => diag(&mut out, s + m.start(), format!("{span:?}: {msg}")),
            }
        }
    }
    out
}

/// Canonical text for a p-value report, for round-trip checks.
pub fn render_p(report: &PValueReport) -> String {
    match report.style {
        ReportStyle::Exact => format!("p = {}", report.value),
        ReportStyle::Rounded { decimals } => format!("p = {:.*}", decimals as usize, report.value),
        ReportStyle::LessThan => format!("p < {}", report.value),
        ReportStyle::LessEqual => format!("p ≤ {}", report.value),
    }
}

/// Extracts every abstract in parallel; records come back ordered by
/// source id, then position.
pub fn extract_corpus(records: &[AbstractRecord], options: ExtractOptions) -> Extraction {
    let parts: Vec<Extraction> = records.par_iter().map(|a| extract_statistics(a, options)).collect();
    let mut out = Extraction::default();
    for p in parts {
        out.records.extend(p.records);
        out.diagnostics.extend(p.diagnostics);
    }
    out.records
        .sort_by(|a, b| a.source_id.cmp(&b.source_id).then(a.position.cmp(&b.position)));
    out.diagnostics
        .sort_by(|a, b| a.source_id.cmp(&b.source_id).then(a.position.cmp(&b.position)));
    out
}

pub fn filter_study_types(records: &[AbstractRecord], allowed: &BTreeSet<StudyType>) -> Vec<AbstractRecord> {
    records
        .iter()
        .filter(|r| allowed.contains(&r.study_type))
        .cloned()
        .collect()
}

/// One uniformly chosen record per source id, ordered by source id.
pub fn one_per_abstract(records: &[ExtractionRecord], seed: u64) -> Vec<ExtractionRecord> {
    let mut groups: BTreeMap<&str, Vec<&ExtractionRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.source_id.as_str()).or_default().push(r);
    }
    groups
        .into_values()
        .enumerate()
        .map(|(i, mut group)| {
            group.sort_by_key(|r| r.position);
            let pick = if group.len() == 1 {
                0
            } else {
                stream_rng(seed, i as u64).random_range(0..group.len())
            };
            group[pick].clone()
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub journal: String,
    pub abstracts: usize,
    pub ct_or_rct: usize,
    pub scrapeable: usize,
    pub p_values: usize,
    pub confidence_intervals: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub rows: Vec<SummaryRow>,
    pub total: SummaryRow,
}

/// Per-journal counts: all abstracts, those passing the study-type filter,
/// those yielding at least one statistic, and the statistics themselves.
pub fn summarize(all: &[AbstractRecord], allowed: &BTreeSet<StudyType>, extracted: &[ExtractionRecord]) -> CorpusSummary {
    let mut rows: BTreeMap<&str, SummaryRow> = BTreeMap::new();
    let by_id: BTreeMap<&str, &AbstractRecord> = all.iter().map(|a| (a.id.as_str(), a)).collect();
    for a in all {
        let row = rows.entry(a.journal.as_str()).or_insert_with(|| SummaryRow {
            journal: a.journal.clone(),
            ..Default::default()
        });
        row.abstracts += 1;
        if allowed.contains(&a.study_type) {
            row.ct_or_rct += 1;
        }
    }
    let mut scrapeable: BTreeSet<&str> = BTreeSet::new();
    for r in extracted {
        let Some(a) = by_id.get(r.source_id.as_str()) else { continue };
        let row = rows.get_mut(a.journal.as_str()).expect("journal row");
        match r.kind {
            StatisticKind::PValue => row.p_values += 1,
            StatisticKind::ConfidenceInterval => row.confidence_intervals += 1,
        }
        if scrapeable.insert(a.id.as_str()) {
            row.scrapeable += 1;
        }
    }
    let rows: Vec<SummaryRow> = rows.into_values().collect();
    let mut total = SummaryRow {
        journal: "Total".into(),
        ..Default::default()
    };
    for r in &rows {
        total.abstracts += r.abstracts;
        total.ct_or_rct += r.ct_or_rct;
        total.scrapeable += r.scrapeable;
        total.p_values += r.p_values;
        total.confidence_intervals += r.confidence_intervals;
    }
    CorpusSummary { rows, total }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    JsonLines,
    Delimited(u8),
}

impl CorpusFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()) {
            Some(e) if e == "csv" => CorpusFormat::Delimited(b','),
            Some(e) if e == "tsv" || e == "tab" => CorpusFormat::Delimited(b'\t'),
            _ => CorpusFormat::JsonLines,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusLoad {
    pub records: Vec<AbstractRecord>,
    pub errors: Vec<LineError>,
}

#[derive(Deserialize)]
struct RawAbstract {
    id: Option<String>,
    journal: Option<String>,
    year: Option<serde_json::Value>,
    study_type: Option<String>,
    text: Option<String>,
}

impl RawAbstract {
    fn into_record(self) -> Result<AbstractRecord> {
        let missing = |f: &str| domain(format!("missing field `{f}`"));
        let year = match self.year.ok_or_else(|| missing("year"))? {
            serde_json::Value::Number(n) => n.as_i64().ok_or_else(|| domain("year is not an integer"))?,
            serde_json::Value::String(s) => s.trim().parse().map_err(|_| domain(format!("bad year {s:?}")))?,
            other => return Err(domain(format!("bad year {other}"))),
        };
        let record = AbstractRecord {
            id: self.id.ok_or_else(|| missing("id"))?,
            journal: self.journal.ok_or_else(|| missing("journal"))?,
            year: i32::try_from(year).map_err(|_| domain("year out of range"))?,
            study_type: self.study_type.ok_or_else(|| missing("study_type"))?.parse()?,
            text: self.text.ok_or_else(|| missing("text"))?,
        };
        record.validate()?;
        Ok(record)
    }
}

/// Loads a corpus. Unreadable files are fatal; bad lines are collected.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<CorpusLoad> {
    load_corpus_from(File::open(path)?, format)
}

pub fn load_corpus_from<R: Read>(reader: R, format: CorpusFormat) -> Result<CorpusLoad> {
    let mut load = CorpusLoad::default();
    let mut push = |line: usize, raw: std::result::Result<RawAbstract, String>| {
        match raw.and_then(|r| r.into_record().map_err(|e| e.to_string())) {
            Ok(rec) => load.records.push(rec),
            Err(message) => load.errors.push(LineError { line, message }),
        }
    };
    match format {
        CorpusFormat::JsonLines => {
            for (i, line) in BufReader::new(reader).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                push(i + 1, serde_json::from_str(&line).map_err(|e| e.to_string()));
            }
        }
        CorpusFormat::Delimited(delimiter) => {
            let mut rdr = csv::ReaderBuilder::new()
                .delimiter(delimiter)
                .flexible(true)
                .from_reader(reader);
            let headers = match rdr.headers() {
                Ok(h) => h.clone(),
                Err(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => return Err(e.into()),
                Err(e) => return Err(Error::Parse { line: 1, message: e.to_string() }),
            };
            for (i, row) in rdr.records().enumerate() {
                let line = i + 2;
                let raw = row.map_err(|e| e.to_string()).map(|row| {
                    let get = |name: &str| {
                        headers
                            .iter()
                            .position(|h| h == name)
                            .and_then(|k| row.get(k))
                            .map(str::trim)
                            .filter(|s| !s.is_empty())
                            .map(String::from)
                    };
                    RawAbstract {
                        id: get("id"),
                        journal: get("journal"),
                        year: get("year").map(serde_json::Value::String),
                        study_type: get("study_type"),
                        text: get("text"),
                    }
                });
                push(line, raw);
            }
        }
    }
    Ok(load)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(text: &str) -> ExtractionRecord {
        let ex = extract_text("t", text, ExtractOptions::default());
        assert_eq!(ex.records.len(), 1, "{text}: {:?}", ex);
        ex.records.into_iter().next().unwrap()
    }

    fn p_of(r: &ExtractionRecord) -> &PValueReport {
        match &r.parsed {
            Parsed::PValue(p) => p,
            other => panic!("expected p-value, got {other:?}"),
        }
    }

    #[test]
    fn spec_examples() {
        let r = one("the difference was significant (P=0.02)");
        assert_eq!(p_of(&r).style, ReportStyle::Rounded { decimals: 2 });
        assert_eq!(p_of(&r).value, 0.02);
        assert_eq!(r.raw_span, "P=0.02");

        let r = one("p<0.001 for both comparisons");
        assert_eq!(p_of(&r).style, ReportStyle::LessThan);
        assert_eq!(p_of(&r).value, 0.001);

        let r = one("mortality was lower (hazard ratio 0.71; 95% CI 0.55 to 0.92)");
        match r.parsed {
            Parsed::ConfidenceInterval(ci) => {
                assert_eq!(ci.scale, CiScale::Ratio);
                assert_eq!(ci.estimate, Some(0.71));
                assert_eq!((ci.lower, ci.upper, ci.level), (0.55, 0.92, 0.95));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn number_forms() {
        assert_eq!(p_of(&one("p=.03")).value, 0.03);
        assert_eq!(p_of(&one("P = 0·004")).style, ReportStyle::Rounded { decimals: 3 });
        let r = one("p = 1.2e-4");
        assert_eq!(p_of(&r).value, 1.2e-4);
        assert_eq!(p_of(&r).style, ReportStyle::Rounded { decimals: 5 });
        assert_eq!(p_of(&one("P<2×10⁻⁴")).value, 2e-4);
        assert_eq!(p_of(&one("P < 2 x 10-4")).value, 2e-4);
        assert_eq!(p_of(&one("P=3·2×10^-6")).value, 3.2e-6);
    }

    #[test]
    fn greater_than_is_skipped() {
        let ex = extract_text("t", "no difference (p > 0.05).", ExtractOptions::default());
        assert!(ex.records.is_empty());
        assert_eq!(ex.diagnostics.len(), 1);
    }

    #[test]
    fn ci_suppressed_by_p_in_sentence() {
        let ex = extract_text("t", "OR 1.5 (95% CI 1.1 to 2.0; p = 0.01). Risk was 2.1 (95% CI 0.4 to 3.8).", ExtractOptions::default());
        let kinds: Vec<_> = ex.records.iter().map(|r| r.kind).collect();
        assert_eq!(kinds, vec![StatisticKind::PValue, StatisticKind::ConfidenceInterval]);
    }

    #[test]
    fn span_fidelity_with_unicode() {
        let text = "Ärzte fanden – P ≤ 0·05 – und (95% CI −1·2 to −0·3).";
        let ex = extract_text("t", text, ExtractOptions::default());
        for r in &ex.records {
            let tail: String = text.chars().skip(r.position).collect();
            assert!(tail.starts_with(&r.raw_span), "{r:?}");
        }
    }

    #[test]
    fn sentence_split() {
        let s = sentences("A was p<.001. B was fine. c.d. E");
        assert_eq!(s.len(), 3);
        assert_eq!(sentences("").len(), 0);
    }

    #[test]
    fn one_per_abstract_deterministic() {
        let ex = extract_text("a", "p=0.01, p=0.02 and p=0.03", ExtractOptions::default());
        let mut recs = ex.records;
        recs.extend(extract_text("b", "p=0.04", ExtractOptions::default()).records);
        let x = one_per_abstract(&recs, 5);
        assert_eq!(x.len(), 2);
        assert_eq!(x, one_per_abstract(&recs, 5));
        assert_eq!(one_per_abstract(&x, 9), x);
        assert_eq!(x[0].source_id, "a");
    }

    #[test]
    fn corpus_loading() {
        let text = "{\"id\":\"a\",\"journal\":\"J\",\"year\":2001,\"study_type\":\"rct\",\"text\":\"p=0.01\"}\n\
                    {\"journal\":\"J\",\"year\":2001,\"study_type\":\"rct\",\"text\":\"x\"}\n\
                    \n\
                    {\"id\":\"c\",\"journal\":\"J\",\"year\":1800,\"study_type\":\"ct\",\"text\":\"x\"}\n";
        let load = load_corpus_from(text.as_bytes(), CorpusFormat::JsonLines).unwrap();
        assert_eq!(load.records.len(), 1);
        assert_eq!(load.errors.iter().map(|e| e.line).collect::<Vec<_>>(), vec![2, 4]);
        assert!(load_corpus_from(&b""[..], CorpusFormat::JsonLines).unwrap().records.is_empty());

        let tsv = "id\tjournal\tyear\tstudy_type\ttext\nq\tBMJ\t2015\tclinical_trial\tP = .2\n";
        let load = load_corpus_from(tsv.as_bytes(), CorpusFormat::Delimited(b'\t')).unwrap();
        assert_eq!(load.records[0].study_type, StudyType::ClinicalTrial);
        assert!(load.errors.is_empty());
    }

    #[test]
    fn study_type_sets() {
        assert!(StudyType::parse_set("none").unwrap().is_empty());
        assert_eq!(StudyType::parse_set("ct,rct").unwrap().len(), 2);
        assert!(StudyType::parse_set("cohort").is_err());
    }
}
