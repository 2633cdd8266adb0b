//! Observation exchange format.
//!
//! One record per reported statistic, as JSON lines or as CSV/TSV with a
//! header row. Field names:
//!
//! | field       | kinds                      | meaning                               |
//! |-------------|----------------------------|---------------------------------------|
//! | `source_id` | all                        | abstract or study identifier          |
//! | `kind`      | all                        | `p_exact`, `p_rounded`, `p_less`, `p_less_equal`, `ci` |
//! | `value`     | `p_*`                      | the reported p-value                  |
//! | `decimals`  | `p_rounded`                | printed decimals                      |
//! | `estimate`  | `ci` (optional)            | point estimate                        |
//! | `lower`, `upper`, `level` | `ci`         | interval bounds and coverage (0.95)   |
//! | `scale`     | `ci`                       | `additive` or `ratio`                 |
//!
//! JSON lines carry group keys in a `groups` object; in CSV every other
//! column is a group key. Unknown kinds are rejected.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::observations::{
    ci_to_z, to_z_observation, CiScale, ConfidenceIntervalReport, GroupKeys, PValueReport, ReportStyle, ZObservation,
};

pub const CSV_COLUMNS: [&str; 9] = [
    "source_id",
    "kind",
    "value",
    "decimals",
    "estimate",
    "lower",
    "upper",
    "level",
    "scale",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationKind {
    PExact,
    PRounded,
    PLess,
    PLessEqual,
    Ci,
}

impl ObservationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObservationKind::PExact => "p_exact",
            ObservationKind::PRounded => "p_rounded",
            ObservationKind::PLess => "p_less",
            ObservationKind::PLessEqual => "p_less_equal",
            ObservationKind::Ci => "ci",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "p_exact" => Ok(ObservationKind::PExact),
            "p_rounded" => Ok(ObservationKind::PRounded),
            "p_less" => Ok(ObservationKind::PLess),
            "p_less_equal" => Ok(ObservationKind::PLessEqual),
            "ci" => Ok(ObservationKind::Ci),
            other => Err(domain(format!("unknown observation kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_id: Option<String>,
    pub kind: ObservationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decimals: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<CiScale>,
    #[serde(default, skip_serializing_if = "GroupKeys::is_empty")]
    pub groups: GroupKeys,
}

/// A parsed record.
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    PValue(PValueReport),
    Interval {
        ci: ConfidenceIntervalReport,
        source_id: Option<String>,
        group_keys: GroupKeys,
    },
}

impl Observation {
    pub fn source_id(&self) -> Option<&str> {
        match self {
            Observation::PValue(p) => p.source_id.as_deref(),
            Observation::Interval { source_id, .. } => source_id.as_deref(),
        }
    }

    pub fn group_keys(&self) -> &GroupKeys {
        match self {
            Observation::PValue(p) => &p.group_keys,
            Observation::Interval { group_keys, .. } => group_keys,
        }
    }

    pub fn to_z(&self, two_sided: bool) -> Result<ZObservation> {
        match self {
            Observation::PValue(p) => to_z_observation(p, two_sided),
            Observation::Interval {
                ci,
                source_id,
                group_keys,
            } => {
                let mut z = ci_to_z(ci)?;
                z.source_id = source_id.clone();
                z.group_keys = group_keys.clone();
                Ok(z)
            }
        }
    }
}

impl ObservationRecord {
    fn empty(kind: ObservationKind) -> Self {
        ObservationRecord {
            source_id: None,
            kind,
            value: None,
            decimals: None,
            estimate: None,
            lower: None,
            upper: None,
            level: None,
            scale: None,
            groups: GroupKeys::new(),
        }
    }

    pub fn from_p(report: &PValueReport) -> Self {
        let (kind, decimals) = match report.style {
            ReportStyle::Exact => (ObservationKind::PExact, None),
            ReportStyle::Rounded { decimals } => (ObservationKind::PRounded, Some(decimals)),
            ReportStyle::LessThan => (ObservationKind::PLess, None),
            ReportStyle::LessEqual => (ObservationKind::PLessEqual, None),
        };
        ObservationRecord {
            source_id: report.source_id.clone(),
            value: Some(report.value),
            decimals,
            groups: report.group_keys.clone(),
            ..Self::empty(kind)
        }
    }

    pub fn from_ci(ci: &ConfidenceIntervalReport, source_id: Option<String>, groups: GroupKeys) -> Self {
        ObservationRecord {
            source_id,
            estimate: ci.estimate,
            lower: Some(ci.lower),
            upper: Some(ci.upper),
            level: Some(ci.level),
            scale: Some(ci.scale),
            groups,
            ..Self::empty(ObservationKind::Ci)
        }
    }

    pub fn from_observation(obs: &Observation) -> Self {
        match obs {
            Observation::PValue(p) => Self::from_p(p),
            Observation::Interval {
                ci,
                source_id,
                group_keys,
            } => Self::from_ci(ci, source_id.clone(), group_keys.clone()),
        }
    }

    pub fn to_observation(&self) -> Result<Observation> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| domain(format!("{} record needs `{name}`", self.kind.as_str())));
        let style = match self.kind {
            ObservationKind::Ci => {
                let ci = ConfidenceIntervalReport::new(
                    self.estimate,
                    need(self.lower, "lower")?,
                    need(self.upper, "upper")?,
                    self.level.unwrap_or(0.95),
                    self.scale.unwrap_or(CiScale::Additive),
                )?;
                return Ok(Observation::Interval {
                    ci,
                    source_id: self.source_id.clone(),
                    group_keys: self.groups.clone(),
                });
            }
            ObservationKind::PExact => ReportStyle::Exact,
            ObservationKind::PRounded => ReportStyle::Rounded {
                decimals: self
                    .decimals
                    .ok_or_else(|| domain("p_rounded record needs `decimals`"))?,
            },
            ObservationKind::PLess => ReportStyle::LessThan,
            ObservationKind::PLessEqual => ReportStyle::LessEqual,
        };
        let mut report = PValueReport::new(need(self.value, "value")?, style)?;
        report.source_id = self.source_id.clone();
        report.group_keys = self.groups.clone();
        Ok(Observation::PValue(report))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    JsonLines,
    Csv,
    Tsv,
}

impl TableFormat {
    /// `.csv` and `.tsv` by extension, JSON lines otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()) {
            Some(e) if e == "csv" => TableFormat::Csv,
            Some(e) if e == "tsv" || e == "tab" => TableFormat::Tsv,
            _ => TableFormat::JsonLines,
        }
    }

    fn delimiter(self) -> u8 {
        if self == TableFormat::Tsv {
            b'\t'
        } else {
            b','
        }
    }
}

pub fn read_observations(path: &Path) -> Result<Vec<Observation>> {
    let file = File::open(path)?;
    read_observations_from(file, TableFormat::from_path(path))
}

pub fn read_observations_from<R: Read>(reader: R, format: TableFormat) -> Result<Vec<Observation>> {
    let records = match format {
        TableFormat::JsonLines => read_jsonl(reader)?,
        TableFormat::Csv | TableFormat::Tsv => read_delimited(reader, format.delimiter())?,
    };
    records
        .into_iter()
        .map(|(line, rec)| {
            rec.to_observation().map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

fn read_jsonl<R: Read>(reader: R) -> Result<Vec<(usize, ObservationRecord)>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ObservationRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, rec));
    }
    Ok(out)
}

fn read_delimited<R: Read>(reader: R, delimiter: u8) -> Result<Vec<(usize, ObservationRecord)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if !headers.iter().any(|h| h == "kind") {
        return Err(Error::Parse {
            line: 1,
            message: "header has no `kind` column".into(),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row?;
        let parse_err = |message: String| Error::Parse { line, message };
        let mut rec = ObservationRecord::empty(ObservationKind::PExact);
        for (name, cell) in headers.iter().zip(row.iter()) {
            let cell = cell.trim();
            if cell.is_empty() {
                continue;
            }
            let num = || {
                cell.parse::<f64>()
                    .map_err(|_| parse_err(format!("column {name}: not a number: {cell:?}")))
            };
            match name {
                "source_id" => rec.source_id = Some(cell.to_string()),
                "kind" => rec.kind = ObservationKind::parse(cell).map_err(|e| parse_err(e.to_string()))?,
                "value" => rec.value = Some(num()?),
                "decimals" => {
                    rec.decimals = Some(
                        cell.parse()
                            .map_err(|_| parse_err(format!("decimals: not an integer: {cell:?}")))?,
                    )
                }
                "estimate" => rec.estimate = Some(num()?),
                "lower" => rec.lower = Some(num()?),
                "upper" => rec.upper = Some(num()?),
                "level" => rec.level = Some(num()?),
                "scale" => {
                    rec.scale = Some(match cell {
                        "additive" => CiScale::Additive,
                        "ratio" => CiScale::Ratio,
                        _ => return Err(parse_err(format!("unknown scale {cell:?}"))),
                    })
                }
                group => {
                    rec.groups.insert(group.to_string(), cell.to_string());
                }
            }
        }
        if row.get(headers.iter().position(|h| h == "kind").unwrap()).map(str::trim) == Some("") {
            return Err(parse_err("missing kind".into()));
        }
        out.push((line, rec));
    }
    Ok(out)
}

pub fn write_observations(path: &Path, records: &[ObservationRecord]) -> Result<()> {
    let file = File::create(path)?;
    write_observations_to(file, records, TableFormat::from_path(path))
}

pub fn write_observations_to<W: Write>(mut writer: W, records: &[ObservationRecord], format: TableFormat) -> Result<()> {
    match format {
        TableFormat::JsonLines => {
            for r in records {
                serde_json::to_writer(&mut writer, r)?;
                writer.write_all(b"\n")?;
            }
            writer.flush()?;
        }
        TableFormat::Csv | TableFormat::Tsv => {
            let group_names: std::collections::BTreeSet<&String> =
                records.iter().flat_map(|r| r.groups.keys()).collect();
            let mut w = csv::WriterBuilder::new()
                .delimiter(format.delimiter())
                .from_writer(writer);
            let mut header: Vec<&str> = CSV_COLUMNS.to_vec();
            header.extend(group_names.iter().map(|s| s.as_str()));
            w.write_record(&header)?;
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            for r in records {
                let mut row = vec![
                    r.source_id.clone().unwrap_or_default(),
                    r.kind.as_str().to_string(),
                    opt(r.value),
                    r.decimals.map(|d| d.to_string()).unwrap_or_default(),
                    opt(r.estimate),
                    opt(r.lower),
                    opt(r.upper),
                    opt(r.level),
                    match r.scale {
                        Some(CiScale::Additive) => "additive".into(),
                        Some(CiScale::Ratio) => "ratio".into(),
                        None => String::new(),
                    },
                ];
                row.extend(group_names.iter().map(|g| r.groups.get(*g).cloned().unwrap_or_default()));
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
