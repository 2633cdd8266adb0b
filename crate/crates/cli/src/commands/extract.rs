use std::collections::BTreeMap;

use fdrisk_core::extraction::{
    extract_corpus, filter_study_types, load_corpus, one_per_abstract, summarize, CorpusFormat, CorpusSummary,
    Diagnostic, ExtractOptions, LineError,
};
use fdrisk_core::{write_observations, ObservationRecord, StudyType};
use serde::Serialize;

use super::create_parent;
use crate::args::ExtractArgs;
use crate::error::{CliError, CliResult};
use crate::manifest::{now, write_json, write_manifest, RunInfo};
use crate::table;

#[derive(Serialize)]
struct SummaryFile<'a> {
    run: &'a RunInfo,
    summary: &'a CorpusSummary,
    observations_written: usize,
    load_errors: &'a [LineError],
    diagnostics: &'a [Diagnostic],
}

pub fn render_summary(s: &CorpusSummary) -> String {
    let row = |r: &fdrisk_core::extraction::SummaryRow| {
        vec![
            r.journal.clone(),
            r.abstracts.to_string(),
            r.ct_or_rct.to_string(),
            r.scrapeable.to_string(),
            r.p_values.to_string(),
            r.confidence_intervals.to_string(),
        ]
    };
    let mut rows: Vec<Vec<String>> = s.rows.iter().map(row).collect();
    rows.push(row(&s.total));
    table::render(&["journal", "abstracts", "selected", "scrapeable", "p-values", "CIs"], &rows)
}

pub fn run(args: &ExtractArgs, recorded: &[String]) -> CliResult<()> {
    let started = now();
    let allowed = StudyType::parse_set(&args.types).map_err(|e| CliError::Usage(e.to_string()))?;
    let run = RunInfo::new("extract", recorded, args, Some(args.seed), &[args.corpus.as_path()])?;

    let load = load_corpus(&args.corpus, CorpusFormat::from_path(&args.corpus))?;
    for e in &load.errors {
        eprintln!("warning: {} line {}: {}", args.corpus.display(), e.line, e.message);
    }
    if load.errors.len() > args.max_errors {
        return Err(CliError::Analysis(format!(
            "{} malformed corpus line(s), more than --max-errors {}",
            load.errors.len(),
            args.max_errors
        )));
    }
    if allowed.is_empty() {
        eprintln!("warning: --types {} keeps no study types; writing an empty observation file", args.types);
    }

    let kept = filter_study_types(&load.records, &allowed);
    let options = ExtractOptions {
        exact_equals: args.exact_equals,
    };
    let extraction = extract_corpus(&kept, options);
    for d in &extraction.diagnostics {
        eprintln!("note: {} at {}: {}", d.source_id, d.position, d.message);
    }
    let records = if args.one_per_abstract {
        one_per_abstract(&extraction.records, args.seed)
    } else {
        extraction.records.clone()
    };
    let summary = summarize(&load.records, &allowed, &extraction.records);

    let groups: BTreeMap<&str, _> = kept.iter().map(|a| (a.id.as_str(), a.group_keys())).collect();
    let observations: Vec<ObservationRecord> = records
        .iter()
        .map(|r| r.to_observation_record(groups[r.source_id.as_str()].clone()))
        .collect();
    create_parent(&args.out)?;
    write_observations(&args.out, &observations)?;
    let mut outputs = vec![args.out.clone()];

    print!("{}", render_summary(&summary));
    println!("{} observation(s) written to {}", observations.len(), args.out.display());

    if let Some(path) = &args.summary {
        create_parent(path)?;
        write_json(
            path,
            &SummaryFile {
                run: &run,
                summary: &summary,
                observations_written: observations.len(),
                load_errors: &load.errors,
                diagnostics: &extraction.diagnostics,
            },
        )?;
        outputs.push(path.clone());
    }
    write_manifest(&args.out, &run, &outputs, started)?;
    Ok(())
}
