use std::fmt::Write;
use std::path::Path;

use posture_core::{
    learn_reference, transport_distance, validate_tolerances, ActionClass, MassVector, OverlapMode, Recognizer,
    ReferencePosture, Strategy,
};

use crate::error::{CliError, CliResult};
use crate::io::{self, Frame};
use crate::report::{DistanceTable, FrameRecord, FuzzifiedFrame, RunReport, Summary, ValidationReport};

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialise")
}

/// A frame left out of the run.
pub struct Skipped {
    line: usize,
    frame: Option<u64>,
    reason: String,
}

/// Measures each frame of a recording. Bad frames abort the run unless
/// `skip` is set, in which case they come back as [`Skipped`].
fn process_frames<T>(
    input: &Path,
    skip: bool,
    mut measure: impl FnMut(&Frame) -> posture_core::Result<T>,
) -> CliResult<Vec<Result<T, Skipped>>> {
    let text = io::read_text(input)?;
    let mut out = Vec::new();
    for item in io::parse_frames(&text) {
        match item {
            Ok(frame) => match measure(&frame) {
                Ok(v) => out.push(Ok(v)),
                Err(e) => {
                    let msg = format!("frame {} (line {}): {e}", frame.frame, frame.line);
                    if !skip {
                        return Err(CliError::Data(msg));
                    }
                    eprintln!("warning: skipping {msg}");
                    out.push(Err(Skipped { line: frame.line, frame: Some(frame.frame), reason: e.to_string() }));
                }
            },
            Err(bad) => {
                if !skip {
                    return Err(CliError::Parse(bad.message));
                }
                eprintln!("warning: skipping {}", bad.message);
                out.push(Err(Skipped { line: bad.line, frame: None, reason: bad.message }));
            }
        }
    }
    Ok(out)
}

pub fn fuzzify(config: Option<&Path>, input: &Path, skip: bool) -> CliResult<()> {
    let config = io::load_config(config)?;
    let model = &config.model;
    let lines = process_frames(input, skip, |frame| {
        let angles = posture_core::joints_to_angles(&frame.skeleton)?;
        let lfs = model.measure_angles(&angles)?;
        Ok(to_json(&FuzzifiedFrame { frame: frame.frame, angles, lfs: lfs.to_term_map() }))
    })?;
    let mut out = String::new();
    for line in lines.into_iter().flatten() {
        out.push_str(&line);
        out.push('\n');
    }
    io::emit(&out)
}

pub struct LearnArgs {
    pub name: String,
    pub tolerance: f64,
    pub action_class: ActionClass,
    pub action_id: String,
}

pub fn learn(config: Option<&Path>, input: &Path, store: &Path, args: LearnArgs, skip: bool) -> CliResult<()> {
    if !args.tolerance.is_finite() || args.tolerance < 0.0 {
        return Err(CliError::Data(format!("tolerance must be finite and non-negative, got {}", args.tolerance)));
    }
    let config = io::load_config(config)?;
    let lexicon = config.model.modal_lexicon().clone();
    let mut refs = io::load_store_or_empty(store, &lexicon)?;

    let samples: Vec<MassVector> =
        process_frames(input, skip, |frame| config.model.measure(&frame.skeleton))?.into_iter().flatten().collect();
    if samples.is_empty() {
        return Err(CliError::Data(format!("{}: no usable frames", input.display())));
    }
    let learned = learn_reference(&samples, &args.name, args.tolerance, args.action_class, &args.action_id)
        .map_err(|e| CliError::Data(e.to_string()))?;
    match refs.iter_mut().find(|r| r.name == args.name) {
        Some(slot) => *slot = learned,
        None => refs.push(learned),
    }
    io::save_store(store, &refs)?;
    eprintln!("learned `{}` from {} frame(s); store holds {} reference(s)", args.name, samples.len(), refs.len());
    Ok(())
}

pub struct DecideArgs {
    pub strategy: Option<Strategy>,
    pub json: bool,
    pub skip_bad_frames: bool,
    pub top: usize,
}

pub fn decide(config: Option<&Path>, input: &Path, store: &Path, ground: Option<&Path>, args: DecideArgs) -> CliResult<()> {
    let config = io::load_config(config)?;
    let refs = io::load_store(store, config.model.modal_lexicon())?;
    let ground = io::load_ground(ground, &config)?;
    let mut decision = config.decision.clone();
    if let Some(s) = args.strategy {
        decision.strategy = s;
    }
    let strategy = decision.strategy;
    let recognizer = Recognizer::new(refs, ground, decision).map_err(|e| CliError::Config(e.to_string()))?;

    let records: Vec<FrameRecord> = process_frames(input, args.skip_bad_frames, |frame| {
        let angles = posture_core::joints_to_angles(&frame.skeleton)?;
        let lfs = config.model.measure_angles(&angles)?;
        let outcome = recognizer.decide(&lfs)?;
        Ok(FrameRecord {
            line: frame.line,
            frame: Some(frame.frame),
            angles: Some(angles),
            top_terms: lfs.top_k(args.top).into_iter().map(|(t, m)| (t.to_owned(), m)).collect(),
            outcome: Some(outcome),
            skipped: None,
        })
    })?
    .into_iter()
    .map(|r| {
        r.unwrap_or_else(|s| FrameRecord {
            line: s.line,
            frame: s.frame,
            angles: None,
            top_terms: Vec::new(),
            outcome: None,
            skipped: Some(s.reason),
        })
    })
    .collect();

    let mut summary = Summary::new();
    for r in &records {
        summary.record(r);
    }
    let report = RunReport { strategy: strategy.as_str().to_owned(), records, summary };
    let text = if args.json { pretty(&report) } else { render_report(&report) };
    io::emit(&text)
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

fn render_report(report: &RunReport) -> String {
    let mut out = String::new();
    for r in &report.records {
        let frame = r.frame.map_or_else(|| format!("line {}", r.line), |f| format!("frame {f}"));
        let Some(o) = &r.outcome else {
            let _ = writeln!(out, "{frame}: skipped ({})", r.skipped.as_deref().unwrap_or(""));
            continue;
        };
        let recognized = if o.recognized.is_empty() { "-".to_owned() } else { o.recognized.join(",") };
        let action = o.chosen_action.as_deref().unwrap_or("-");
        let distances: Vec<String> = o.distances.iter().map(|(n, d)| format!("{n}={d:.4}")).collect();
        let _ = writeln!(
            out,
            "{frame}: {} recognized={recognized} action={action} [{}]",
            o.rationale.as_str(),
            distances.join(" ")
        );
    }
    let counts: Vec<String> = report.summary.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(out, "{} frame(s), strategy {}: {}", report.summary.frames, report.strategy, counts.join(" "));
    out
}

fn distance_table(refs: &[ReferencePosture], ground: &posture_core::GroundDistance) -> CliResult<DistanceTable> {
    let n = refs.len();
    let mut matrix = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = transport_distance(&refs[i].lfs, &refs[j].lfs, ground).map_err(|e| CliError::Data(e.to_string()))?;
            matrix[i][j] = d;
            matrix[j][i] = d;
        }
    }
    Ok(DistanceTable { names: refs.iter().map(|r| r.name.clone()).collect(), matrix })
}

pub fn distance(config: Option<&Path>, store: &Path, ground: Option<&Path>, json: bool) -> CliResult<()> {
    let config = io::load_config(config)?;
    let refs = io::load_store(store, config.model.modal_lexicon())?;
    if refs.len() < 2 {
        return Err(CliError::Data(format!("{}: need at least two references, found {}", store.display(), refs.len())));
    }
    let ground = io::load_ground(ground, &config)?;
    let table = distance_table(&refs, &ground)?;
    let text = if json { pretty(&table) } else { render_table(&table) };
    io::emit(&text)
}

fn render_table(table: &DistanceTable) -> String {
    let width = table.names.iter().map(String::len).max().unwrap_or(0).max(8);
    let mut out = format!("{:width$}", "");
    for name in &table.names {
        let _ = write!(out, "  {name:>width$}");
    }
    out.push('\n');
    for (name, row) in table.names.iter().zip(&table.matrix) {
        let _ = write!(out, "{name:width$}");
        for d in row {
            let _ = write!(out, "  {d:>width$.4}");
        }
        out.push('\n');
    }
    out
}

pub fn validate(
    config: Option<&Path>,
    store: Option<&Path>,
    ground: Option<&Path>,
    strategy: Option<Strategy>,
    json: bool,
) -> CliResult<()> {
    let config = io::load_config(config)?;
    let ground = io::load_ground(ground, &config)?;
    let strategy = strategy.unwrap_or(config.decision.strategy);
    let refs = match store {
        Some(p) => io::load_store(p, config.model.modal_lexicon())?,
        None => Vec::new(),
    };
    let overlaps =
        validate_tolerances(&refs, &ground, OverlapMode::Overlap).map_err(|e| CliError::Data(e.to_string()))?;
    let mut names = std::collections::HashSet::new();
    if let Some(dup) = refs.iter().find(|r| !names.insert(r.name.as_str())) {
        return Err(CliError::Data(format!("duplicate reference `{}`", dup.name)));
    }
    let report = ValidationReport {
        strategy: strategy.as_str().to_owned(),
        ground_terms: ground.len(),
        ground_is_metric: ground.is_metric(),
        triangle_violations: ground.triangle_violations(1e-12).len(),
        references: refs.len(),
        overlaps,
    };
    io::emit(&if json { pretty(&report) } else { render_validation(&report) })?;
    if strategy.overlap_mode() == OverlapMode::Strict && !report.overlaps.is_empty() {
        return Err(CliError::Config(format!(
            "{} overlapping tolerance pair(s) under {}",
            report.overlaps.len(),
            strategy.as_str()
        )));
    }
    Ok(())
}

fn render_validation(report: &ValidationReport) -> String {
    let mut out = format!("ground: {} terms, metric: {}\n", report.ground_terms, report.ground_is_metric);
    if report.triangle_violations > 0 {
        let _ = writeln!(out, "ground: {} triangle violation(s)", report.triangle_violations);
    }
    let _ = writeln!(out, "references: {}", report.references);
    for p in &report.overlaps {
        let _ = writeln!(
            out,
            "overlap: {} / {} at distance {:.4} < tolerance sum {:.4}",
            p.first, p.second, p.distance, p.tolerance_sum
        );
    }
    out
}
