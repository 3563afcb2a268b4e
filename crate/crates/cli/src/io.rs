//! Loading inputs: configuration, stores, grounds and skeleton recordings.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;
use std::sync::Arc;

use posture_core::config::{parse_store, store_to_json, FrameDoc, GroundDoc, ModelConfig, ModelConfigDoc};
use posture_core::{GroundDistance, Lexicon, ReferencePosture, Skeleton};

use crate::error::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::io("<stdin>", e))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes to stdout; a closed pipe ends output quietly.
pub fn emit(text: &str) -> CliResult<()> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::io("<stdout>", e)),
        _ => Ok(()),
    }
}

pub fn load_config(path: Option<&Path>) -> CliResult<ModelConfig> {
    let Some(path) = path else {
        return Ok(ModelConfig::default());
    };
    let text = read_text(path)?;
    let doc = ModelConfigDoc::from_json(&text).map_err(|e| {
        let msg = format!("{}: {e}", path.display());
        match e {
            // Well-formed JSON with the wrong shape is a configuration problem.
            posture_core::Error::Json(j) if j.classify() == serde_json::error::Category::Data => CliError::Config(msg),
            _ => CliError::Parse(msg),
        }
    })?;
    doc.resolve().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn load_store(path: &Path, lexicon: &Arc<Lexicon>) -> CliResult<Vec<ReferencePosture>> {
    let text = read_text(path)?;
    parse_store(&text, lexicon).map_err(|e| match e {
        posture_core::Error::Json(_) => CliError::Parse(format!("{}: {e}", path.display())),
        other => CliError::Data(format!("{}: {other}", path.display())),
    })
}

/// Missing store files read as empty.
pub fn load_store_or_empty(path: &Path, lexicon: &Arc<Lexicon>) -> CliResult<Vec<ReferencePosture>> {
    if path.exists() {
        load_store(path, lexicon)
    } else {
        Ok(Vec::new())
    }
}

pub fn save_store(path: &Path, refs: &[ReferencePosture]) -> CliResult<()> {
    let mut text = store_to_json(refs);
    text.push('\n');
    write_text(path, &text)
}

/// Ground from `--ground`, otherwise from the configured generator.
pub fn load_ground(path: Option<&Path>, config: &ModelConfig) -> CliResult<GroundDistance> {
    let lexicon = config.model.modal_lexicon();
    let ground = match path {
        Some(p) => {
            let text = read_text(p)?;
            let doc: GroundDoc =
                serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?;
            doc.build(lexicon).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => {
            let g = config.ground.build().map_err(|e| CliError::Config(e.to_string()))?;
            if !g.lexicon().same_terms(lexicon) {
                return Err(CliError::Config(
                    "generated ground covers the built-in modal lexicon; pass --ground for a custom modal table".into(),
                ));
            }
            g
        }
    };
    let violations = ground.triangle_violations(1e-12);
    if let Some(v) = violations.first() {
        eprintln!(
            "warning: ground distance violates the triangle inequality at {} triple(s), e.g. d({}, {}) = {} > {} via {}",
            violations.len(),
            lexicon.term(v.from),
            lexicon.term(v.to),
            v.direct,
            v.detour,
            lexicon.term(v.via)
        );
    }
    Ok(ground)
}

/// One parsed line of a recording.
pub struct Frame {
    pub line: usize,
    pub frame: u64,
    pub skeleton: Skeleton,
}

/// A line that could not be parsed.
pub struct BadLine {
    pub line: usize,
    pub message: String,
}

/// Parses a JSON-lines recording; blank lines are ignored.
pub fn parse_frames(text: &str) -> Vec<Result<Frame, BadLine>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let line = i + 1;
            serde_json::from_str::<FrameDoc>(l)
                .map(|doc| Frame { line, frame: doc.frame, skeleton: doc.skeleton() })
                .map_err(|e| BadLine { line, message: format!("line {line}: malformed frame: {e}") })
        })
        .collect()
}
