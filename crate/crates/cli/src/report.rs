//! Serialisable command outputs.

use indexmap::IndexMap;
use posture_core::{AngleQuadruple, DecisionOutcome, OverlapPair, Rationale};
use serde::{Deserialize, Serialize};

/// One line of `fuzzify` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzifiedFrame {
    pub frame: u64,
    pub angles: AngleQuadruple,
    /// Non-zero modal masses.
    pub lfs: IndexMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    /// Line number in the recording.
    pub line: usize,
    pub frame: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<AngleQuadruple>,
    /// Heaviest modal terms, heaviest first.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub top_terms: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<DecisionOutcome>,
    /// Why the frame was skipped.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub frames: usize,
    /// Frame count per rationale tag, plus `skipped`.
    pub counts: IndexMap<String, usize>,
}

impl Summary {
    pub fn new() -> Self {
        let mut counts: IndexMap<String, usize> = Rationale::ALL.iter().map(|r| (r.as_str().to_owned(), 0)).collect();
        counts.insert("skipped".to_owned(), 0);
        Self { frames: 0, counts }
    }

    pub fn record(&mut self, rec: &FrameRecord) {
        self.frames += 1;
        let key = match &rec.outcome {
            Some(o) => o.rationale.as_str(),
            None => "skipped",
        };
        *self.counts.entry(key.to_owned()).or_default() += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub strategy: String,
    pub records: Vec<FrameRecord>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceTable {
    pub names: Vec<String>,
    /// Symmetric, zero diagonal, rows in `names` order.
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub strategy: String,
    pub ground_terms: usize,
    pub ground_is_metric: bool,
    pub triangle_violations: usize,
    pub references: usize,
    pub overlaps: Vec<OverlapPair>,
}
