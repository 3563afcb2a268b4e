//! Choosing an action from a measured modal-posture LFS.
//!
//! Every strategy works on the transportation distances between the
//! measurement and each reference posture. A reference "contains" the
//! measurement when that distance is at most its tolerance radius.

use std::cmp::Ordering;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{ensure_same, MassVector};
use crate::posture::{ActionClass, ReferencePosture};
use crate::transport::{transport_distance, GroundDistance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Closest reference wins.
    #[default]
    Nearest,
    /// Non-overlapping tolerance balls; zero or one reference.
    ToleranceStrict,
    /// Every reference whose ball contains the measurement.
    ToleranceOverlap,
    /// An in-tolerance emergency reference beats any classical one.
    EmergencyPriority,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Nearest => "nearest",
            Strategy::ToleranceStrict => "tolerance_strict",
            Strategy::ToleranceOverlap => "tolerance_overlap",
            Strategy::EmergencyPriority => "emergency_priority",
        }
    }

    pub fn overlap_mode(self) -> OverlapMode {
        match self {
            Strategy::ToleranceStrict => OverlapMode::Strict,
            _ => OverlapMode::Overlap,
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "nearest" => Ok(Self::Nearest),
            "tolerance_strict" => Ok(Self::ToleranceStrict),
            "tolerance_overlap" => Ok(Self::ToleranceOverlap),
            "emergency_priority" => Ok(Self::EmergencyPriority),
            other => Err(format!(
                "unknown strategy `{other}` (expected nearest, tolerance_strict, tolerance_overlap, emergency_priority)"
            )),
        }
    }
}

/// Order used between references at equal distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    Lexicographic,
    InputOrder,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionConfig {
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub tie_break: TieBreak,
    /// Abstain under `nearest` when the closest reference is farther than this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_distance: Option<f64>,
    /// Only references of this class take part in the decision.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub only_class: Option<ActionClass>,
}

impl DecisionConfig {
    pub fn new(strategy: Strategy) -> Self {
        Self { strategy, ..Self::default() }
    }
}

/// Which situation produced the outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationale {
    /// Closest reference selected.
    Closest,
    /// Measurement outside every tolerance volume.
    OutsideTolerance,
    /// Measurement inside exactly one tolerance volume.
    WithinTolerance,
    /// Several tolerance volumes contain the measurement; no single action.
    PartialDecision,
    /// An emergency reference contains the measurement.
    Emergency,
}

impl Rationale {
    pub const ALL: [Rationale; 5] = [
        Rationale::Closest,
        Rationale::OutsideTolerance,
        Rationale::WithinTolerance,
        Rationale::PartialDecision,
        Rationale::Emergency,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Rationale::Closest => "closest",
            Rationale::OutsideTolerance => "outside_tolerance",
            Rationale::WithinTolerance => "within_tolerance",
            Rationale::PartialDecision => "partial_decision",
            Rationale::Emergency => "emergency",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionOutcome {
    /// Recognised references, closest first.
    pub recognized: Vec<String>,
    pub chosen_action: Option<String>,
    /// Distance to every supplied reference, in input order.
    pub distances: IndexMap<String, f64>,
    pub rationale: Rationale,
}

pub fn decide_from_distances(
    distances: &IndexMap<String, f64>,
    refs: &[ReferencePosture],
    config: &DecisionConfig,
) -> Result<DecisionOutcome> {
    if refs.is_empty() {
        return Err(Error::EmptyReferences);
    }
    let mut table = IndexMap::with_capacity(refs.len());
    for r in refs {
        let d = *distances.get(&r.name).ok_or_else(|| Error::MissingDistance(r.name.clone()))?;
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::InvalidDistance { name: r.name.clone(), value: d });
        }
        if table.insert(r.name.clone(), d).is_some() {
            return Err(Error::DuplicateReference(r.name.clone()));
        }
    }

    // Candidates sorted closest first, ties by the configured rule.
    let mut order: Vec<usize> = (0..refs.len())
        .filter(|&i| config.only_class.is_none_or(|c| refs[i].action_class == c))
        .collect();
    if order.is_empty() {
        return Err(Error::EmptyReferences);
    }
    let dist = |i: usize| table[i];
    order.sort_by(|&a, &b| {
        dist(a).total_cmp(&dist(b)).then_with(|| match config.tie_break {
            TieBreak::Lexicographic => refs[a].name.cmp(&refs[b].name),
            TieBreak::InputOrder => Ordering::Equal,
        })
    });
    let inside = |i: &usize| dist(*i) <= refs[*i].tolerance;

    let (recognized, rationale): (Vec<usize>, Rationale) = match config.strategy {
        Strategy::Nearest => {
            let best = order[0];
            match config.max_distance {
                Some(cap) if dist(best) > cap => (vec![], Rationale::OutsideTolerance),
                _ => (vec![best], Rationale::Closest),
            }
        }
        Strategy::ToleranceStrict => {
            let hits: Vec<usize> = order.iter().copied().filter(inside).collect();
            if hits.len() > 1 {
                let pairs = pairs_of(&hits, refs);
                return Err(Error::OverlappingTolerances(pairs));
            }
            tolerance_outcome(hits)
        }
        Strategy::ToleranceOverlap => tolerance_outcome(order.iter().copied().filter(inside).collect()),
        Strategy::EmergencyPriority => {
            match order.iter().copied().find(|i| refs[*i].is_emergency() && inside(i)) {
                Some(e) => (vec![e], Rationale::Emergency),
                None => tolerance_outcome(
                    order.iter().copied().filter(|i| !refs[*i].is_emergency() && inside(i)).collect(),
                ),
            }
        }
    };

    let chosen_action = match recognized.as_slice() {
        [only] => Some(refs[*only].action_id.clone()),
        _ => None,
    };
    Ok(DecisionOutcome {
        recognized: recognized.iter().map(|&i| refs[i].name.clone()).collect(),
        chosen_action,
        distances: table,
        rationale,
    })
}

fn tolerance_outcome(hits: Vec<usize>) -> (Vec<usize>, Rationale) {
    let rationale = match hits.len() {
        0 => Rationale::OutsideTolerance,
        1 => Rationale::WithinTolerance,
        _ => Rationale::PartialDecision,
    };
    (hits, rationale)
}

fn pairs_of(hits: &[usize], refs: &[ReferencePosture]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (k, &a) in hits.iter().enumerate() {
        for &b in &hits[k + 1..] {
            out.push((refs[a].name.clone(), refs[b].name.clone()));
        }
    }
    out
}

/// Transportation distance from `measured` to every reference.
pub fn reference_distances(
    measured: &MassVector,
    refs: &[ReferencePosture],
    ground: &GroundDistance,
) -> Result<IndexMap<String, f64>> {
    refs.iter()
        .map(|r| {
            ensure_same(measured.lexicon(), r.lfs.lexicon())?;
            Ok((r.name.clone(), transport_distance(measured, &r.lfs, ground)?))
        })
        .collect()
}

pub fn decide(
    measured: &MassVector,
    refs: &[ReferencePosture],
    ground: &GroundDistance,
    config: &DecisionConfig,
) -> Result<DecisionOutcome> {
    let distances = reference_distances(measured, refs, ground)?;
    decide_from_distances(&distances, refs, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMode {
    Strict,
    Overlap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapPair {
    pub first: String,
    pub second: String,
    pub distance: f64,
    pub tolerance_sum: f64,
}

/// Pairs of references whose tolerance volumes overlap, i.e.
/// `d(lfs_i, lfs_j) < tolerance_i + tolerance_j`.
///
/// In strict mode any overlap is returned as [`Error::OverlappingTolerances`].
pub fn validate_tolerances(
    refs: &[ReferencePosture],
    ground: &GroundDistance,
    mode: OverlapMode,
) -> Result<Vec<OverlapPair>> {
    let mut pairs = Vec::new();
    for (i, a) in refs.iter().enumerate() {
        for b in &refs[i + 1..] {
            ensure_same(a.lfs.lexicon(), b.lfs.lexicon())?;
            let distance = transport_distance(&a.lfs, &b.lfs, ground)?;
            let tolerance_sum = a.tolerance + b.tolerance;
            if distance < tolerance_sum {
                pairs.push(OverlapPair { first: a.name.clone(), second: b.name.clone(), distance, tolerance_sum });
            }
        }
    }
    if mode == OverlapMode::Strict && !pairs.is_empty() {
        return Err(Error::OverlappingTolerances(
            pairs.into_iter().map(|p| (p.first, p.second)).collect(),
        ));
    }
    Ok(pairs)
}

/// A validated reference set bound to a ground distance and a strategy.
#[derive(Debug, Clone)]
pub struct Recognizer {
    refs: Vec<ReferencePosture>,
    ground: GroundDistance,
    config: DecisionConfig,
    overlaps: Vec<OverlapPair>,
}

impl Recognizer {
    /// Fails on an empty or duplicated reference set, on lexicon mismatch,
    /// and on overlapping tolerance volumes under the strict strategy.
    pub fn new(refs: Vec<ReferencePosture>, ground: GroundDistance, config: DecisionConfig) -> Result<Self> {
        if refs.is_empty() {
            return Err(Error::EmptyReferences);
        }
        for (i, r) in refs.iter().enumerate() {
            ensure_same(r.lfs.lexicon(), ground.lexicon())?;
            if refs[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::DuplicateReference(r.name.clone()));
            }
        }
        let overlaps = validate_tolerances(&refs, &ground, config.strategy.overlap_mode())?;
        Ok(Self { refs, ground, config, overlaps })
    }

    pub fn references(&self) -> &[ReferencePosture] {
        &self.refs
    }

    pub fn ground(&self) -> &GroundDistance {
        &self.ground
    }

    pub fn config(&self) -> &DecisionConfig {
        &self.config
    }

    /// Overlapping pairs found at construction (always empty under strict).
    pub fn overlaps(&self) -> &[OverlapPair] {
        &self.overlaps
    }

    pub fn decide(&self, measured: &MassVector) -> Result<DecisionOutcome> {
        decide(measured, &self.refs, &self.ground, &self.config)
    }
}
