//! JSON documents: model configuration, partitions, rule tables, ground
//! matrices, reference stores and skeleton frames.

use std::collections::HashMap;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::decision::DecisionConfig;
use crate::error::{Error, Result};
use crate::lexicon::{FuzzyPartition, Lexicon, MassVector};
use crate::posture::{ActionClass, PostureModel, ReferencePosture, RuleTable, Skeleton};
use crate::transport::{GroundDistance, GroundParams};

/// `{"lexicon": [...], "modal_angles": {term: degrees}, "circular": bool}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    pub lexicon: Vec<String>,
    pub modal_angles: IndexMap<String, f64>,
    #[serde(default)]
    pub circular: bool,
}

impl PartitionDoc {
    pub fn build(&self, name: &str) -> Result<FuzzyPartition> {
        let lexicon = Arc::new(Lexicon::new(name, self.lexicon.iter().cloned())?);
        if let Some(extra) = self.modal_angles.keys().find(|k| lexicon.index_of(k).is_none()) {
            return Err(Error::InvalidPartition(format!("modal angle given for unknown term `{extra}`")));
        }
        let angles = lexicon
            .terms()
            .iter()
            .map(|t| {
                self.modal_angles
                    .get(t)
                    .copied()
                    .ok_or_else(|| Error::InvalidPartition(format!("no modal angle for term `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        FuzzyPartition::new(lexicon, angles, self.circular)
    }

    pub fn from_partition(p: &FuzzyPartition) -> Self {
        Self {
            lexicon: p.lexicon().terms().to_vec(),
            modal_angles: p.lexicon().terms().iter().cloned().zip(p.modal_angles().iter().copied()).collect(),
            circular: p.is_circular(),
        }
    }
}

/// `{"rows": [...], "cols": [...], "cells": {"row,col": "out"}}`
///
/// The output lexicon is `outputs` when given, otherwise the distinct cell
/// values in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleTableDoc {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub cells: IndexMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
}

impl RuleTableDoc {
    pub fn build(&self, name: &str) -> Result<RuleTable> {
        let rows = Arc::new(Lexicon::new(format!("{name}.rows"), self.rows.iter().cloned())?);
        let cols = Arc::new(Lexicon::new(format!("{name}.cols"), self.cols.iter().cloned())?);
        let mut cells: HashMap<(String, String), String> = HashMap::new();
        for (key, out) in &self.cells {
            let (r, c) = key
                .split_once(',')
                .ok_or_else(|| Error::InvalidRuleTable(format!("cell key `{key}` is not `row,col`")))?;
            let (r, c) = (r.trim().to_owned(), c.trim().to_owned());
            rows.require(&r)?;
            cols.require(&c)?;
            if cells.insert((r, c), out.clone()).is_some() {
                return Err(Error::InvalidRuleTable(format!("cell `{key}` given twice")));
            }
        }
        let outputs = match &self.outputs {
            Some(o) => o.clone(),
            None => {
                let mut seen: Vec<String> = Vec::new();
                for r in rows.terms() {
                    for c in cols.terms() {
                        if let Some(o) = cells.get(&(r.clone(), c.clone())) {
                            if !seen.contains(o) {
                                seen.push(o.clone());
                            }
                        }
                    }
                }
                seen
            }
        };
        let out = Arc::new(Lexicon::new(name, outputs)?);
        RuleTable::new(rows, cols, out, |r, c| cells.get(&(r.to_owned(), c.to_owned())).cloned())
    }

    pub fn from_table(t: &RuleTable) -> Self {
        let mut cells = IndexMap::new();
        for (ri, r) in t.rows().terms().iter().enumerate() {
            for (ci, c) in t.cols().terms().iter().enumerate() {
                cells.insert(format!("{r},{c}"), t.out().term(t.cell(ri, ci)).to_owned());
            }
        }
        Self {
            rows: t.rows().terms().to_vec(),
            cols: t.cols().terms().to_vec(),
            cells,
            outputs: Some(t.out().terms().to_vec()),
        }
    }
}

/// `{"lexicon": [...], "matrix": [[...]]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundDoc {
    pub lexicon: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl GroundDoc {
    /// Builds the ground over `target`, reordering rows and columns if the
    /// document lists the same terms in another order.
    pub fn build(&self, target: &Arc<Lexicon>) -> Result<GroundDistance> {
        GroundDistance::reindexed(target.clone(), &self.lexicon, self.matrix.clone())
    }

    pub fn from_ground(g: &GroundDistance) -> Self {
        Self { lexicon: g.lexicon().terms().to_vec(), matrix: g.rows() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionsDoc {
    #[serde(default)]
    pub a_theta: Option<PartitionDoc>,
    #[serde(default)]
    pub a_psi: Option<PartitionDoc>,
    #[serde(default)]
    pub f_theta: Option<PartitionDoc>,
    #[serde(default)]
    pub f_psi: Option<PartitionDoc>,
}

/// Model configuration. Every key is optional; missing keys take the
/// built-in defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfigDoc {
    #[serde(default)]
    pub partitions: PartitionsDoc,
    #[serde(default)]
    pub arm_table: Option<RuleTableDoc>,
    #[serde(default)]
    pub forearm_table: Option<RuleTableDoc>,
    #[serde(default)]
    pub modal_table: Option<RuleTableDoc>,
    #[serde(default)]
    pub max_dist: Option<f64>,
    #[serde(default)]
    pub shoulder_min: Option<f64>,
    #[serde(default)]
    pub elbow_min: Option<f64>,
    #[serde(default)]
    pub decision: Option<DecisionConfig>,
}

/// Resolved configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelConfig {
    pub model: PostureModel,
    pub ground: GroundParams,
    pub decision: DecisionConfig,
}

impl ModelConfigDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve(&self) -> Result<ModelConfig> {
        let d = PostureModel::default();
        let part = |doc: &Option<PartitionDoc>, name: &str, fallback: FuzzyPartition| match doc {
            Some(p) => p.build(name),
            None => Ok(fallback),
        };
        let table = |doc: &Option<RuleTableDoc>, name: &str, fallback: RuleTable| match doc {
            Some(t) => t.build(name),
            None => Ok(fallback),
        };
        let model = PostureModel {
            a_theta: part(&self.partitions.a_theta, "a_theta", d.a_theta)?,
            a_psi: part(&self.partitions.a_psi, "a_psi", d.a_psi)?,
            f_theta: part(&self.partitions.f_theta, "f_theta", d.f_theta)?,
            f_psi: part(&self.partitions.f_psi, "f_psi", d.f_psi)?,
            arm_table: table(&self.arm_table, "arm", d.arm_table)?,
            forearm_table: table(&self.forearm_table, "forearm", d.forearm_table)?,
            modal_table: table(&self.modal_table, "modal", d.modal_table)?,
        };
        model.validate()?;
        let g = GroundParams::default();
        let ground = GroundParams {
            max_dist: self.max_dist.unwrap_or(g.max_dist),
            shoulder_min: self.shoulder_min.unwrap_or(g.shoulder_min),
            elbow_min: self.elbow_min.unwrap_or(g.elbow_min),
        };
        ground.build()?;
        Ok(ModelConfig { model, ground, decision: self.decision.clone().unwrap_or_default() })
    }
}

/// Masses either as a dense list in lexicon order or keyed by term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MassesDoc {
    Dense(Vec<f64>),
    ByTerm(IndexMap<String, f64>),
}

impl MassesDoc {
    pub fn build(&self, lexicon: &Arc<Lexicon>) -> Result<MassVector> {
        match self {
            MassesDoc::Dense(v) => MassVector::new(lexicon.clone(), v.clone()),
            MassesDoc::ByTerm(m) => MassVector::from_terms(lexicon.clone(), m.iter().map(|(k, v)| (k.as_str(), *v))),
        }
    }
}

/// One entry of a reference store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceDoc {
    pub name: String,
    pub masses: MassesDoc,
    pub tolerance: f64,
    pub action_class: ActionClass,
    pub action_id: String,
}

impl ReferenceDoc {
    pub fn build(&self, lexicon: &Arc<Lexicon>) -> Result<ReferencePosture> {
        ReferencePosture::new(
            self.name.clone(),
            self.masses.build(lexicon)?,
            self.tolerance,
            self.action_class,
            self.action_id.clone(),
        )
    }

    pub fn from_reference(r: &ReferencePosture) -> Self {
        Self {
            name: r.name.clone(),
            masses: MassesDoc::ByTerm(r.lfs.to_term_map()),
            tolerance: r.tolerance,
            action_class: r.action_class,
            action_id: r.action_id.clone(),
        }
    }
}

pub fn parse_store(text: &str, lexicon: &Arc<Lexicon>) -> Result<Vec<ReferencePosture>> {
    let docs: Vec<ReferenceDoc> = serde_json::from_str(text)?;
    docs.iter().map(|d| d.build(lexicon)).collect()
}

pub fn store_to_json(refs: &[ReferencePosture]) -> String {
    let docs: Vec<ReferenceDoc> = refs.iter().map(ReferenceDoc::from_reference).collect();
    serde_json::to_string_pretty(&docs).expect("store serialises")
}

/// One line of a skeleton recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDoc {
    pub frame: u64,
    pub joints: HashMap<String, [f64; 3]>,
}

impl FrameDoc {
    pub fn skeleton(&self) -> Skeleton {
        Skeleton::new(self.joints.clone())
    }
}
