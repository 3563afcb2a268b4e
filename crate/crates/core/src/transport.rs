//! Ground distance between terms and the transportation distance between
//! mass vectors.
//!
//! The transportation distance is the minimum cost of moving one unit-mass
//! vector onto another when moving mass from term `i` to term `j` costs
//! `ground[i][j]` per unit. On singletons it reduces to the ground distance.

mod simplex;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{ensure_same, vocab, Lexicon, MassVector};

/// Symmetric, zero-diagonal, non-negative distance matrix over a lexicon.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundDistance {
    lexicon: Arc<Lexicon>,
    matrix: Vec<f64>,
}

/// A triple where going through `via` is shorter than the direct distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleViolation {
    pub from: usize,
    pub to: usize,
    pub via: usize,
    pub direct: f64,
    pub detour: f64,
}

impl GroundDistance {
    pub fn new(lexicon: Arc<Lexicon>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = lexicon.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGround(format!(
                "matrix must be {n}x{n} for lexicon `{}`",
                lexicon.name()
            )));
        }
        let matrix: Vec<f64> = rows.into_iter().flatten().collect();
        for i in 0..n {
            for j in 0..n {
                let d = matrix[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidGround(format!("entry ({i}, {j}) = {d} is not a finite non-negative number")));
                }
                if i == j && d != 0.0 {
                    return Err(Error::InvalidGround(format!("diagonal entry {i} is {d}, must be 0")));
                }
                if d != matrix[j * n + i] {
                    return Err(Error::InvalidGround(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { lexicon, matrix })
    }

    pub fn lexicon(&self) -> &Arc<Lexicon> {
        &self.lexicon
    }

    pub fn len(&self) -> usize {
        self.lexicon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lexicon.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.len() + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix.chunks(self.len()).map(<[f64]>::to_vec).collect()
    }

    pub fn max(&self) -> f64 {
        self.matrix.iter().copied().fold(0.0, f64::max)
    }

    /// Every triple with `d(i, j) > d(i, k) + d(k, j) + slack`.
    pub fn triangle_violations(&self, slack: f64) -> Vec<TriangleViolation> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let detour = self.get(i, k) + self.get(k, j);
                    if self.get(i, j) > detour + slack {
                        out.push(TriangleViolation { from: i, to: j, via: k, direct: self.get(i, j), detour });
                    }
                }
            }
        }
        out
    }

    pub fn is_metric(&self) -> bool {
        self.triangle_violations(1e-12).is_empty()
    }

    /// Reorders a matrix given over a permutation of this lexicon's terms.
    pub fn reindexed(lexicon: Arc<Lexicon>, source_terms: &[String], rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = lexicon.len();
        if source_terms.len() != n {
            return Err(Error::InvalidGround(format!(
                "ground lexicon has {} terms, expected {n}",
                source_terms.len()
            )));
        }
        let source = Lexicon::new("ground", source_terms.iter().cloned())?;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGround(format!("matrix must be {n}x{n}")));
        }
        let map: Vec<usize> = lexicon
            .terms()
            .iter()
            .map(|t| source.require(t))
            .collect::<Result<_>>()?;
        let reordered = map
            .iter()
            .map(|&si| map.iter().map(|&sj| rows[si][sj]).collect())
            .collect();
        Self::new(lexicon, reordered)
    }
}

/// Generator parameters for the modal ground distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundParams {
    pub max_dist: f64,
    pub shoulder_min: f64,
    pub elbow_min: f64,
}

impl Default for GroundParams {
    fn default() -> Self {
        Self { max_dist: 3.0, shoulder_min: 1.0, elbow_min: 0.5 }
    }
}

impl GroundParams {
    pub fn build(&self) -> Result<GroundDistance> {
        build_modal_ground_distance(self.max_dist, self.shoulder_min, self.elbow_min)
    }
}

fn opposite(a: &str, b: &str, pairs: &[(&str, &str)]) -> bool {
    pairs.iter().any(|&(x, y)| (a == x && b == y) || (a == y && b == x))
}

/// Adjacency steps between arm terms: 0 same, 1 perpendicular, 2 opposite.
fn arm_steps(a: &str, b: &str) -> u8 {
    if a == b {
        0
    } else if opposite(a, b, &[("down", "up"), ("front", "rear"), ("outside", "inside")]) {
        2
    } else {
        1
    }
}

/// Adjacency steps between forearm terms counted along the lexicon order
/// open, close, hmiddle, vmiddle.
fn forearm_steps(a: &str, b: &str) -> u8 {
    let pos = |t: &str| vocab::FOREARM.iter().position(|&f| f == t).expect("forearm term") as i32;
    (pos(a) - pos(b)).unsigned_abs() as u8
}

const ARM_FAR: u8 = 2;
const FOREARM_FAR: u8 = 3;

/// Ground distance over the 24 modal postures.
///
/// Each modal distance is an arm part plus a forearm part, truncated at
/// `max_dist`. A part at `k >= 1` adjacency steps costs
/// `unit * (1 + (k - 1) * stretch)` with `unit` = `shoulder_min` (arm) or
/// `elbow_min` (forearm). `stretch` is 1 (plain multiples of the unit)
/// unless the untruncated maximum falls short of `max_dist`, in which case
/// the multi-step grades are stretched until the farthest pair reaches it.
/// The result is a metric exactly when no stretching is needed, that is
/// `max_dist <= 2 * shoulder_min + 3 * elbow_min`.
pub fn build_modal_ground_distance(max_dist: f64, shoulder_min: f64, elbow_min: f64) -> Result<GroundDistance> {
    let finite = [max_dist, shoulder_min, elbow_min].iter().all(|v| v.is_finite());
    if !finite || !(0.0 < elbow_min && elbow_min <= shoulder_min && shoulder_min <= max_dist) {
        return Err(Error::InvalidGroundParams(format!(
            "need 0 < elbow_min <= shoulder_min <= max_dist, got {elbow_min}, {shoulder_min}, {max_dist}"
        )));
    }
    let lexicon = vocab::modal_lexicon();
    let parts: Vec<(&str, &str)> = lexicon
        .terms()
        .iter()
        .map(|t| vocab::split_modal(t).expect("modal term decomposes"))
        .collect();

    // Farthest pair: (ARM_FAR - 1) and (FOREARM_FAR - 1) extra steps beyond the first.
    let extra = f64::from(ARM_FAR - 1) * shoulder_min + f64::from(FOREARM_FAR - 1) * elbow_min;
    let stretch = ((max_dist - shoulder_min - elbow_min) / extra).max(1.0);
    let grade = |steps: u8, unit: f64| match steps {
        0 => 0.0,
        k => unit * (1.0 + f64::from(k - 1) * stretch),
    };

    let n = lexicon.len();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (ai, fi) = parts[i];
                    let (aj, fj) = parts[j];
                    let (sa, sf) = (arm_steps(ai, aj), forearm_steps(fi, fj));
                    if sa == ARM_FAR && sf == FOREARM_FAR {
                        max_dist
                    } else {
                        (grade(sa, shoulder_min) + grade(sf, elbow_min)).min(max_dist)
                    }
                })
                .collect()
        })
        .collect();
    GroundDistance::new(lexicon, rows)
}

/// One edge of a transport plan, in term indices of the shared lexicon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub from: usize,
    pub to: usize,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub flows: Vec<Flow>,
    pub total_cost: f64,
}

impl TransportPlan {
    /// Mass leaving each term.
    pub fn source_marginal(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for f in &self.flows {
            out[f.from] += f.mass;
        }
        out
    }

    /// Mass arriving at each term.
    pub fn target_marginal(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for f in &self.flows {
            out[f.to] += f.mass;
        }
        out
    }
}

pub fn transport_distance(a: &MassVector, b: &MassVector, ground: &GroundDistance) -> Result<f64> {
    transport_plan(a, b, ground).map(|p| p.total_cost)
}

pub fn transport_plan(a: &MassVector, b: &MassVector, ground: &GroundDistance) -> Result<TransportPlan> {
    ensure_same(a.lexicon(), b.lexicon())?;
    ensure_same(a.lexicon(), ground.lexicon())?;

    if a.masses() == b.masses() {
        let flows = a
            .support()
            .into_iter()
            .map(|i| Flow { from: i, to: i, mass: a.mass(i) })
            .collect();
        return Ok(TransportPlan { flows, total_cost: 0.0 });
    }

    // Zero-mass terms cannot carry flow, so the solve runs on the supports.
    let rows = a.support();
    let cols = b.support();
    let supply: Vec<f64> = rows.iter().map(|&i| a.mass(i)).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| b.mass(j)).collect();
    let cost: Vec<f64> = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| ground.get(i, j)))
        .collect();

    let flows: Vec<Flow> = simplex::solve(&supply, &demand, &cost)
        .into_iter()
        .map(|(r, c, mass)| Flow { from: rows[r], to: cols[c], mass })
        .collect();
    let total_cost = flows.iter().map(|f| f.mass * ground.get(f.from, f.to)).sum();
    Ok(TransportPlan { flows, total_cost })
}
