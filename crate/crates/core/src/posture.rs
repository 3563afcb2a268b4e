//! Skeleton angles, rule-table combination, and reference postures.
//!
//! Angle conventions (body frame built from the skeleton):
//!
//! * `up` is the unit vector from the torso joint to the mid-shoulder point.
//! * `right` is the left-to-right shoulder direction with its `up` component
//!   removed; `front = up × right`.
//! * `a_theta` is the angle between `-up` and the shoulder→elbow segment.
//! * `a_psi` is the azimuth of that segment in the horizontal body plane,
//!   0° toward `front`, -90° toward `right` (outside for the right limb),
//!   +90° toward the body (inside), in `[-180°, 180°)`.
//! * `f_theta` is the interior elbow angle: 180° when the forearm continues
//!   the arm, 0° when folded back onto it.
//! * `f_psi` is the angle between the body vertical and the forearm's
//!   component orthogonal to the arm, in `[0°, 90°]`: 0° vertical, 90°
//!   horizontal.
//!
//! Where an azimuth is undefined (arm along the vertical, forearm along the
//! arm) the angle is reported as 0°; the rule tables make it irrelevant there.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{ensure_same, vocab, FuzzyPartition, Lexicon, MassVector};

pub const REQUIRED_JOINTS: [&str; 5] = ["right_shoulder", "right_elbow", "right_wrist", "torso", "left_shoulder"];

const MIN_SEGMENT: f64 = 1e-6;

/// Joint positions in meters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub joints: HashMap<String, [f64; 3]>,
}

impl Skeleton {
    pub fn new(joints: HashMap<String, [f64; 3]>) -> Self {
        Self { joints }
    }

    pub fn with_joint(mut self, name: &str, position: [f64; 3]) -> Self {
        self.joints.insert(name.to_owned(), position);
        self
    }

    fn joint(&self, name: &str) -> Result<Vec3> {
        let p = self.joints.get(name).ok_or_else(|| Error::MissingJoint(name.to_owned()))?;
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteJoint(name.to_owned()));
        }
        Ok(Vec3(*p))
    }

    pub fn validate(&self) -> Result<()> {
        joints_to_angles(self).map(|_| ())
    }
}

/// The four limb angles, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleQuadruple {
    pub a_theta: f64,
    pub a_psi: f64,
    pub f_theta: f64,
    pub f_psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Vec3([f64; 3]);

impl Vec3 {
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
    fn scale(self, k: f64) -> Vec3 {
        Vec3([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }
    fn dot(self, o: Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }
    fn cross(self, o: Vec3) -> Vec3 {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Vec3([b * z - c * y, c * x - a * z, a * y - b * x])
    }
    fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
    fn unit(self) -> Vec3 {
        self.scale(1.0 / self.norm())
    }
    /// Component orthogonal to the unit vector `axis`.
    fn reject(self, axis: Vec3) -> Vec3 {
        self.sub(axis.scale(self.dot(axis)))
    }
}

/// Unsigned angle between two vectors in degrees.
fn angle_deg(a: Vec3, b: Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b)).to_degrees()
}

pub fn joints_to_angles(skeleton: &Skeleton) -> Result<AngleQuadruple> {
    let shoulder = skeleton.joint("right_shoulder")?;
    let elbow = skeleton.joint("right_elbow")?;
    let wrist = skeleton.joint("right_wrist")?;
    let torso = skeleton.joint("torso")?;
    let left_shoulder = skeleton.joint("left_shoulder")?;

    let arm = elbow.sub(shoulder);
    if arm.norm() <= MIN_SEGMENT {
        return Err(Error::DegenerateSegment("shoulder-elbow"));
    }
    let forearm = wrist.sub(elbow);
    if forearm.norm() <= MIN_SEGMENT {
        return Err(Error::DegenerateSegment("elbow-wrist"));
    }

    let mid_shoulder = shoulder.add(left_shoulder).scale(0.5);
    let trunk = mid_shoulder.sub(torso);
    let lateral = shoulder.sub(left_shoulder);
    if trunk.norm() <= MIN_SEGMENT || lateral.norm() <= MIN_SEGMENT {
        return Err(Error::CollinearFrame);
    }
    let up = trunk.unit();
    let right = lateral.reject(up);
    if right.norm() <= MIN_SEGMENT * lateral.norm().max(1.0) {
        return Err(Error::CollinearFrame);
    }
    let right = right.unit();
    let front = up.cross(right);

    let a_theta = angle_deg(up.scale(-1.0), arm);
    let (along_front, along_right) = (arm.dot(front), arm.dot(right));
    let a_psi = if along_front.hypot(along_right) <= 1e-9 * arm.norm() {
        0.0
    } else {
        wrap_half_open(f64::atan2(-along_right, along_front).to_degrees())
    };

    let f_theta = angle_deg(arm.scale(-1.0), forearm);
    let off_arm = forearm.reject(arm.unit());
    let f_psi = if off_arm.norm() <= 1e-9 * forearm.norm() {
        0.0
    } else {
        angle_deg(up, off_arm).min(angle_deg(up.scale(-1.0), off_arm))
    };

    Ok(AngleQuadruple { a_theta, a_psi, f_theta, f_psi })
}

/// Maps degrees into `[-180, 180)`.
fn wrap_half_open(deg: f64) -> f64 {
    let w = (deg + 180.0).rem_euclid(360.0) - 180.0;
    if w >= 180.0 {
        -180.0
    } else {
        w
    }
}

/// Total map from a (row term, column term) pair to an output term.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleTable {
    rows: Arc<Lexicon>,
    cols: Arc<Lexicon>,
    out: Arc<Lexicon>,
    cells: Vec<usize>,
}

impl RuleTable {
    /// `cell(row, col)` names the output term of each pair.
    pub fn new(
        rows: Arc<Lexicon>,
        cols: Arc<Lexicon>,
        out: Arc<Lexicon>,
        cell: impl Fn(&str, &str) -> Option<String>,
    ) -> Result<Self> {
        let mut cells = Vec::with_capacity(rows.len() * cols.len());
        for r in rows.terms() {
            for c in cols.terms() {
                let term = cell(r, c).ok_or_else(|| Error::InvalidRuleTable(format!("no rule for ({r}, {c})")))?;
                let idx = out
                    .index_of(&term)
                    .ok_or_else(|| Error::InvalidRuleTable(format!("rule ({r}, {c}) yields unknown term `{term}`")))?;
                cells.push(idx);
            }
        }
        Ok(Self { rows, cols, out, cells })
    }

    pub fn rows(&self) -> &Arc<Lexicon> {
        &self.rows
    }

    pub fn cols(&self) -> &Arc<Lexicon> {
        &self.cols
    }

    pub fn out(&self) -> &Arc<Lexicon> {
        &self.out
    }

    pub fn cell(&self, row: usize, col: usize) -> usize {
        self.cells[row * self.cols.len() + col]
    }

    pub fn cell_term(&self, row: &str, col: &str) -> Option<&str> {
        let r = self.rows.index_of(row)?;
        let c = self.cols.index_of(col)?;
        Some(self.out.term(self.cell(r, c)))
    }

    pub fn evaluate(&self, row: &MassVector, col: &MassVector) -> Result<MassVector> {
        evaluate_rule_table(row, col, self)
    }

    /// Arm posture from a-psi (rows) and a-theta (columns).
    pub fn default_arm() -> Self {
        let rows = vocab::a_psi_partition().lexicon().clone();
        let cols = vocab::a_theta_partition().lexicon().clone();
        Self::new(rows, cols, vocab::arm_lexicon(), |psi, theta| {
            Some(if theta == "horizon" { psi } else { theta }.to_owned())
        })
        .expect("built-in arm table is total")
    }

    /// Forearm posture from f-psi (rows) and f-theta (columns).
    pub fn default_forearm() -> Self {
        let rows = vocab::f_psi_partition().lexicon().clone();
        let cols = vocab::f_theta_partition().lexicon().clone();
        Self::new(rows, cols, vocab::forearm_lexicon(), |psi, theta| {
            Some(match (psi, theta) {
                ("vertical", "middle") => "vmiddle".to_owned(),
                ("horizontal", "middle") => "hmiddle".to_owned(),
                (_, t) => t.to_owned(),
            })
        })
        .expect("built-in forearm table is total")
    }

    /// Modal posture from arm (rows) and forearm (columns).
    pub fn default_modal() -> Self {
        Self::new(vocab::arm_lexicon(), vocab::forearm_lexicon(), vocab::modal_lexicon(), |a, f| {
            Some(vocab::modal_name(a, f))
        })
        .expect("built-in modal table is total")
    }
}

/// Product combination: each output term collects `row[r] * col[c]` over
/// the cells that map to it.
pub fn evaluate_rule_table(row: &MassVector, col: &MassVector, table: &RuleTable) -> Result<MassVector> {
    ensure_same(row.lexicon(), &table.rows)?;
    ensure_same(col.lexicon(), &table.cols)?;
    let mut out = vec![0.0; table.out.len()];
    for r in row.support() {
        for c in col.support() {
            out[table.cell(r, c)] += row.mass(r) * col.mass(c);
        }
    }
    MassVector::new(table.out.clone(), out)
}

/// Partitions and rule tables turning a skeleton into a modal-posture LFS.
#[derive(Debug, Clone, PartialEq)]
pub struct PostureModel {
    pub a_theta: FuzzyPartition,
    pub a_psi: FuzzyPartition,
    pub f_theta: FuzzyPartition,
    pub f_psi: FuzzyPartition,
    pub arm_table: RuleTable,
    pub forearm_table: RuleTable,
    pub modal_table: RuleTable,
}

impl Default for PostureModel {
    fn default() -> Self {
        Self {
            a_theta: vocab::a_theta_partition(),
            a_psi: vocab::a_psi_partition(),
            f_theta: vocab::f_theta_partition(),
            f_psi: vocab::f_psi_partition(),
            arm_table: RuleTable::default_arm(),
            forearm_table: RuleTable::default_forearm(),
            modal_table: RuleTable::default_modal(),
        }
    }
}

impl PostureModel {
    /// Checks that partitions and tables chain together.
    pub fn validate(&self) -> Result<()> {
        let links = [
            (self.a_psi.lexicon(), self.arm_table.rows(), "a_psi / arm table rows"),
            (self.a_theta.lexicon(), self.arm_table.cols(), "a_theta / arm table columns"),
            (self.f_psi.lexicon(), self.forearm_table.rows(), "f_psi / forearm table rows"),
            (self.f_theta.lexicon(), self.forearm_table.cols(), "f_theta / forearm table columns"),
            (self.arm_table.out(), self.modal_table.rows(), "arm table output / modal table rows"),
            (self.forearm_table.out(), self.modal_table.cols(), "forearm table output / modal table columns"),
        ];
        for (a, b, what) in links {
            if !a.same_terms(b) {
                return Err(Error::InvalidModel(format!("lexicons differ at {what}")));
            }
        }
        Ok(())
    }

    pub fn modal_lexicon(&self) -> &Arc<Lexicon> {
        self.modal_table.out()
    }

    /// Arm and forearm LFSs for the given angles.
    pub fn limb_parts(&self, angles: &AngleQuadruple) -> Result<(MassVector, MassVector)> {
        let arm = self.arm_table.evaluate(&self.a_psi.fuzzify(angles.a_psi)?, &self.a_theta.fuzzify(angles.a_theta)?)?;
        let forearm =
            self.forearm_table.evaluate(&self.f_psi.fuzzify(angles.f_psi)?, &self.f_theta.fuzzify(angles.f_theta)?)?;
        Ok((arm, forearm))
    }

    pub fn measure_angles(&self, angles: &AngleQuadruple) -> Result<MassVector> {
        let (arm, forearm) = self.limb_parts(angles)?;
        self.modal_table.evaluate(&arm, &forearm)
    }

    pub fn measure(&self, skeleton: &Skeleton) -> Result<MassVector> {
        self.measure_angles(&joints_to_angles(skeleton)?)
    }
}

pub fn measure_posture(skeleton: &Skeleton, model: &PostureModel) -> Result<MassVector> {
    model.measure(skeleton)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionClass {
    Classical,
    Emergency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePosture {
    pub name: String,
    pub lfs: MassVector,
    pub tolerance: f64,
    pub action_class: ActionClass,
    pub action_id: String,
}

impl ReferencePosture {
    pub fn new(
        name: impl Into<String>,
        lfs: MassVector,
        tolerance: f64,
        action_class: ActionClass,
        action_id: impl Into<String>,
    ) -> Result<Self> {
        if !tolerance.is_finite() || tolerance < 0.0 {
            return Err(Error::InvalidTolerance(tolerance));
        }
        Ok(Self { name: name.into(), lfs, tolerance, action_class, action_id: action_id.into() })
    }

    pub fn is_emergency(&self) -> bool {
        self.action_class == ActionClass::Emergency
    }
}

/// Reference LFS is the renormalised arithmetic mean of the samples.
pub fn learn_reference(
    samples: &[MassVector],
    name: impl Into<String>,
    tolerance: f64,
    action_class: ActionClass,
    action_id: impl Into<String>,
) -> Result<ReferencePosture> {
    let first = samples.first().ok_or(Error::EmptySamples)?;
    let lexicon = first.lexicon().clone();
    let mut sum = vec![0.0; lexicon.len()];
    for s in samples {
        ensure_same(&lexicon, s.lexicon())?;
        for (acc, m) in sum.iter_mut().zip(s.masses()) {
            *acc += m;
        }
    }
    let count = samples.len() as f64;
    for v in &mut sum {
        *v /= count;
    }
    let lfs = if samples.iter().all(|s| s.masses() == first.masses()) {
        first.clone()
    } else {
        MassVector::new(lexicon, sum)?
    };
    ReferencePosture::new(name, lfs, tolerance, action_class, action_id)
}
