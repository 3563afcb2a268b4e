//! Lexicons, unit-mass lexical fuzzy subsets, and angle fuzzification.
//!
//! A [`MassVector`] is a lexical fuzzy subset whose membership degrees are
//! read as a basic belief assignment on singletons: one non-negative mass per
//! term, summing to one.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::error::{Error, Result};

/// Ordered set of unique linguistic labels.
#[derive(Clone)]
pub struct Lexicon {
    name: String,
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Lexicon {
    pub fn new<S: Into<String>>(name: impl Into<String>, terms: impl IntoIterator<Item = S>) -> Result<Self> {
        let terms: Vec<String> = terms.into_iter().map(Into::into).collect();
        if terms.is_empty() {
            return Err(Error::EmptyLexicon);
        }
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if t.is_empty() {
                return Err(Error::EmptyTerm);
            }
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::DuplicateTerm(t.clone()));
            }
        }
        Ok(Self { name: name.into(), terms, index })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Always false; lexicons are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn require(&self, term: &str) -> Result<usize> {
        self.index_of(term).ok_or_else(|| Error::UnknownTerm(term.to_owned()))
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    /// Same terms in the same order. The name is a label only.
    pub fn same_terms(&self, other: &Lexicon) -> bool {
        self.terms == other.terms
    }
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.same_terms(other)
    }
}

impl Eq for Lexicon {}

impl fmt::Debug for Lexicon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lexicon")
            .field("name", &self.name)
            .field("terms", &self.terms)
            .finish()
    }
}

pub(crate) fn ensure_same(a: &Lexicon, b: &Lexicon) -> Result<()> {
    if a.same_terms(b) {
        Ok(())
    } else {
        Err(Error::LexiconMismatch { left: a.name.clone(), right: b.name.clone() })
    }
}

/// Unit-mass distribution over the terms of a lexicon.
#[derive(Clone, PartialEq)]
pub struct MassVector {
    lexicon: Arc<Lexicon>,
    masses: Vec<f64>,
}

/// Normalises `masses` to unit sum over `lexicon`.
pub fn make_mass_vector(lexicon: &Arc<Lexicon>, masses: &[f64]) -> Result<MassVector> {
    MassVector::new(lexicon.clone(), masses.to_vec())
}

impl MassVector {
    pub fn new(lexicon: Arc<Lexicon>, mut masses: Vec<f64>) -> Result<Self> {
        if masses.len() != lexicon.len() {
            return Err(Error::DimensionMismatch { expected: lexicon.len(), got: masses.len() });
        }
        for (index, &value) in masses.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteMass(index));
            }
            if value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        // Already unit up to rounding: keep the input bits so stored vectors round-trip.
        if (total - 1.0).abs() > masses.len() as f64 * f64::EPSILON {
            for m in &mut masses {
                *m /= total;
            }
        }
        Ok(Self { lexicon, masses })
    }

    pub fn singleton(lexicon: Arc<Lexicon>, index: usize) -> Self {
        assert!(index < lexicon.len(), "term index out of range");
        let mut masses = vec![0.0; lexicon.len()];
        masses[index] = 1.0;
        Self { lexicon, masses }
    }

    pub fn singleton_term(lexicon: Arc<Lexicon>, term: &str) -> Result<Self> {
        let index = lexicon.require(term)?;
        Ok(Self::singleton(lexicon, index))
    }

    /// Builds from `(term, mass)` pairs; unnamed terms get zero mass.
    pub fn from_terms<'a>(
        lexicon: Arc<Lexicon>,
        entries: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Self> {
        let mut masses = vec![0.0; lexicon.len()];
        for (term, mass) in entries {
            masses[lexicon.require(term)?] += mass;
        }
        Self::new(lexicon, masses)
    }

    pub fn lexicon(&self) -> &Arc<Lexicon> {
        &self.lexicon
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, index: usize) -> f64 {
        self.masses[index]
    }

    pub fn mass_of(&self, term: &str) -> Option<f64> {
        self.lexicon.index_of(term).map(|i| self.masses[i])
    }

    /// Indices of terms with non-zero mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.masses.len()).filter(|&i| self.masses[i] > 0.0).collect()
    }

    pub fn is_singleton(&self) -> bool {
        self.support().len() == 1
    }

    /// The `k` heaviest terms, heaviest first; equal masses keep lexicon order.
    pub fn top_k(&self, k: usize) -> Vec<(&str, f64)> {
        let mut support = self.support();
        support.sort_by(|&a, &b| self.masses[b].total_cmp(&self.masses[a]).then(a.cmp(&b)));
        support
            .into_iter()
            .take(k)
            .map(|i| (self.lexicon.term(i), self.masses[i]))
            .collect()
    }

    /// Non-zero masses keyed by term, in lexicon order.
    pub fn to_term_map(&self) -> IndexMap<String, f64> {
        self.support()
            .into_iter()
            .map(|i| (self.lexicon.term(i).to_owned(), self.masses[i]))
            .collect()
    }

    pub fn l1_distance(&self, other: &MassVector) -> Result<f64> {
        ensure_same(&self.lexicon, &other.lexicon)?;
        Ok(self.masses.iter().zip(&other.masses).map(|(a, b)| (a - b).abs()).sum())
    }
}

impl fmt::Debug for MassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.to_term_map()).finish()
    }
}

/// Triangular Ruspini partition of an angle domain.
///
/// Each term peaks at its modal angle; between two consecutive modal angles
/// the mass moves linearly from one term to the next. In a circular partition
/// the last and first terms are also neighbours across the ±180° seam.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyPartition {
    lexicon: Arc<Lexicon>,
    modal_angles: Vec<f64>,
    circular: bool,
}

impl FuzzyPartition {
    pub fn new(lexicon: Arc<Lexicon>, modal_angles: Vec<f64>, circular: bool) -> Result<Self> {
        if modal_angles.is_empty() {
            return Err(Error::EmptyPartition);
        }
        if modal_angles.len() != lexicon.len() {
            return Err(Error::InvalidPartition(format!(
                "{} modal angles for {} terms of `{}`",
                modal_angles.len(),
                lexicon.len(),
                lexicon.name()
            )));
        }
        if let Some(bad) = modal_angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidPartition(format!("modal angle {bad} is not finite")));
        }
        if let Some(w) = modal_angles.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPartition(format!(
                "modal angles must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if circular {
            let span = modal_angles[modal_angles.len() - 1] - modal_angles[0];
            if span >= 360.0 {
                return Err(Error::InvalidPartition(format!(
                    "circular modal angles span {span}°, must be under 360°"
                )));
            }
        }
        Ok(Self { lexicon, modal_angles, circular })
    }

    pub fn lexicon(&self) -> &Arc<Lexicon> {
        &self.lexicon
    }

    pub fn modal_angles(&self) -> &[f64] {
        &self.modal_angles
    }

    pub fn is_circular(&self) -> bool {
        self.circular
    }

    /// Smallest distance between neighbouring modal angles, including the
    /// wrap-around gap for circular partitions. Infinite for one term.
    pub fn min_gap(&self) -> f64 {
        let mut gap = self
            .modal_angles
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if self.circular && self.modal_angles.len() > 1 {
            let n = self.modal_angles.len();
            gap = gap.min(self.modal_angles[0] + 360.0 - self.modal_angles[n - 1]);
        }
        gap
    }

    pub fn fuzzify(&self, angle: f64) -> Result<MassVector> {
        fuzzify_angle(angle, self)
    }
}

pub fn fuzzify_angle(angle: f64, partition: &FuzzyPartition) -> Result<MassVector> {
    if !angle.is_finite() {
        return Err(Error::NonFiniteAngle(angle));
    }
    let modal = &partition.modal_angles;
    let n = modal.len();
    if n == 0 {
        return Err(Error::EmptyPartition);
    }
    let lexicon = partition.lexicon.clone();
    if n == 1 {
        return Ok(MassVector::singleton(lexicon, 0));
    }

    let first = modal[0];
    let last = modal[n - 1];
    let (lower, upper, t) = if partition.circular {
        let a = first + (angle - first).rem_euclid(360.0);
        if a >= last {
            (n - 1, 0, (a - last) / (first + 360.0 - last))
        } else {
            segment(modal, a)
        }
    } else {
        segment(modal, angle.clamp(first, last))
    };

    let mut masses = vec![0.0; n];
    masses[lower] = 1.0 - t;
    masses[upper] += t;
    MassVector::new(lexicon, masses)
}

/// `a` must lie in `[modal[0], modal[last]]`.
fn segment(modal: &[f64], a: f64) -> (usize, usize, f64) {
    let k = modal.partition_point(|&m| m <= a).saturating_sub(1).min(modal.len() - 2);
    let t = (a - modal[k]) / (modal[k + 1] - modal[k]);
    (k, k + 1, t)
}

/// Built-in vocabularies for the right upper limb.
pub mod vocab {
    use std::sync::Arc;

    use super::{FuzzyPartition, Lexicon};

    /// Arm postures.
    pub const ARM: [&str; 6] = ["down", "front", "up", "outside", "rear", "inside"];
    /// Forearm postures.
    pub const FOREARM: [&str; 4] = ["open", "close", "hmiddle", "vmiddle"];

    pub const A_THETA: [&str; 3] = ["down", "horizon", "up"];
    pub const A_PSI: [&str; 4] = ["rear", "outside", "front", "inside"];
    pub const F_THETA: [&str; 3] = ["close", "middle", "open"];
    pub const F_PSI: [&str; 2] = ["vertical", "horizontal"];

    /// The 24 modal postures, arm-major within each forearm group.
    pub const MODAL: [&str; 24] = [
        "front", "outside", "inside", "down", "up", "rear",
        "frontfolded", "outsidefolded", "insidefolded", "downfolded", "upfolded", "rearfolded",
        "fronthmiddle", "outsidehmiddle", "insidehmiddle", "downhmiddle", "uphmiddle", "rearhmiddle",
        "frontvmiddle", "outsidevmiddle", "insidevmiddle", "downvmiddle", "upvmiddle", "rearvmiddle",
    ];

    /// Name of the modal posture for an (arm, forearm) pair.
    pub fn modal_name(arm: &str, forearm: &str) -> String {
        match forearm {
            "open" => arm.to_owned(),
            "close" => format!("{arm}folded"),
            other => format!("{arm}{other}"),
        }
    }

    /// Splits a modal term into its (arm, forearm) components.
    pub fn split_modal(term: &str) -> Option<(&'static str, &'static str)> {
        ARM.iter()
            .flat_map(|&a| FOREARM.iter().map(move |&f| (a, f)))
            .find(|&(a, f)| modal_name(a, f) == term)
    }

    fn lexicon(name: &str, terms: &[&str]) -> Arc<Lexicon> {
        Arc::new(Lexicon::new(name, terms.iter().copied()).expect("built-in lexicon is valid"))
    }

    pub fn arm_lexicon() -> Arc<Lexicon> {
        lexicon("arm", &ARM)
    }

    pub fn forearm_lexicon() -> Arc<Lexicon> {
        lexicon("forearm", &FOREARM)
    }

    pub fn modal_lexicon() -> Arc<Lexicon> {
        lexicon("modal", &MODAL)
    }

    fn partition(name: &str, terms: &[&str], angles: &[f64], circular: bool) -> FuzzyPartition {
        FuzzyPartition::new(lexicon(name, terms), angles.to_vec(), circular)
            .expect("built-in partition is valid")
    }

    /// Angle between the downward body vertical and the arm.
    pub fn a_theta_partition() -> FuzzyPartition {
        partition("a_theta", &A_THETA, &[0.0, 90.0, 180.0], false)
    }

    /// Arm azimuth about the body vertical; front at 0°, outside at -90°.
    pub fn a_psi_partition() -> FuzzyPartition {
        partition("a_psi", &A_PSI, &[-180.0, -90.0, 0.0, 90.0], true)
    }

    /// Interior elbow angle; 0° fully folded, 180° fully open.
    pub fn f_theta_partition() -> FuzzyPartition {
        partition("f_theta", &F_THETA, &[0.0, 90.0, 180.0], false)
    }

    /// Angle of the forearm's off-arm direction from the body vertical.
    pub fn f_psi_partition() -> FuzzyPartition {
        partition("f_psi", &F_PSI, &[0.0, 90.0], false)
    }
}
