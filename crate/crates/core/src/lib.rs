//! Upper-limb posture recognition over lexical fuzzy subsets.
//!
//! Joint angles are fuzzified into mass vectors over small linguistic
//! lexicons, combined through rule tables into a 24-term modal-posture mass
//! vector, and compared with learned reference postures using the
//! transportation distance induced by a ground distance between terms.
//! Decisions are taken with nearest, tolerance-ball, or emergency-priority
//! strategies.

pub mod config;
pub mod decision;
mod error;
pub mod lexicon;
pub mod posture;
pub mod transport;

pub use decision::{
    decide, decide_from_distances, validate_tolerances, DecisionConfig, DecisionOutcome,
    OverlapMode, OverlapPair, Rationale, Recognizer, Strategy, TieBreak,
};
pub use error::{Error, Result};
pub use lexicon::{fuzzify_angle, make_mass_vector, FuzzyPartition, Lexicon, MassVector};
pub use posture::{
    evaluate_rule_table, joints_to_angles, learn_reference, measure_posture, ActionClass,
    AngleQuadruple, PostureModel, ReferencePosture, RuleTable, Skeleton,
};
pub use transport::{
    build_modal_ground_distance, transport_distance, transport_plan, Flow, GroundDistance,
    TransportPlan,
};
