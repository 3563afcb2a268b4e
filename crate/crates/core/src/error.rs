use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lexicon must contain at least one term")]
    EmptyLexicon,
    #[error("lexicon terms must be non-empty")]
    EmptyTerm,
    #[error("duplicate term `{0}` in lexicon")]
    DuplicateTerm(String),
    #[error("unknown term `{0}`")]
    UnknownTerm(String),
    #[error("expected {expected} masses, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("negative mass {value} at term index {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("mass at term index {0} is not finite")]
    NonFiniteMass(usize),
    #[error("mass vector has zero total mass")]
    ZeroMass,
    #[error("operands are defined on different lexicons (`{left}` vs `{right}`)")]
    LexiconMismatch { left: String, right: String },

    #[error("fuzzy partition has no modal angles")]
    EmptyPartition,
    #[error("invalid fuzzy partition: {0}")]
    InvalidPartition(String),
    #[error("angle {0} is not finite")]
    NonFiniteAngle(f64),

    #[error("invalid ground distance: {0}")]
    InvalidGround(String),
    #[error("invalid ground generator parameters: {0}")]
    InvalidGroundParams(String),

    #[error("skeleton is missing joint `{0}`")]
    MissingJoint(String),
    #[error("joint `{0}` has a non-finite coordinate")]
    NonFiniteJoint(String),
    #[error("{0} segment has zero length")]
    DegenerateSegment(&'static str),
    #[error("shoulder frame is collinear with the body axis; body plane undefined")]
    CollinearFrame,

    #[error("invalid rule table: {0}")]
    InvalidRuleTable(String),
    #[error("invalid posture model: {0}")]
    InvalidModel(String),

    #[error("cannot learn a reference posture from zero samples")]
    EmptySamples,
    #[error("tolerance must be finite and non-negative, got {0}")]
    InvalidTolerance(f64),
    #[error("reference set is empty")]
    EmptyReferences,
    #[error("duplicate reference posture `{0}`")]
    DuplicateReference(String),
    #[error("no distance supplied for reference `{0}`")]
    MissingDistance(String),
    #[error("distance for reference `{name}` is negative or not finite ({value})")]
    InvalidDistance { name: String, value: f64 },
    #[error("tolerance volumes overlap: {}", format_pairs(.0))]
    OverlappingTolerances(Vec<(String, String)>),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_pairs(pairs: &[(String, String)]) -> String {
    pairs
        .iter()
        .map(|(a, b)| format!("{a}/{b}"))
        .collect::<Vec<_>>()
        .join(", ")
}
