use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while building a scoring tree or scoring
/// predictions against one.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("multiple roots: {}", .0.join(", "))]
    MultipleRoots(Vec<String>),

    #[error("cycle detected among nodes: {}", .0.join(", "))]
    CycleDetected(Vec<String>),

    #[error("node {child} has two parents ({first} and {second})")]
    DuplicateChild {
        child: String,
        first: String,
        second: String,
    },

    #[error("edge {parent}->{child} has negative weight {weight}")]
    NegativeWeight { parent: String, child: String, weight: f64 },

    #[error("edge {parent}->{child} has non-finite weight")]
    NonFiniteWeight { parent: String, child: String },

    #[error("edge {parent}->{child} has no weight")]
    MissingWeight { parent: String, child: String },

    #[error("uniform weights requested but edge {parent}->{child} carries an explicit weight")]
    MixedWeights { parent: String, child: String },

    #[error("root-to-leaf weight sum for leaf {leaf} is {sum}, expected 1")]
    PathSumViolation { leaf: String, sum: f64 },

    #[error("tree has {nodes} nodes; at least 3 are required")]
    TooFewNodes { nodes: usize },

    #[error("declared root {declared} does not match the tree root {found}")]
    RootMismatch { declared: String, found: String },

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("root node {0} cannot be used as a label")]
    RootAsLabel(String),

    #[error("pair has no detection on both sides")]
    EmptyPair,

    #[error("ancestor-set scores are undefined for detection pairs")]
    DetectionPairUnsupported,

    #[error("prediction counts are empty")]
    EmptyMatrix,

    #[error("offset must be finite and <= 0, got {0}")]
    InvalidOffset(f64),

    #[error("beta must be finite and >= 0, got {0}")]
    InvalidBeta(f64),

    #[error("macro averaging is only defined for flat metrics")]
    UnsupportedAveraging,

    #[error("unknown model {0}")]
    UnknownModel(String),
}
