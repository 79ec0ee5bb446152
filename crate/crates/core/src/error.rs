use thiserror::Error;

/// Errors surfaced by the engine. Every constructor failure and every
/// arithmetic precondition violation is reported through this type; the
/// library never panics on malformed user input.
#[derive(Debug, Error)]
pub enum WharfError {
    #[error("cyclotomic order mismatch: {0} vs {1}")]
    OrderMismatch(u32, u32),

    #[error("division by zero in cyclotomic field of order {0}")]
    DivisionByZero(u32),

    #[error("invalid cyclotomic order {0}: must be >= 1")]
    InvalidOrder(u32),

    #[error("invalid level r = {0}: need r >= 3")]
    InvalidLevel(u32),

    #[error("root exponent {exponent} is not coprime to 4r = {modulus}")]
    RootExponentNotCoprime { exponent: u32, modulus: u32 },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("edge ({src}, {tgt}) references a vertex outside 0..{n}")]
    EdgeOutOfRange { src: usize, tgt: usize, n: usize },

    #[error("vertex {0} out of range for graph with {1} vertices")]
    VertexOutOfRange(usize, usize),

    #[error("degree {requested} exceeds configured cap {cap}")]
    DegreeOverflow { requested: usize, cap: usize },

    #[error("matrix shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),

    #[error("linear system is inconsistent")]
    InconsistentSystem,

    #[error("fusion data is not a valid fusion ring: {0}")]
    InvalidFusionData(String),

    #[error("object index {0} out of range for fusion ring of rank {1}")]
    FusionIndexOutOfRange(usize, usize),

    #[error("strand count mismatch: diagram expects {expected}, got {got}")]
    StrandMismatch { expected: usize, got: usize },

    #[error("quantum integer [{0}] vanishes; cannot divide")]
    VanishingQuantumInteger(i64),

    #[error("path {0:?} is not a walk in the graph")]
    NotAPath(Vec<usize>),

    #[error("no group-like normalization exists: {0}")]
    GaugeFailure(String),

    #[error("coaction does not close on the given subspace at degree {degree}")]
    CoactionNotClosed { degree: usize },

    #[error("antipode solve failed: {0}")]
    AntipodeFailure(String),

    #[error("assembly failed: {0}")]
    AssemblyFailure(String),

    #[error("serialization error: {0}")]
    Serde(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, WharfError>;
