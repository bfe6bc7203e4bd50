use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown or unsupported lattice `{0}` (supported: D1Q2, D1Q3, D2Q4, D2Q5)")]
    UnknownLattice(String),

    #[error("invalid lattice descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("invalid occupancy field: {0}")]
    InvalidField(String),

    #[error("label width {got} does not match register width {expected}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("duplicate qubit operand {0}")]
    DuplicateQubit(usize),

    #[error("duplicate basis label {0}")]
    DuplicateLabel(String),

    #[error("state has zero norm")]
    ZeroVector,

    #[error("coefficients not normalized: |a|^2 + |b|^2 = {0}")]
    NotNormalized(f64),

    #[error("register of {num_qubits} qubits exceeds the dense cap of {cap}")]
    RegisterTooLarge { num_qubits: usize, cap: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid gate layering: {0}")]
    InvalidLayering(String),

    #[error("transitions are not realizable by any unitary (max Gram deviation {0:.3e})")]
    NotRealizable(f64),

    #[error("empty transition spec")]
    EmptySpec,

    #[error("time step {t} out of range 1..={n_t}")]
    StepOutOfRange { t: usize, n_t: usize },

    #[error("window is missing data: {0}")]
    MissingBit(String),

    #[error("window data outside the vicinity: {0}")]
    OutsideVicinity(String),

    #[error("sparse entry count {count} exceeds budget {cap}")]
    MemoryBudget { count: usize, cap: usize },

    #[error("classical ensemble exceeds {cap} branching events on one trajectory")]
    BranchExplosion { cap: usize },

    #[error("grid of {qubits} qubits exceeds the full-grid limit of {cap}")]
    GridTooLarge { qubits: usize, cap: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
