use thiserror::Error;

/// Errors raised by circuit synthesis and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("two-qubit gate {gate} acts twice on qubit {qubit}")]
    RepeatedQubit { gate: &'static str, qubit: usize },

    #[error("unsupported radix {0}: supported radices are 2 and 3")]
    UnsupportedRadix(usize),

    #[error("{modes} modes is not a power of radix {radix}")]
    NotAPower { modes: usize, radix: usize },

    #[error("radix {radix} does not divide {modes}")]
    NotDivisible { modes: usize, radix: usize },

    #[error("imported interleave sequences exist only for 9 and 27 modes with radix 3 (got {modes} modes, radix {radix})")]
    NoImportedSequence { modes: usize, radix: usize },

    #[error("gate {0} is not particle-number conserving")]
    NotParticleConserving(String),

    #[error("gate {0} is not a Clifford gate")]
    NotClifford(String),

    #[error("statevector of {requested} qubits exceeds the {cap}-qubit cap")]
    TooManyQubits { requested: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("interaction strength V = {0} is nonzero; the free-fermion path requires V = 0")]
    Interacting(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
