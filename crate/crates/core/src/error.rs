use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("generator is not skew-Hermitian (relative deviation {deviation:.3e})")]
    NonSkewHermitian { deviation: f64 },
    #[error("wire {0} listed more than once")]
    DuplicateWire(usize),
    #[error("wire {wire} out of range for {total} wires")]
    WireOutOfRange { wire: usize, total: usize },

    #[error("qubits per mode must be in 1..={max}, got {got}")]
    InvalidFockSpace { got: u32, max: u32 },
    #[error("Fock level {level} does not fit below cutoff {cutoff}")]
    FockOutOfRange { level: u64, cutoff: u64 },

    #[error("{kind} expects {expected}, got {got}")]
    ArityMismatch {
        kind: String,
        expected: String,
        got: String,
    },
    #[error("invalid parameter for {kind}: {reason}")]
    InvalidParameter { kind: String, reason: String },
    #[error("SNAP phase vector has {len} entries but cutoff is {cutoff}")]
    SnapPhaseVectorTooLong { len: usize, cutoff: usize },
    #[error("{what} index {index} out of range (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
    #[error("initial amplitudes have zero norm")]
    ZeroNormAmplitudes,
    #[error("measurement needs {needed} classical bits, {given} given")]
    InsufficientClassicalBits { needed: usize, given: usize },
    #[error("measurement maps {given} classical bits onto {needed} measured bits")]
    ClassicalBitCountMismatch { needed: usize, given: usize },
    #[error("classical bit {0} written twice by one measurement")]
    DuplicateClassicalBit(usize),

    #[error("circuit needs {wires} wires, cap is {cap}")]
    WireCapExceeded { wires: usize, cap: usize },
    #[error("gate {0} is not unitary")]
    NonUnitaryGate(String),
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("branch probability {0:.3e} is too small to condition on")]
    ZeroProbabilityBranch(f64),
    #[error("subsystem selector is empty")]
    EmptySelector,

    #[error("not a single-qumode density matrix: {0}")]
    NotAQumodeDensityMatrix(String),
    #[error("density matrix is not Hermitian")]
    NonHermitianInput,
    #[error("input list is empty")]
    EmptyInput,
    #[error("invalid phase-space grid: {0}")]
    InvalidGrid(String),
    #[error("circuit contains a measurement; animation needs a purely unitary circuit")]
    MeasurementInAnimation,

    #[error("BCH on-site method needs an ancilla qubit")]
    AncillaMissing,
    #[error("U*dt must be non-negative, got {0}")]
    NegativeUdt(f64),
    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
