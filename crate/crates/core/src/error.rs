use thiserror::Error;

/// Errors raised by the simulator and the algorithms built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QpeError {
    #[error("qubit count {requested} exceeds the cap of {cap}")]
    QubitCap { requested: usize, cap: usize },

    #[error("basis index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },

    #[error("expected {expected} amplitudes, got {actual}")]
    WrongLength { expected: usize, actual: usize },

    #[error("state norm {norm} deviates from 1 beyond tolerance")]
    NormViolation { norm: f64 },

    #[error("qubit {qubit} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("qubit {0} appears more than once")]
    DuplicateQubit(usize),

    #[error("qubit {0} is both a control and a target")]
    ControlTargetOverlap(usize),

    #[error("gate acts on {arity} qubits but {targets} targets were given")]
    ArityMismatch { arity: usize, targets: usize },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix must be square with power-of-two dimension, got {rows}x{cols}")]
    BadMatrixShape { rows: usize, cols: usize },

    #[error("gate arity {0} outside the supported range")]
    BadArity(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("empty qubit register")]
    EmptyRegister,

    #[error("invalid register layout: {0}")]
    InvalidLayout(String),

    #[error("index register is not in |0...0> (residual weight {residual:e})")]
    IndexNotZero { residual: f64 },

    #[error("work register is not in |0...0> (residual weight {residual:e})")]
    WorkNotZero { residual: f64 },

    #[error("the flag-loop construction needs at least one work qubit")]
    NoWorkQubit,

    #[error("system of {qubits} qubits is too large for dense construction (max {max})")]
    TooLarge { qubits: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weights sum to {sum}, expected 1")]
    WeightNormalization { sum: f64 },

    #[error("no reference eigenvalue within {tol} of energy {energy}")]
    NoMatchingEigenvalue { energy: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, QpeError>;
