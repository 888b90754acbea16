use alloc::string::String;

use crate::halfint::HalfInt;

/// Errors raised by the spin, circuit, simulation and estimation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("negative spin {0}")]
    NegativeSpin(HalfInt),

    #[error("spin {l} and projection {m} have mismatched parity")]
    ParityMismatch { l: HalfInt, m: HalfInt },

    #[error("projection {m} out of range for spin {l}")]
    ProjectionOutOfRange { l: HalfInt, m: HalfInt },

    #[error("triangle rule violated: {l} cannot couple {l1} and {l2}")]
    Triangle { l1: HalfInt, l2: HalfInt, l: HalfInt },

    #[error("invalid coupling tree: {0}")]
    InvalidTree(String),

    #[error("invalid label: {0}")]
    InvalidLabel(String),

    #[error("empty qubit subset")]
    EmptySubset,

    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("control qubit {0} collides with a circuit qubit")]
    ControlCollision(usize),

    #[error("no decomposition registered for {0}")]
    UnsupportedDecomposition(String),

    #[error("register of {n} qubits exceeds the limit of {max}")]
    RegisterTooLarge { n: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid noise model: {0}")]
    InvalidNoise(String),

    #[error("parameter count mismatch: ansatz takes {expected}, got {found}")]
    ParameterCount { expected: usize, found: usize },

    #[error("confusion matrix is singular (condition number {0:e})")]
    SingularConfusion(f64),

    #[error("extrapolation needs at least two distinct noise levels")]
    TooFewPoints,

    #[error("noise parameter {0} is not a positive odd integer")]
    InvalidNoiseParameter(u32),

    #[error("missing tomography setting {0}")]
    MissingSetting(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
