use thiserror::Error;

/// Error type for every fallible operation in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spin count {n_spins} is below the minimum {min} for this operation")]
    SpinCountTooSmall { n_spins: u32, min: u32 },

    #[error("spin count {n_spins} exceeds the maximum {max} supported by this operation")]
    SpinCountTooLarge { n_spins: u32, max: u32 },

    #[error("spin label 2j = {twice_j} is incompatible with {n_spins} spins")]
    IncompatibleSpin { n_spins: u32, twice_j: u32 },

    #[error("projection 2m = {twice_m} is invalid for spin 2j = {twice_j}")]
    InvalidProjection { twice_j: u32, twice_m: i32 },

    #[error("quaternion norm {norm:e} is too small to normalize")]
    ZeroQuaternion { norm: f64 },

    #[error("axis norm {norm:e} is too small to normalize")]
    ZeroAxis { norm: f64 },

    #[error("coefficient vector has length {got}, expected {expected}")]
    CoefficientCountMismatch { expected: usize, got: usize },

    #[error("coefficient {index} is {value}, all must be non-negative")]
    NegativeCoefficient { index: usize, value: f64 },

    #[error("matrix entry {index} is {value}, all must be finite")]
    NonFiniteEntry { index: usize, value: f64 },

    #[error("row label {index} breaks the descending class order")]
    ClassOrderViolation { index: usize },

    #[error("coefficient vector has norm {norm}, must be 1 within {tol:e}")]
    NotUnitNorm { norm: f64, tol: f64 },

    #[error("projection assignment for spin 2j = {twice_j} has length {got}, expected {expected}")]
    AssignmentLengthMismatch {
        twice_j: u32,
        expected: usize,
        got: usize,
    },

    #[error("projection assignment for spin 2j = {twice_j} repeats a projection")]
    NonInjectiveAssignment { twice_j: u32 },

    #[error("operand built for {got} spins, this object covers {expected}")]
    SpinCountMismatch { expected: u32, got: u32 },

    #[error("eigensolver residual {residual:e} exceeds tolerance {tol:e}")]
    EigensolverNoConvergence { residual: f64, tol: f64 },

    #[error("quadrature grid {n_alpha}x{n_beta}x{n_gamma} is degenerate, all sizes must be >= 2")]
    DegenerateGrid {
        n_alpha: usize,
        n_beta: usize,
        n_gamma: usize,
    },

    #[error("rejection sampler exhausted {proposals} proposals without accepting")]
    SamplerCapExceeded { proposals: u64 },

    #[error("trial count {trials} is below the minimum {min}")]
    TrialCountTooSmall { trials: u64, min: u64 },

    #[error("integer overflow while computing {what}")]
    ArithmeticOverflow { what: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
