use thiserror::Error;

use crate::seq::SequenceError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("weight `{name}` must be nonzero (positive for beta) at n = {index}, got {value}")]
    BadWeight {
        name: &'static str,
        index: usize,
        value: f64,
    },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian (relative residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("Gram matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e}, scaled conditioning ratio {scaled_ratio:e})")]
    NotPositiveDefinite {
        min_eigenvalue: f64,
        scaled_ratio: f64,
    },
    #[error("diagonal coefficient {index} has imaginary part {imag:e}")]
    NonRealDiagonal { index: usize, imag: f64 },
    #[error("diagonal coefficient {index} is negative ({value:e})")]
    NegativeDiagonal { index: usize, value: f64 },
    #[error("index ({row}, {col}) outside a kernel of order {order}")]
    IndexOutOfRange { row: usize, col: usize, order: usize },
    #[error("point with modulus {modulus} is not in the open unit disc")]
    OutsideDisc { modulus: f64 },
    #[error("k(w, w) = {value:e} is negative: kernel not positive at this truncation")]
    NegativeKernelValue { value: f64 },
    #[error("leading coefficient of the conjugating series must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("A_0 is not injective (smallest singular value {smallest_singular_value:e})")]
    NotInjective { smallest_singular_value: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("sup |nu_n / mu_(n+1)| = {ratio} >= 1 on the window; bound undefined")]
    ShiftRatioTooLarge { ratio: f64 },
    #[error("test vector {index} has norm {norm}, expected 1")]
    NonUnitTestVector { index: usize, norm: f64 },
    #[error("empty test vector set")]
    EmptyTestSet,
    #[error("support {needed} exceeds model order {order}")]
    Capacity { needed: usize, order: usize },
    #[error("diagonal is not summable on the window: {0}")]
    NotSummable(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
