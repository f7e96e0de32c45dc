use thiserror::Error;

/// Errors produced by symbol construction, quantization, and the spectral
/// machinery. Numeric report-only operations do not error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("invalid atom arguments at byte {offset}: {message}")]
    AtomArgs { offset: usize, message: String },

    #[error("declared order {declared} is below coefficient order {actual} at l = {l}")]
    OrderTooSmall { declared: f64, actual: f64, l: i32 },

    #[error("order > 0 in direction {direction:+}: coefficient l = {l} has no finite limit")]
    OrderInDirection { l: i32, direction: i8 },

    #[error("indeterminate directional limit for coefficient l = {l}: leading terms of positive order cancel")]
    IndeterminateLimit { l: i32 },

    #[error("symbol is not real-valued: max |Im a| = {max_imag:.3e} on the check grid")]
    NonRealSymbol { max_imag: f64 },

    #[error("symbol order must be 0 for this operation, got {order}")]
    NonZeroOrder { order: f64 },

    #[error("x-grid too coarse: n_grid = {n_grid} < {min}")]
    GridTooCoarse { n_grid: usize, min: usize },

    #[error("projection tail bound {bound:.3e} exceeds tolerance {tol:.3e}; increase L")]
    TailBound { bound: f64, tol: f64 },

    #[error("truncation K = {k} is below the symbol bandwidth L = {l}")]
    KTooSmall { k: i32, l: i32 },

    #[error("quantization parameter t = {t} outside [0, 1]")]
    TOutOfRange { t: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("geometry mismatch between operands")]
    GeometryMismatch,

    #[error("matrix is not flagged Hermitian; use the unitary path or polar decomposition")]
    NonHermitian,

    #[error("eigendecomposition residual {residual:.3e} exceeds 1e-10 * op_norm = {bound:.3e}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    #[error("truncation list must be ascending with at least {min} entries")]
    BadTruncationList { min: usize },

    #[error("interval ordering violated: need {need}")]
    IntervalOrder { need: String },

    #[error("enclosing interval intersects the critical set near {value:.6}")]
    CriticalSetHit { value: f64 },

    #[error("arc intersects the unitary critical set near angle {angle:.6}")]
    UnitaryCriticalSetHit { angle: f64 },

    #[error("directional limits are not unimodular: max | |a0| - 1 | = {max_dev:.3e}")]
    UnimodularityViolation { max_dev: f64 },

    #[error("Taylor order {n} outside 1..=8")]
    TaylorOrderOutOfRange { n: usize },

    #[error("projection level n = {n} must satisfy n < K = {k}")]
    ProjectionLevel { n: i32, k: i32 },

    #[error("quadrature grid must have an even node count in y, got {ny}")]
    OddQuadratureRows { ny: usize },

    #[error("zero pivot in banded elimination at index {index}")]
    ZeroPivot { index: usize },

    #[error("linear algebra backend failure: {0}")]
    Backend(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Backend(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
