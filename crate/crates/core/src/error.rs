use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps these onto its exit-code contract: configuration problems
/// exit 2, truncation non-convergence exits 3, and a violated relation
/// (which indicates a bug, never physics) exits 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("index subset must be nonempty and strictly increasing")]
    BadIndexSubset,

    #[error("matrix entries must be finite")]
    NonFiniteEntries,

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not symmetric (defect {defect:.3e})")]
    NotSymmetric { defect: f64 },

    #[error("transformation matrix is singular (|det| = {det:.3e})")]
    SingularTransform { det: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eig:.3e}); the trace relation requires positive definite dispersion matrices")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("principal-minor sums are capped at n = {max} (got n = {n}); use the trace-recursion path for larger matrices")]
    OrderTooLarge { n: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation dimension {dim} too small: tail mass {tail:.3e} exceeds {limit:.3e}; increase dim")]
    TruncationTooSmall { dim: usize, tail: f64, limit: f64 },

    #[error(
        "state tail mass {tail:.3e} too large for a safe moment computation on a truncated set"
    )]
    TailMassTooLarge { tail: f64 },

    #[error("the u = 0 branch of the algebraic coherent-state equation is not supported; use the eigensolve route")]
    UZero,

    #[error("series did not converge within {dim} terms")]
    SeriesDiverged { dim: usize },

    #[error("no eigenvector with acceptable residual/tail mass near the target (residual {residual:.3e}, tail {tail:.3e}); truncation too small or non-normalizable regime")]
    NoAcceptableEigenvector { residual: f64, tail: f64 },

    #[error(
        "constructed state fails its defining equation: residual {residual:.3e} exceeds {tol:.3e}"
    )]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("σ + iC has negative eigenvalue {min_eig:.3e}: truncation corruption, not physics")]
    MomentMatrixNotPsd { min_eig: f64 },

    #[error("operation requires a pure state")]
    MixedStateUnsupported,

    #[error("observable set has no declared commutator structure")]
    MissingStructure,

    #[error("uncertainty relation violated at order {r}: gap {gap:.3e} below -{tol:.3e} (this is a bug or a truncation artifact, not physics)")]
    RelationViolated { r: usize, gap: f64, tol: f64 },

    #[error("mean-of-commutator system satisfied for neither sign of zeta (best residual {residual:.3e}); flagged as a convention discrepancy")]
    BetaSystemDiscrepancy { residual: f64 },

    #[error("all optimizer restarts diverged")]
    AllRestartsDiverged,
}

pub type Result<T> = std::result::Result<T, Error>;
