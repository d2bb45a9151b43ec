use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported space-time dimension {0} (allowed: 1, 2, 4)")]
    UnsupportedDimension(usize),

    #[error("matrix is not unimodular: |det - 1| = {residual:e}")]
    NotUnimodular { residual: f64 },

    #[error("matrix is not in SU(2): residual {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("momentum ({k0}, |k| = {spatial}) is not strictly inside the future cone")]
    OutsideFutureCone { k0: f64, spatial: f64 },

    #[error("invalid irrep label: {0}")]
    InvalidLabel(String),

    #[error("invalid spin: {0}")]
    InvalidSpin(String),

    #[error(
        "rapidity {rapidity} leaks {leakage:e} into the truncation boundary; suggested j_max: {}",
        suggested_j_max.map(|j| j.to_string()).unwrap_or_else(|| "none found".into())
    )]
    TruncationWindow { rapidity: f64, leakage: f64, suggested_j_max: Option<u32> },

    #[error("state support escapes the grid hull")]
    SupportEscapesGrid,

    #[error("packet support leaves the open future cone")]
    SupportOutsideCone,

    #[error("region lies outside the space-time grid hull")]
    RegionOutsideHull,

    #[error("kernel is not normalized: isometry residual {residual:e}")]
    KernelNotNormalized { residual: f64 },

    #[error("kernel is not quasi-baricentric")]
    KernelNotQuasiBaricentric,

    #[error("kernel shape: {0}")]
    KernelShape(String),

    #[error("coefficients are not normalized: sum |c|^2 = {norm}")]
    UnnormalizedCoefficients { norm: f64 },

    #[error("need at least {needed} nodes, got {got}")]
    TooFewNodes { needed: usize, got: usize },

    #[error("grid capacity: {0}")]
    GridCapacity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
