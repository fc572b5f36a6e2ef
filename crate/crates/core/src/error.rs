use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid index window: lo {lo} > hi {hi}")]
    InvalidWindow { lo: i64, hi: i64 },

    #[error("deformation delta at index {index} must be nonzero and finite")]
    InvalidDeformation { index: i64 },

    #[error("window does not cover index {index}")]
    WindowTooSmall { index: i64 },

    #[error("window mismatch: operator lives on [{expected_lo}, {expected_hi}], vector on [{got_lo}, {got_hi}]")]
    WindowMismatch {
        expected_lo: i64,
        expected_hi: i64,
        got_lo: i64,
        got_hi: i64,
    },

    #[error("vector has support on boundary rows {rows:?}; the image leaves the window")]
    BoundarySupport { rows: Vec<i64> },

    #[error("coefficient {name}[{index}] is zero; the pair acquires a vacuum there")]
    ZeroCoefficient { name: &'static str, index: i64 },

    #[error("sequences incompatible at k = {k}: alpha_k = {alpha}, beta_(1-k) = {beta}")]
    Incompatible { k: i64, alpha: f64, beta: f64 },

    #[error("rescaler is ill-defined on the central basis vector: alpha_1 = {alpha1}, beta_0 = {beta0}")]
    RescalerConstraint { alpha1: f64, beta0: f64 },

    #[error("label |z| = {abs_z} lies outside the convergence disk of radius {radius}")]
    OutsideDisk { abs_z: f64, radius: f64 },

    #[error("series did not converge within {terms} terms")]
    NonConvergent { terms: usize },

    #[error("series diverges at radius {r}")]
    Divergent { r: f64 },

    #[error("truncation overflow: dropped squared mass {dropped:e} above order {k_max}")]
    TruncationOverflow { k_max: usize, dropped: f64 },

    #[error("quadrature under-resolved: node doubling moved the result by {disagreement:e}")]
    UnderResolved { disagreement: f64 },

    #[error("eigendecomposition did not converge")]
    EigenFailure,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
