use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants fall in three families that the command line maps onto exit
/// codes (see [`Error::exit_code`]): a mathematical hypothesis does not hold
/// for the input, a tolerance decision is too close to call, or the input
/// could not be read.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cyclic Jacobi did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NonConvergence { sweeps: usize, off_norm: f64 },

    #[error("ambiguous tolerance decision: {0}")]
    ToleranceAmbiguity(String),

    #[error("eigenvalue clusters {left} and {right} are closer than 10 * cluster_tol ({gap:e}); raise cluster_tol explicitly")]
    ClusterAmbiguity { left: f64, right: f64, gap: f64 },

    #[error("interpolation nodes nearly coincide for node {node}: product of gaps {product:e} below floor {floor:e}")]
    ConditioningOverflow { node: usize, product: f64, floor: f64 },

    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("rank {rank} exceeds the declared cap {cap}")]
    RankExceeded { rank: usize, cap: usize },

    #[error("EFE is singular on the range of E: eigenvalue {eigenvalue:e} <= ker_tol")]
    KernelHit { eigenvalue: f64 },

    #[error("projections share a {rank}-dimensional subspace; split the pair first")]
    NonTrivialMeet { rank: usize },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("operators are not isospectral: {0}")]
    NotIsospectral(String),

    #[error("ambient dimension {dim} too small, need at least {required}")]
    DimensionTooSmall { dim: usize, required: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: defect {defect:e} exceeds {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not an orthogonal projection: {0}")]
    NotProjection(String),

    #[error("matrix is not unitary: defect {defect:e}")]
    NotUnitary { defect: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code used by the command line: 2 for violated hypotheses,
    /// 3 for tolerance ambiguities, 4 for input and format problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::HypothesisViolated(_)
            | Error::NotIsospectral(_)
            | Error::KernelHit { .. }
            | Error::NonTrivialMeet { .. }
            | Error::RankMismatch(..)
            | Error::RankExceeded { .. }
            | Error::DimensionTooSmall { .. }
            | Error::InvalidArgument(_) => 2,
            Error::ToleranceAmbiguity(_)
            | Error::ClusterAmbiguity { .. }
            | Error::ConditioningOverflow { .. }
            | Error::NonConvergence { .. } => 3,
            Error::DimensionMismatch(..)
            | Error::NonFinite { .. }
            | Error::NotHermitian { .. }
            | Error::NotProjection(_)
            | Error::NotUnitary { .. }
            | Error::Format(_)
            | Error::Io(_) => 4,
        }
    }

    /// Short machine-readable tag used as the report status.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "non_convergence",
            Error::ToleranceAmbiguity(_) => "tolerance_ambiguity",
            Error::ClusterAmbiguity { .. } => "cluster_ambiguity",
            Error::ConditioningOverflow { .. } => "conditioning_overflow",
            Error::RankMismatch(..) => "rank_mismatch",
            Error::RankExceeded { .. } => "rank_exceeded",
            Error::KernelHit { .. } => "kernel_hit",
            Error::NonTrivialMeet { .. } => "non_trivial_meet",
            Error::HypothesisViolated(_) => "hypothesis_violated",
            Error::NotIsospectral(_) => "not_isospectral",
            Error::DimensionTooSmall { .. } => "dimension_too_small",
            Error::DimensionMismatch(..) => "dimension_mismatch",
            Error::NonFinite { .. } => "non_finite",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotProjection(_) => "not_projection",
            Error::NotUnitary { .. } => "not_unitary",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Format(_) => "format_error",
            Error::Io(_) => "io_error",
        }
    }
}
