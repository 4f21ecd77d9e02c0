use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a Hilbert space needs at least one basis label")]
    EmptySpace,
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("invalid basis label `{0}`")]
    InvalidLabel(String),
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
    #[error("operands live on different Hilbert spaces")]
    SpaceMismatch,
    #[error("expected length {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("all vectors are numerically zero")]
    ZeroSpan,
    #[error("operator is not an orthogonal projector: {0}")]
    NotProjector(String),

    #[error("rule source `{0}` appears more than once")]
    DuplicateSource(String),
    #[error("targets of rule `{source_label}` have norm {norm}, expected 1")]
    NonUnitTarget { source_label: String, norm: f64 },
    #[error("rule targets are not orthonormal (Gram residual {residual:.3e})")]
    NonIsometricRules { residual: f64 },
    #[error("identity extension for `{0}` collides with the specified range")]
    ExtensionConflict(String),
    #[error("compiled operator is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("token collision: {0}")]
    TokenCollision(String),
    #[error("unknown token or subsystem `{0}`")]
    UnknownToken(String),

    #[error("projectors `{first}` and `{second}` are not orthogonal (overlap {overlap:.3e})")]
    NotOrthogonal {
        first: String,
        second: String,
        overlap: f64,
    },
    #[error("duplicate projector name `{0}`")]
    DuplicateName(String),
    #[error("malformed family: {0}")]
    MalformedFamily(String),
    #[error("initial state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("invalid branch: {0}")]
    BadBranch(String),
    #[error("family is inconsistent (max off-diagonal {max_offdiagonal:.3e} > {tolerance:.1e}); probabilities are not defined")]
    InconsistentFamily {
        max_offdiagonal: f64,
        tolerance: f64,
    },
    #[error("conditioning event has zero probability")]
    ZeroConditioningEvent,

    #[error("time grids differ ({left} vs {right} sampled times)")]
    GridMismatch { left: usize, right: usize },
    #[error("families do not share dynamics: {0}")]
    DynamicsMismatch(String),
    #[error("projectors `{left}` and `{right}` at t{time} do not commute (norm {norm:.3e})")]
    NonCommuting {
        time: usize,
        left: String,
        right: String,
        norm: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
