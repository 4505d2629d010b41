use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("attempted to invert zero")]
    ZeroInversion,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("modular polynomial for ell={0} is not available")]
    UnsupportedEll(u64),
    #[error("point is not on the modular curve")]
    NotOnCurve,
    #[error("j-invariant 0 or 1728 is not allowed here")]
    ForbiddenJInvariant,
    #[error("characteristic too small: {0}")]
    CharacteristicTooSmall(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("point is singular on the modular curve; use the multipoint method")]
    SingularPoint,
    #[error("fiber polynomial has a repeated root")]
    DegenerateFiber,
    #[error("polynomial is not a square")]
    NotASquare,
    #[error("rational reconstruction failed")]
    ReconstructionFailure,
    #[error("isogeny differential equation has no series solution")]
    InconsistentOde,
    #[error("series has a non-unit constant term")]
    NonUnitConstantTerm,
    #[error("singular curve: discriminant vanishes")]
    SingularCurve,
    #[error("kernel points do not form a group")]
    NotAGroup,
    #[error("kernel has wrong order: {0}")]
    WrongOrder(usize),
    #[error("kernel is not Galois-stable over the base field")]
    KernelNotGaloisStable,
    #[error("unsupported characteristic: {0}")]
    UnsupportedCharacteristic(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("no embedding between the given fields")]
    NoEmbedding,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code used by the command-line interface.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroInversion => "ZERO_INVERSION",
            Error::InvalidField(_) => "INVALID_FIELD",
            Error::FieldMismatch => "FIELD_MISMATCH",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::Validation(_) => "VALIDATION_ERROR",
            Error::UnsupportedEll(_) => "UNSUPPORTED_ELL",
            Error::NotOnCurve => "NOT_ON_CURVE",
            Error::ForbiddenJInvariant => "FORBIDDEN_J",
            Error::CharacteristicTooSmall(_) => "CHARACTERISTIC_TOO_SMALL",
            Error::InternalInconsistency(_) => "INTERNAL_INCONSISTENCY",
            Error::SingularPoint => "SINGULAR_POINT",
            Error::DegenerateFiber => "DEGENERATE_FIBER",
            Error::NotASquare => "NOT_A_SQUARE",
            Error::ReconstructionFailure => "RECONSTRUCTION_FAILURE",
            Error::InconsistentOde => "INCONSISTENT_ODE",
            Error::NonUnitConstantTerm => "NON_UNIT_CONSTANT_TERM",
            Error::SingularCurve => "SINGULAR_CURVE",
            Error::NotAGroup => "NOT_A_GROUP",
            Error::WrongOrder(_) => "WRONG_ORDER",
            Error::KernelNotGaloisStable => "KERNEL_NOT_GALOIS_STABLE",
            Error::UnsupportedCharacteristic(_) => "UNSUPPORTED_CHARACTERISTIC",
            Error::BudgetExceeded(_) => "BUDGET_EXCEEDED",
            Error::NoEmbedding => "NO_EMBEDDING",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
        }
    }

    /// Whether the error signals a violated mathematical invariant rather than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::InternalInconsistency(_) | Error::DegenerateFiber
        )
    }
}
