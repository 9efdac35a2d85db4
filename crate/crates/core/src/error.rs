use thiserror::Error;

/// Everything that can go wrong while evaluating half-maps, jets or orbit searches.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HalfMapError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("left half-map does not exist: {0}")]
    NonexistentHalfMap(String),

    #[error("W(y) must be positive on the integration range: {0}")]
    DomainError(String),

    #[error("principal value undefined: {0}")]
    PvUndefined(String),

    #[error("y = {value} is outside the admissible set {domain}")]
    OutOfDomain { value: f64, domain: String },

    #[error("root finder did not converge after {iterations} iterations: {context}")]
    NoConvergence { iterations: usize, context: String },

    #[error("derivative undefined at a tangency point (P(y0) = 0, y0 = {0})")]
    TangencyPoint(f64),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("series evaluated on the wrong side of its anchor: {0}")]
    WrongSide(String),

    #[error("series is not invertible: {0}")]
    NotInvertible(String),

    #[error("no return to the section within the budget: {0}")]
    NoReturn(String),

    /// The partial report holds everything resolved before the budget ran out.
    #[error("search budget exceeded: {reason}")]
    SearchBudgetExceeded {
        reason: String,
        partial: Box<crate::pwl::CrossingOrbitReport>,
    },
}

pub type Result<T> = std::result::Result<T, HalfMapError>;
