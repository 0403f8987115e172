use thiserror::Error;

/// Errors raised by solvers, probes and constructions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violates a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The requested quantity is undefined for this input (e.g. a ratio of zero norms).
    #[error("domain error: {0}")]
    Domain(String),

    /// Newton iteration did not reach the residual tolerance.
    #[error("Newton iteration failed at t = {time}: residual {residual:e} after {iterations} iterations")]
    StepFailure {
        time: f64,
        iterations: usize,
        residual: f64,
    },

    /// NaN or infinity appeared in the discrete state.
    #[error("numeric blow-up at t = {time}")]
    NumericBlowup { time: f64 },

    /// A tridiagonal solve hit a zero pivot.
    #[error("singular tridiagonal system at t = {time} (pivot {pivot})")]
    SingularSystem { time: f64, pivot: usize },

    /// A discrete solution that must stay positive did not.
    #[error("positivity violation: {0}")]
    PositivityViolation(String),

    /// Failure inside a control cycle.
    #[error("cycle {cycle}: {source}")]
    Cycle {
        cycle: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn in_cycle(self, cycle: usize) -> Self {
        Error::Cycle {
            cycle,
            source: Box::new(self),
        }
    }
}
