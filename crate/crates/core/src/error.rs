use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("public randomness exhausted: requested {requested} bits with {remaining} of {budget} remaining")]
    BudgetExhausted {
        requested: usize,
        remaining: usize,
        budget: usize,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("insufficient population: {0}")]
    InsufficientPopulation(String),

    #[error("infeasible partition: {0}")]
    InfeasiblePartition(String),

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("malformed transcript: {0}")]
    Transcript(String),
}

impl Error {
    /// True for errors that mean the configuration cannot run at all, as
    /// opposed to a bug or a broken input file.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::BudgetExhausted { .. }
                | Error::InsufficientPopulation(_)
                | Error::InfeasiblePartition(_)
                | Error::DegenerateInput(_)
                | Error::Dimension(_)
                | Error::Parameter(_)
        )
    }
}
