use thiserror::Error;

/// Failures of a CLI run, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("data: {0}")]
    Data(String),

    #[error("solver: {0}")]
    Solver(tucker_rtr::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Data(_) | Self::Io(_) => 2,
            Self::Solver(_) => 3,
        }
    }
}

impl From<tucker_rtr::Error> for CliError {
    fn from(e: tucker_rtr::Error) -> Self {
        use tucker_rtr::Error as E;
        match e {
            E::InvalidConfig(msg) => Self::Usage(msg),
            E::RankTooLarge { .. } | E::OrderTooSmall(_) => Self::Usage(e.to_string()),
            E::IndexOutOfBounds { .. } | E::EmptySampling | E::UnsortedSampling { .. } => {
                Self::Data(e.to_string())
            }
            other => Self::Solver(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Data(e.to_string())
    }
}
