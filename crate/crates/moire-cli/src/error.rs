use moire::MoireError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Convergence(_) => 3,
            CliError::Assertion(_) => 4,
        }
    }
}

impl From<MoireError> for CliError {
    fn from(e: MoireError) -> Self {
        use MoireError::*;
        match e {
            InvalidLayers(_)
            | InvalidCutoff(_)
            | TunnellingLength { .. }
            | ProbeOnSpectrum { .. }
            | NotSimpleMagic { .. }
            | GridPole(_)
            | RotationLeavesBox { .. }
            | InvalidArgument(_)
            | DimensionMismatch { .. }
            | SingularResolvent { .. }
            | PoleAt(_) => CliError::Config(e.to_string()),
            Decomposition(_) | Convergence(_) | DegenerateOverlap { .. } | NonIntegralChern { .. } => {
                CliError::Convergence(e.to_string())
            }
            NegativeRadicand { .. } | BranchAmbiguity { .. } => CliError::Assertion(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
