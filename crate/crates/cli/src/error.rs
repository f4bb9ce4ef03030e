use std::path::PathBuf;

use npspec_core::Error as CoreError;

/// Process exit code for usage and configuration problems.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit code for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("shape file {path}: {reason}")]
    Schema { path: PathBuf, reason: String },
    #[error("{stage}: {source}")]
    Numerical {
        stage: &'static str,
        #[source]
        source: CoreError,
    },
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical { .. } => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }

    /// Wraps a core error raised during `stage`. Argument and domain errors
    /// are the caller's fault and stay configuration errors.
    pub fn at(stage: &'static str) -> impl FnOnce(CoreError) -> CliError {
        move |e| match e {
            CoreError::InvalidIndex { .. }
            | CoreError::DegreeOverflow { .. }
            | CoreError::InsufficientExactness { .. }
            | CoreError::NotStarShaped { .. }
            | CoreError::Domain(_)
            | CoreError::InvalidArgument(_) => CliError::Config(format!("{stage}: {e}")),
            CoreError::ClusterOverlap { .. } => CliError::Numerical {
                stage,
                source: CoreError::Eigensolver(format!("{e}; try smaller |h| or a finer grid")),
            },
            other => CliError::Numerical {
                stage,
                source: other,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
