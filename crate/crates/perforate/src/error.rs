use std::path::PathBuf;

use perforate_core::Error as CoreError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] CoreError),
    /// Core failure raised while running a named study.
    #[error("{study}: {source}")]
    Study {
        study: &'static str,
        #[source]
        source: CoreError,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Format(String),
    #[error("missing artifact: {0}")]
    MissingArtifact(String),
    #[error("manifest verification failed: {0}")]
    Integrity(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn in_study(study: &'static str) -> impl FnOnce(CoreError) -> Error {
        move |source| Error::Study { study, source }
    }

    /// Process exit code: 2 for invalid input, 3 for solver failures, 1 for
    /// IO trouble.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Core(e) | Error::Study { source: e, .. } => core_exit_code(e),
            Error::Io { .. } | Error::Csv(_) => 1,
            Error::Json { .. }
            | Error::Config(_)
            | Error::Format(_)
            | Error::MissingArtifact(_)
            | Error::Integrity(_) => 2,
        }
    }
}

fn core_exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::SolverDiverged { .. }
        | CoreError::TimeStepRejected { .. }
        | CoreError::StabilityCapExceeded { .. }
        | CoreError::ChannelBoundViolated { .. } => 3,
        _ => 2,
    }
}
