use std::process::ExitCode;

/// Failures classified by the process exit code they map to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("computation error: {0}")]
    Compute(String),
    #[error("missing artifact {0}")]
    MissingArtifact(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io { context: context.into(), source }
    }

    /// 1 for configuration problems, 2 for everything that goes wrong after
    /// the configuration was accepted.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Config(_) => ExitCode::from(1),
            _ => ExitCode::from(2),
        }
    }
}

impl From<admittance_pareto::Error> for CliError {
    fn from(e: admittance_pareto::Error) -> Self {
        Self::Compute(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
