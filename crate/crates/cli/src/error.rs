use thiserror::Error;

/// Failure of a command, carrying the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("spec error: {0}")]
    Spec(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("optimizer failure: {0}")]
    Optimizer(String),
    #[error("bound family is not monotone in r: {0}")]
    Nesting(String),
    #[error("unbounded: {0}")]
    Unbounded(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) | CliError::Usage(_) => 2,
            CliError::Optimizer(_) | CliError::Nesting(_) => 3,
            CliError::Unbounded(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<ncdegree::Error> for CliError {
    fn from(e: ncdegree::Error) -> Self {
        use ncdegree::Error as E;
        match e {
            E::Unbounded { .. } => CliError::Unbounded(format!(
                "{e}; the observable has no finite extremum in this direction"
            )),
            E::NonMonotone { .. } => CliError::Nesting(e.to_string()),
            E::Spec(_)
            | E::InvalidInput(_)
            | E::InvalidState(_)
            | E::DegreeTooLarge { .. }
            | E::NonHermitian(_)
            | E::NonFinite(_)
            | E::MultimodeUnsupported(_)
            | E::DimensionMismatch { .. }
            | E::CoincidentAmplitudes { .. }
            | E::EmptyConfiguration
            | E::Unnormalized(_)
            | E::NonUnitary(_)
            | E::ApproximationDomain(_) => CliError::Spec(e.to_string()),
            _ => CliError::Optimizer(e.to_string()),
        }
    }
}
