use breakscan::Error;

/// Failure of a command, split by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unsupported method or parameter combination: exit 2.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or unsuitable data: exit 1.
    #[error(transparent)]
    Data(Error),
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed report: {0}")]
    Report(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Data(_) | Self::Read { .. } | Self::Write { .. } | Self::Report(_) => 1,
        }
    }
}

impl CliError {
    pub(crate) fn reading(path: &str, e: Error) -> Self {
        match Self::from(e) {
            Self::Data(source) => Self::Read {
                path: path.to_owned(),
                source,
            },
            other => other,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Unsupported(_) | Error::InvalidParameter(_) | Error::Infeasible { .. } | Error::WindowTooSmall { .. } => {
                Self::Usage(e.to_string())
            }
            other => Self::Data(other),
        }
    }
}
