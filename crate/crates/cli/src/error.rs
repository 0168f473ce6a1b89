use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// A file did not parse; `line` is 1-based.
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] mgpll_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }

    /// Stable machine-readable category, printed as `error:<category>: ...`.
    pub fn category(&self) -> &'static str {
        use mgpll_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Csv(_) | CliError::Json(_) => "parse",
            CliError::Io { .. } => "io",
            CliError::Config(_) => "config",
            CliError::Core(e) => match e {
                E::InvalidConfig(_) | E::UnsupportedLevel => "config",
                E::Diverged { .. } | E::NonFinite(_) => "numeric",
                _ => "data",
            },
        }
    }
}
