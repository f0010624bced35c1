use unbias_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Stable machine-readable tag used in the `error[tag]:` prefix.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => match e {
                CoreError::EmptySample => "empty-sample",
                CoreError::Dimension(_) => "dimension",
                CoreError::Arity { .. } => "arity",
                CoreError::InsufficientSample { .. } => "insufficient-sample",
                CoreError::Degenerate(_) => "degenerate",
                CoreError::Singular(_) => "singular",
                CoreError::UnsupportedOrder(_) => "unsupported-order",
                CoreError::MomentOrder { .. } => "moment-order",
                CoreError::Invalid(_) => "invalid",
                CoreError::Unstable(_) => "unstable",
                CoreError::Inexact(_) => "inexact",
            },
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Io(_) => "io",
            CliError::Csv(_) => "csv",
            CliError::Json(_) => "json",
        }
    }

    /// One line: `error[code]: message`, with embedded newlines flattened.
    pub fn line(&self) -> String {
        format!("error[{}]: {}", self.code(), self.to_string().replace('\n', " "))
    }
}
