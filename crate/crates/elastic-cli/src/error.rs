use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Model(#[from] elastic_model::ModelError),
    #[error(transparent)]
    InitData(#[from] elastic_initdata::InitDataError),
    #[error(transparent)]
    Solver(#[from] elastic_charsolver::SolverError),
    #[error(transparent)]
    Oracle(#[from] elastic_oracle::OracleError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("sweep job {job}: {source}")]
    Job { job: String, source: Box<CliError> },
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { path: path.into(), message: message.into() }
    }

    /// 2 for usage and config problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Json(_) => 2,
            CliError::Job { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
