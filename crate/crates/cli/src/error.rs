use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Pipeline(#[from] lantern_core::pipeline::PipelineError),
    #[error(transparent)]
    Train(#[from] lantern_core::trainer::TrainError),
    #[error(transparent)]
    Pack(#[from] lantern_core::distill::PackError),
    #[error(transparent)]
    QTable(#[from] lantern_core::qlearn::QTableError),
    #[error(transparent)]
    Llm(#[from] lantern_core::llm::LlmError),
    #[error(transparent)]
    Embed(#[from] lantern_core::semantic::EmbedError),
    #[error(transparent)]
    Metrics(#[from] lantern_core::metrics::MetricsError),
    #[error("malformed CSV {path}: {reason}")]
    MalformedCsv { path: String, reason: String },
    #[error("no run CSVs found in {0}")]
    NoRuns(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    /// 1 for configuration problems, 2 for everything that fails at run time.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            _ => 2,
        }
    }
}
