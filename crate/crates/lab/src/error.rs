use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),

    #[error(transparent)]
    Core(#[from] poiseuille_core::Error),

    #[error("iteration stopped after {iterations} steps without converging (last difference {difference:e})")]
    NotConverged { iterations: usize, difference: f64 },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl LabError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        LabError::Io {
            context: context.into(),
            source,
        }
    }

    /// 2 for bad input, 3 for numerical failure, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        use poiseuille_core::Error as E;
        match self {
            LabError::Invalid(_) => 2,
            LabError::Core(E::Parameter { .. } | E::LengthMismatch { .. }) => 2,
            LabError::Core(_) | LabError::NotConverged { .. } => 3,
            LabError::Io { .. } | LabError::Csv(_) | LabError::Json(_) | LabError::Pool(_) => 1,
        }
    }
}
