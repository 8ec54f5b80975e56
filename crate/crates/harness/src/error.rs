use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("seed {seed}, round {round}: numerical failure: {source}")]
    Numerical {
        seed: u64,
        round: usize,
        source: rirl_core::Error,
    },
    #[error("seed {seed}, round {round}: {source}")]
    Core {
        seed: u64,
        round: usize,
        source: rirl_core::Error,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// Process exit code: 3 for numerical failures, 2 for everything else
    /// (bad configs, unreadable inputs, invalid tasks).
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Numerical { .. } => 3,
            _ => 2,
        }
    }

    pub(crate) fn at(seed: u64, round: usize) -> impl FnOnce(rirl_core::Error) -> HarnessError {
        move |source| {
            if source.is_numerical() {
                HarnessError::Numerical { seed, round, source }
            } else {
                HarnessError::Core { seed, round, source }
            }
        }
    }

    pub(crate) fn io(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
        move |source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
