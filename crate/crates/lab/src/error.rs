use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("bad configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] cusp_core::Error),
    #[error("sample {index} ({x}): {source}")]
    Sample {
        index: usize,
        x: String,
        source: cusp_core::Error,
    },
    #[error("tolerance not met: {}", .0.join(", "))]
    Tolerance(Vec<String>),
    #[error("oracle mismatch: {0}")]
    Oracle(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    /// Process exit code: 1 bad input or domain, 2 precision exhausted,
    /// 3 tolerance not met, 4 oracle mismatch.
    pub fn exit_code(&self) -> i32 {
        use cusp_core::Error as E;
        let core = match self {
            LabError::Core(e) | LabError::Sample { source: e, .. } => e,
            LabError::Tolerance(_) => return 3,
            LabError::Oracle(_) => return 4,
            LabError::Config(_) | LabError::Io(_) => return 1,
        };
        match core {
            E::PrecisionExhausted { .. } | E::BudgetExceeded { .. } | E::Tie => 2,
            E::InsufficientEvents { .. } => 3,
            _ => 1,
        }
    }
}
