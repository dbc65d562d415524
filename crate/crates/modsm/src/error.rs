use std::path::PathBuf;

use modsm_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: CoreError },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{0}")]
    Usage(String),

    /// A check ran and came out negative; the report is already printed.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 1 for domain failures, 2 for usage and input problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
            CliError::Core(e) => match e {
                CoreError::Syntax { .. }
                | CoreError::ArityMismatch { .. }
                | CoreError::SymbolClash { .. }
                | CoreError::AggregateBound
                | CoreError::DuplicatePredicate(_)
                | CoreError::ListMismatch(_)
                | CoreError::StepNameCollision(_)
                | CoreError::UnexpectedStep(_)
                | CoreError::FreeVariable(_)
                | CoreError::InvalidModule(_) => 2,
                _ => 1,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
