use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] pareto_tour::Error),
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 usage, 3 infeasible or unacceptable input, 4 numerical failure,
    /// 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use pareto_tour::Error as E;
        match self {
            Self::Usage(_) | Self::Core(E::InvalidInput(_)) => 2,
            Self::Core(E::Infeasible(_) | E::Degenerate(_) | E::Schema(_)) => 3,
            Self::Core(E::Numerical(_)) => 4,
            Self::Core(E::Io(_) | E::Json(_)) | Self::File { .. } => 1,
        }
    }
}

pub fn file_error(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::File { path: path.display().to_string(), source }
}
