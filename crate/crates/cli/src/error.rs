use thiserror::Error;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{path}, line {line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("cannot write output: {0}")]
    Output(String),

    #[error(transparent)]
    Core(#[from] record_pareto::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use record_pareto::Error as E;
        match self {
            CliError::Unsupported(_) => EXIT_UNSUPPORTED,
            CliError::Core(E::UnsupportedCombination(_) | E::UnknownMethod(_)) => EXIT_UNSUPPORTED,
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_UNSUPPORTED => "unsupported",
            EXIT_NUMERICAL => "numerical",
            _ => "input",
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
