//! Command-line front end: scenario configuration, the prediction runner,
//! and diagnostic reports. The binary in `main.rs` is a thin dispatcher
//! over this library so integration tests can drive runs in-process.

pub mod config;
pub mod runner;

/// Failures of the command-line layer, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad usage, unparseable config, invalid argument values. Exit 2.
    Config(String),
    /// Problem size beyond the simulator cap. Exit 3.
    Cap(String),
    /// Numerical consistency failure in an otherwise valid run. Exit 4.
    Numeric(String),
    /// Filesystem failure while writing artifacts. Exit 1.
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Cap(msg) | CliError::Numeric(msg) => {
                write!(f, "{msg}")
            }
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qfpe::Error> for CliError {
    fn from(e: qfpe::Error) -> Self {
        match e {
            qfpe::Error::InvalidArgument(_) | qfpe::Error::DimensionMismatch(_) => {
                CliError::Config(e.to_string())
            }
            qfpe::Error::SizeCap(_) => CliError::Cap(e.to_string()),
            qfpe::Error::Domain(_) | qfpe::Error::Normalization(_) | qfpe::Error::Consistency(_) => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
