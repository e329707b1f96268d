/// CLI failure classes, mapped one-to-one onto process exit codes:
/// validation failures exit 1, configuration errors 2, I/O errors 3.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Config(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation failure: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Map library errors onto the configuration class: they surface when the
/// requested run is inconsistent (shapes, sizes, domains).
impl From<thermavg_core::Error> for CliError {
    fn from(err: thermavg_core::Error) -> Self {
        CliError::Config(err.to_string())
    }
}
