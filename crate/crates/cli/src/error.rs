use serde_json::json;

/// Failures reported by the command-line front end.
///
/// `Usage` exits with status 1, everything else with status 2 and a
/// one-line JSON object carrying a stable `code`.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(witnesskit::Error),
    Unsupported(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain(e) => e.code(),
            CliError::Unsupported(_) => "unsupported",
            CliError::Io(_) => "io",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Unsupported(m) | CliError::Io(m) => m.clone(),
            CliError::Domain(e) => e.to_string(),
        }
    }

    pub fn to_json_line(&self) -> String {
        json!({"error": {"code": self.code(), "message": self.message()}}).to_string()
    }
}

impl From<witnesskit::Error> for CliError {
    fn from(e: witnesskit::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
