use std::fmt;

/// Determines the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Input,
    Internal,
    Consistency,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Input => 2,
            Kind::Internal => 3,
            Kind::Consistency => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Input => "invalid_input",
            Kind::Internal => "internal",
            Kind::Consistency => "consistency",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: Kind,
    pub code: String,
    pub message: String,
}

impl CliError {
    pub fn input(code: &str, message: impl Into<String>) -> Self {
        CliError { kind: Kind::Input, code: code.into(), message: message.into() }
    }

    pub fn consistency(message: impl Into<String>) -> Self {
        CliError { kind: Kind::Consistency, code: "consistency_failure".into(), message: message.into() }
    }

    /// Prefixes the message with where the error happened.
    pub fn at(mut self, context: &str) -> Self {
        self.message = format!("{context}: {}", self.message);
        self
    }
}

impl From<subtori_core::Error> for CliError {
    fn from(e: subtori_core::Error) -> Self {
        let kind = if e.is_internal() { Kind::Internal } else { Kind::Input };
        CliError { kind, code: e.code().into(), message: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.message, self.code)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
