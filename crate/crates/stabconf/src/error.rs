use serde::Serialize;
use stabconf_core::Error as CoreError;

/// Which part of the input was at fault; decides the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Config,
    Data,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Data => 3,
            ErrorKind::Internal => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, thiserror::Error)]
#[error("{}", self.render())]
pub struct CliError {
    pub kind: ErrorKind,
    pub field: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ErrorKind, field: Option<&str>, message: impl Into<String>) -> Self {
        Self {
            kind,
            field: field.map(str::to_owned),
            message: message.into(),
        }
    }

    pub fn config(field: &str, message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Config, Some(field), message)
    }

    pub fn data(field: &str, message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Data, Some(field), message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Internal, None, message)
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }

    fn render(&self) -> String {
        let kind = match self.kind {
            ErrorKind::Config => "config error",
            ErrorKind::Data => "data error",
            ErrorKind::Internal => "internal error",
        };
        match &self.field {
            Some(f) => format!("{kind} in `{f}`: {}", self.message),
            None => format!("{kind}: {}", self.message),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }

    /// Attributes a core error to a user-facing field, keeping the kind.
    pub fn in_field(mut self, field: &str) -> Self {
        self.field = Some(field.to_owned());
        self
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let message = e.to_string();
        match e {
            CoreError::AlphaOutOfRange(_) => Self::config("alpha", message),
            CoreError::InvalidParameter { name, .. } => Self::config(name, message),
            CoreError::NonFinite(what) | CoreError::Empty(what) => Self::data(what, message),
            CoreError::DimensionMismatch { .. } => Self::data("x", message),
            CoreError::OutOfDomain { index, .. } => Self::data(&format!("row {}", index + 1), message),
            CoreError::NotPositiveDefinite => Self::internal(message),
            CoreError::CandidateFit { source, .. } => {
                let inner: CliError = (*source).into();
                Self { message, ..inner }
            }
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
