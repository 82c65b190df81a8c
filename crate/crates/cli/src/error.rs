use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error in {field}: {message}")]
    Schema { field: String, message: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("missing input: {0}")]
    Missing(String),
    #[error(transparent)]
    Core(#[from] ainf_core::Error),
}

impl CliError {
    pub fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema { field: field.into(), message: message.into() }
    }

    pub fn from_json(e: serde_json::Error) -> Self {
        match e.classify() {
            serde_json::error::Category::Data => {
                CliError::schema(format!("document (line {}, column {})", e.line(), e.column()), e.to_string())
            }
            _ => CliError::Parse { line: e.line(), column: e.column(), message: e.to_string() },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
