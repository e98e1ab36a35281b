use thiserror::Error;

/// Anything that stops a scenario from completing. All map to exit code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}:{line}:{column}: field `{field}`: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("engine error at {point}: {source}")]
    Engine {
        point: String,
        #[source]
        source: ntlim_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn engine(point: impl Into<String>, source: ntlim_core::Error) -> CliError {
        CliError::Engine {
            point: point.into(),
            source,
        }
    }
}
