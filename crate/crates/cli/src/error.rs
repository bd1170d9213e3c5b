use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Numeric {
        context: String,
        #[source]
        source: parabolic::Error,
    },

    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric { source, .. } if source.is_input_error() => 2,
            CliError::Numeric { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub fn context(self, ctx: impl Into<String>) -> Self {
        match self {
            CliError::Numeric { context, source } if context.is_empty() => {
                CliError::Numeric { context: ctx.into(), source }
            }
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", ctx.into())),
            other => other,
        }
    }
}

impl From<parabolic::Error> for CliError {
    fn from(source: parabolic::Error) -> Self {
        CliError::Numeric { context: String::new(), source }
    }
}
