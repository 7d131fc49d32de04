use std::fmt;

pub use anosovlab::ErrorKind;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    /// pipeline stage that failed, when known
    pub stage: Option<&'static str>,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::InvalidInput, stage: None, message: message.into() }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Numeric, stage: None, message: message.into() }
    }

    pub fn at(mut self, stage: &'static str) -> Self {
        self.stage.get_or_insert(stage);
        self
    }

    /// 2 invalid input, 3 numeric failure, 4 capacity exceeded.
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::InvalidInput => 2,
            ErrorKind::Numeric => 3,
            ErrorKind::Capacity => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stage {
            Some(stage) => write!(f, "{stage}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for CliError {}

impl From<anosovlab::Error> for CliError {
    fn from(e: anosovlab::Error) -> Self {
        Self { kind: e.kind(), stage: None, message: e.to_string() }
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::invalid(e.to_string())
            }
        }
    )*};
}

invalid_from!(std::io::Error, serde_json::Error, toml::de::Error, toml::ser::Error, csv::Error, hex::FromHexError);

/// Tags the error of a stage with its name.
pub trait Stage<T> {
    fn stage(self, stage: &'static str) -> CliResult<T>;
}

impl<T, E: Into<CliError>> Stage<T> for std::result::Result<T, E> {
    fn stage(self, stage: &'static str) -> CliResult<T> {
        self.map_err(|e| e.into().at(stage))
    }
}
