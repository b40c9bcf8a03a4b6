//! Exit-code contract: 1 configuration, 2 geometry, 3 numerics, 4 coverage.

use std::fmt;

use enclosure::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Config = 1,
    Geometry = 2,
    Numeric = 3,
    Coverage = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Config,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Numeric,
            message: message.into(),
        }
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Config(_) | Error::Data(_) | Error::Io(_) | Error::Json(_) => ExitKind::Config,
            Error::Structure(_) | Error::Geometry(_) | Error::Regularity { .. } | Error::Mesh(_) => ExitKind::Geometry,
            Error::Numeric(_) | Error::Range { .. } | Error::Signal(_) | Error::Window(_) | Error::Inconsistent(_) => {
                ExitKind::Numeric
            }
            Error::Coverage(_) => ExitKind::Coverage,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(e.to_string())
    }
}
