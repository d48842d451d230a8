use std::fmt;

use torsionlab_core::Error;

use crate::formats::FormatError;

pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
/// Verification ran to completion but some property failed.
pub const EXIT_FAILED: u8 = 1;
/// IO trouble writing outputs.
pub const EXIT_IO: u8 = 74;

/// An error with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(EXIT_IO, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::UnknownIdentifier { .. } => EXIT_USAGE,
        Error::Aliasing { .. } | Error::RootsDidNotConverge { .. } | Error::DegenerateData(_) => EXIT_NUMERICAL,
        _ => EXIT_DOMAIN,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::new(exit_code(&e), e.to_string())
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io(e) => CliError::io(e.to_string()),
            FormatError::Malformed(_) => CliError::usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(CliError::from(Error::DegenerateTorsion).code, 2);
        assert_eq!(CliError::from(Error::Aliasing { step: 1.0, limit: 0.5, context: "x" }).code, 3);
        assert_eq!(CliError::from(Error::Parse { position: 0, message: "x".into() }).code, 64);
    }
}
