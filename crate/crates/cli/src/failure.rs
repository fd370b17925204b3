use std::fmt;

use gabor_tight::Error;

pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DISAGREE: u8 = 3;
pub const EXIT_NOT_FRAME: u8 = 4;
pub const EXIT_NOT_INTEGER: u8 = 5;
pub const EXIT_NO_CONVERGENCE: u8 = 6;

/// An error message with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure::new(EXIT_USAGE, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotAFrame { .. } => EXIT_NOT_FRAME,
            Error::NotIntegerOversampling { .. } => EXIT_NOT_INTEGER,
            Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
