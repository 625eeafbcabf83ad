use std::fmt;

use serde::Serialize;

/// A problem with the input document, located by a JSON pointer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputError {
    pub path: String,
    pub message: String,
}

impl InputError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> InputError {
        InputError { path: path.into(), message: message.into() }
    }

    pub fn core(path: impl Into<String>, err: cartan_core::Error) -> InputError {
        InputError::new(path, err.to_string())
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for InputError {}
