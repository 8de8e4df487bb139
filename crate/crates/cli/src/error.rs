//! Process-level error type mapping onto the documented exit codes.

use std::fmt;

#[derive(Debug)]
pub enum AppError {
    /// Bad input or usage (exit 1).
    Usage(String),
    /// Numerical failure during integration or evolution (exit 2).
    Numerical(String),
    /// A verification check failed its tolerance (exit 3).
    Verification(String),
}

impl AppError {
    pub fn usage(msg: String) -> AppError {
        AppError::Usage(msg)
    }

    pub fn numerical(msg: String) -> AppError {
        AppError::Numerical(msg)
    }

    pub fn verification(msg: String) -> AppError {
        AppError::Verification(msg)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Numerical(_) => 2,
            AppError::Verification(_) => 3,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(m) => write!(f, "input error: {m}"),
            AppError::Numerical(m) => write!(f, "numerical failure: {m}"),
            AppError::Verification(m) => write!(f, "verification failure: {m}"),
        }
    }
}

impl std::error::Error for AppError {}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Numerical(format!("io: {e}"))
    }
}
