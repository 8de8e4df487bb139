//! IO, file formats and command implementations for the soliton toolkit;
//! the numerics live in `revsol-core`.

pub mod error;
pub mod formats;
pub mod manifest;
pub mod profile_file;
pub mod runner;
