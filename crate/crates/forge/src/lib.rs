//! JSON documents, file input and thread-level parallelism for
//! `povm-forge-core`, plus the `povm-forge` command line.

pub mod document;
pub mod json;
pub mod parallel;

use std::io::Read;
use std::path::Path;

use thiserror::Error;

/// Process exit codes of the command line.
pub mod exit {
    pub const OK: i32 = 0;
    pub const MALFORMED_INPUT: i32 = 1;
    pub const VERIFY_FAILED: i32 = 2;
    pub const CERTIFY_PRECONDITION: i32 = 3;
    pub const RESIDUAL_FLOOR: i32 = 4;
    pub const ITERATION_LIMIT: i32 = 5;
}

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] povm_forge_core::Error),
}

/// Reads a whole file, or standard input for `-`.
pub fn read_input(path: &Path) -> Result<String, ForgeError> {
    let io = |source| ForgeError::Io {
        path: path.display().to_string(),
        source,
    };
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(io)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}
