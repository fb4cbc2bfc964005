//! File formats, table generation and the command-line driver on top of
//! [`argyris_core`].

pub mod commands;
pub mod config;
pub mod formats;
pub mod tables;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum FemError {
    #[error(transparent)]
    Core(#[from] argyris_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = FemError> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> FemError {
    let path = path.into();
    move |source| FemError::Io { path, source }
}
