//! Command-line front end: expression syntax, evaluation and the command set.

pub mod commands;
pub mod eval;
pub mod output;
pub mod parse;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] parse::ParseError),
    #[error(transparent)]
    Engine(#[from] psdo_core::Error),
    #[error("{0}")]
    Usage(String),
}
