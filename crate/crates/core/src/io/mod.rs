//! Text formats for trees and contexts, JSON reports and Graphviz export.

mod context;
mod document;
mod dot;
mod lex;
pub mod report;

pub use context::{parse_context_file, ContextDocument};
pub use document::{parse_tree_file, Expr, Problem, TreeDocument};
pub use dot::export_dot;

use thiserror::Error;

use crate::choice::ChoiceError;
use crate::model::ModelError;
use crate::tree::TreeError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unknown reference `{0}`")]
    UnknownReference(String),
    #[error("duplicate definition of `{0}`")]
    DuplicateDefinition(String),
    #[error("`{0}` cannot be written as a name")]
    InvalidName(String),
    #[error("event `{0}` is empty")]
    EmptyEvent(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Choice(#[from] ChoiceError),
}

impl IoError {
    pub(crate) fn syntax(line: usize, col: usize, message: impl Into<String>) -> IoError {
        IoError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }
}
