use thiserror::Error;

use crate::conflict::ConflictWitness;
use crate::net::NetViolation;
use crate::process::{CondId, ProcessViolation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("multiset count overflow")]
    Overflow,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate declaration of `{0}`")]
    DuplicateDeclaration(String),
    #[error("invalid net: {}", join(.0))]
    InvalidNet(Vec<NetViolation>),
    #[error("step must be non-empty")]
    EmptyStep,
    #[error("step is not enabled")]
    NotEnabled,
    #[error("not a firing sequence: transition at index {index} is not enabled")]
    NotFiringSequence { index: usize },
    #[error("invalid process: {}", join(.0))]
    InvalidProcess(Vec<ProcessViolation>),
    #[error("transition set is not closed under causal predecessors")]
    NotCausallyClosed,
    #[error("unknown occurrence place {0}")]
    UnknownCondition(CondId),
    #[error("swap places carry different labels")]
    LabelsDiffer,
    #[error("swap places are causally related")]
    CausallyRelated,
    #[error("firing sequence is not compatible with the process")]
    Incompatible,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("net is not binary-conflict-free: {} transitions in conflict after a firing sequence of length {}", .0.step.len(), .0.word.len())]
    NotBinaryConflictFree(Box<ConflictWitness>),
    #[error("certificate does not replay: {0}")]
    InvalidCertificate(String),
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
