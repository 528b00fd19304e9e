//! Error types shared across the crate.

use thiserror::Error;

use crate::algebra::SymbolRef;
use crate::model::{MessageId, ServerId};

/// Errors produced by graph construction, planning, answering and decoding.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A numeric parameter fell outside its accepted range.
    #[error("parameter out of range: {0}")]
    ParameterRange(String),

    /// A privacy rule was applied to the wrong graph kind.
    #[error("privacy setting `{setting}` is not defined for {kind} graphs")]
    KindMismatch { setting: String, kind: String },

    /// A query referenced a message the server does not store.
    #[error("locality violation: W{} is not stored at server {}", msg.index(), server.index())]
    Locality { server: ServerId, msg: MessageId },

    /// A symbol reference could not be resolved against a store.
    #[error("unresolved symbol reference W{}[{}]", .0.msg.index(), .0.sym)]
    Unresolved(SymbolRef),

    /// A retrieval arc violated the window preconditions.
    #[error("invalid arc: {0}")]
    InvalidArc(String),

    /// Decoding targets were not reachable from the received answers.
    #[error("undecodable plan: {} target(s) outside the answer span", .0.len())]
    Undecodable(Vec<SymbolRef>),

    /// Answers did not line up with the plan they claim to answer.
    #[error("answer mismatch at server {}: expected {expected} value(s), got {got}", server.index())]
    AnswerShape {
        server: ServerId,
        expected: usize,
        got: usize,
    },

    /// A simulated transport failure.
    #[error("session failed: {0}")]
    Session(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
