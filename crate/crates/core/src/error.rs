use alloc::string::String;

use crate::kind::NodeKind;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid node kind {0:?}: must be non-empty and contain no whitespace")]
    InvalidKind(String),

    #[error("invalid language id {0:?}")]
    InvalidLanguage(String),

    #[error("malformed tree: {0}")]
    MalformedTree(&'static str),

    #[error("unbalanced stream at token {index}: {reason}")]
    UnbalancedStream { index: usize, reason: &'static str },

    #[error("kind mismatch at token {index}: `{close}._)` closes `(_.{open}`")]
    KindMismatch { index: usize, open: NodeKind, close: NodeKind },

    #[error("render failure: {0}")]
    RenderFailure(&'static str),

    #[error("invalid masking config: {0}")]
    InvalidConfig(&'static str),

    #[error("tree has no maskable non-root non-terminal")]
    NoCandidates,

    #[error("record has no natural-language text")]
    MissingNl,

    #[error("kind inventory is empty for {0}")]
    EmptyKinds(String),

    #[error("stream has neither an opening marker nor any terminal")]
    Unrepairable,
}
