//! Core of the CST toolkit: an arena-backed concrete syntax tree, its
//! invertible token-stream serialization, code rendering, structure-aware
//! training objectives, tokenizer vocabulary manifests, and repair of
//! malformed (model-generated) streams.
//!
//! Everything here is pure and allocation-only; parsing source text into a
//! [`CstTree`] is the job of a parser adapter living in a `std` crate.
//!
//! ```
//! use cstkit_core::{serialize, deserialize_structure, LanguageId, NodeKind, TreeBuilder};
//!
//! let mut b = TreeBuilder::new();
//! b.open(NodeKind::new("module").unwrap(), None).unwrap();
//! b.open(NodeKind::new("identifier").unwrap(), None).unwrap();
//! b.terminal("x", None).unwrap();
//! b.close().unwrap();
//! b.close().unwrap();
//! let tree = b.finish(LanguageId::new("python").unwrap(), "x".into(), false).unwrap();
//!
//! let stream = serialize(&tree);
//! assert_eq!(stream.to_text(), "(_.module (_.identifier x identifier._) module._)");
//! let back = deserialize_structure(&stream).unwrap();
//! assert!(cstkit_core::tree_equal(&tree, &back));
//! ```
#![no_std]

extern crate alloc;

pub mod decode;
mod error;
mod kind;
pub mod objectives;
pub mod render;
mod serial;
pub mod token;
mod tree;
pub mod vocab;

pub use decode::{lex_stream, repair, to_code, DecodeMode, Decoded, RepairAction, RepairReport};
pub use error::Error;
pub use kind::{LanguageId, NodeKind};
pub use objectives::{
    make_declm, make_mnp, make_msp, make_tetr, make_trte, select_mask_subtrees, ExampleMeta, MaskingConfig, Objective,
    ObjectiveExample, Piece, Sentinel, SentinelScheme, DEFAULT_MAX_SENTINELS,
};
pub use render::{render, RenderStyle, Rendered};
pub use serial::{deserialize, deserialize_structure, serialize, serialize_with_ranges, SerializedTree};
pub use token::{StructToken, WsMarker};
pub use tree::{tree_equal, CstTree, NodeData, NodeId, NodeRef, NodeStats, Span, TreeBuilder};
pub use vocab::{emit_manifest, KindInventory, VocabManifest};

pub type Result<T, E = Error> = core::result::Result<T, E>;
