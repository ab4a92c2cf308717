//! Parse source code into concrete syntax trees, serialize them to flat
//! marker-token streams, and generate structure-aware training data.
//!
//! The format-agnostic pieces (trees, streams, objectives, repair) live in
//! [`cstkit_core`]; this crate adds the tree-sitter grammars, corpus IO,
//! the parallel generation pipeline and the `cstkit` command line tool.

pub mod corpus;
pub mod error;
pub mod lang;
pub mod parse;
pub mod pipeline;
pub mod roundtrip;
pub mod stats;
pub mod vocab;

pub use corpus::{ingest, CorpusRecord, Ingested, InputFormat};
pub use error::{KitError, Result};
pub use lang::{grammar, grammar_for_path, grammars, Grammar, Layout};
pub use parse::{cached_parser, parse, CstParser, ParserCache};
pub use pipeline::{generate, GenerateConfig, GenerateSummary, Ledger, RejectReason};
pub use roundtrip::{check_round_trip, RoundTripFailure};
pub use stats::{format_table, stats, CorpusStats, LanguageCounts};
