//! Registered grammars.

use std::collections::BTreeSet;
use std::path::Path;

use cstkit_core::{LanguageId, NodeKind, RenderStyle};

use crate::error::{KitError, Result};

/// How line structure reaches the serialized stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Inter-token whitespace is dropped.
    FreeForm,
    /// Newline, indent and dedent markers are synthesized from the source
    /// (the parser keeps them hidden).
    Indentation,
    /// The grammar exposes newline tokens; runs of blank lines become the
    /// blank-line marker.
    NewlineTokens,
}

#[derive(Debug)]
pub struct Grammar {
    pub name: &'static str,
    pub extensions: &'static [&'static str],
    language: fn() -> tree_sitter::Language,
    /// Kinds kept as a single leaf holding their full text, because their
    /// children do not cover all of it (string literals and the like).
    pub atomic_kinds: &'static [&'static str],
    pub comment_kinds: &'static [&'static str],
    pub layout: Layout,
    pub style: RenderStyle,
}

impl Grammar {
    pub fn language(&self) -> tree_sitter::Language {
        (self.language)()
    }

    pub fn id(&self) -> LanguageId {
        LanguageId::new(self.name).expect("registered names are valid")
    }

    /// Named, visible node kinds the grammar declares.
    pub fn declared_kinds(&self) -> BTreeSet<NodeKind> {
        let lang = self.language();
        (0..lang.node_kind_count() as u16)
            .filter(|&id| lang.node_kind_is_named(id) && lang.node_kind_is_visible(id))
            .filter_map(|id| lang.node_kind_for_id(id))
            .filter_map(|k| NodeKind::new(k).ok())
            .collect()
    }
}

static GRAMMARS: [Grammar; 3] = [
    Grammar {
        name: "python",
        extensions: &["py"],
        language: tree_sitter_python::language,
        atomic_kinds: &["string"],
        comment_kinds: &["comment"],
        layout: Layout::Indentation,
        style: RenderStyle::indentation("    ", &["#"]),
    },
    Grammar {
        name: "go",
        extensions: &["go"],
        language: tree_sitter_go::language,
        atomic_kinds: &["interpreted_string_literal", "raw_string_literal", "rune_literal"],
        comment_kinds: &["comment"],
        layout: Layout::NewlineTokens,
        // no cosmetic line breaks: a newline can end a Go statement
        style: RenderStyle {
            indent_sensitive: false,
            indent_unit: "\t",
            line_comment_prefixes: &["//"],
            break_after_braces: false,
            brace_indent: true,
        },
    },
    Grammar {
        name: "java",
        extensions: &["java"],
        language: tree_sitter_java::language,
        atomic_kinds: &["string_literal", "character_literal", "text_block"],
        comment_kinds: &["line_comment", "block_comment", "comment"],
        layout: Layout::FreeForm,
        style: RenderStyle {
            indent_sensitive: false,
            indent_unit: "    ",
            line_comment_prefixes: &["//"],
            break_after_braces: true,
            brace_indent: true,
        },
    },
];

pub fn grammars() -> &'static [Grammar] {
    &GRAMMARS
}

pub fn grammar(name: &str) -> Result<&'static Grammar> {
    GRAMMARS
        .iter()
        .find(|g| g.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| KitError::UnknownLanguage(name.to_string()))
}

pub fn grammar_for_path(path: &Path) -> Option<&'static Grammar> {
    let ext = path.extension()?.to_str()?;
    GRAMMARS.iter().find(|g| g.extensions.contains(&ext))
}
