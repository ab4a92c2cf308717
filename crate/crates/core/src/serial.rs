use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::kind::{LanguageId, NodeKind};
use crate::render::{render_spans, RenderStyle};
use crate::token::StructToken;
use crate::tree::{CstTree, NodeData, TreeBuilder};
use crate::Error;

/// The flat token stream of a tree: every non-terminal contributes an
/// opening marker before its children and a closing marker after them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SerializedTree {
    pub tokens: Vec<StructToken>,
    pub language: LanguageId,
}

impl SerializedTree {
    /// Tokens joined by single spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{t}");
        }
        out
    }

    /// Splits on whitespace and classifies every word; see
    /// [`crate::lex_stream`].
    pub fn from_text(text: &str, language: LanguageId) -> SerializedTree {
        SerializedTree { tokens: crate::lex_stream(text), language }
    }

    pub fn marker_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_marker()).count()
    }
}

pub fn serialize(tree: &CstTree) -> SerializedTree {
    serialize_with_ranges(tree).0
}

/// Serializes and also returns, for every node id, the half-open range of
/// token positions its subtree occupies.
pub fn serialize_with_ranges(tree: &CstTree) -> (SerializedTree, Vec<(usize, usize)>) {
    let n = tree.len();
    let mut tokens = Vec::with_capacity(n * 2);
    let mut ranges = alloc::vec![(0usize, 0usize); n];
    // (node index, subtree end) of open non-terminals
    let mut open: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        while let Some(&(j, end)) = open.last() {
            if end != i {
                break;
            }
            close_node(tree, j, &mut tokens, &mut ranges);
            open.pop();
        }
        ranges[i].0 = tokens.len();
        match tree.slot_data(i) {
            NodeData::NonTerminal(k) => {
                tokens.push(StructToken::Open(k.clone()));
                open.push((i, i + tree.slot_size(i)));
            }
            NodeData::Terminal(p) => {
                tokens.push(StructToken::Terminal(p.clone()));
                ranges[i].1 = tokens.len();
            }
            NodeData::Layout(m) => {
                tokens.push(StructToken::Ws(*m));
                ranges[i].1 = tokens.len();
            }
        }
    }
    while let Some((j, _)) = open.pop() {
        close_node(tree, j, &mut tokens, &mut ranges);
    }
    (SerializedTree { tokens, language: tree.language().clone() }, ranges)
}

fn close_node(tree: &CstTree, i: usize, tokens: &mut Vec<StructToken>, ranges: &mut [(usize, usize)]) {
    if let NodeData::NonTerminal(k) = tree.slot_data(i) {
        tokens.push(StructToken::Close(k.clone()));
    }
    ranges[i].1 = tokens.len();
}

/// Strict inverse of [`serialize`]. The returned tree has no spans and an
/// empty source.
pub fn deserialize_structure(stream: &SerializedTree) -> Result<CstTree, Error> {
    let tokens = &stream.tokens;
    match tokens.first() {
        None => return Err(Error::UnbalancedStream { index: 0, reason: "empty stream" }),
        Some(StructToken::Open(_)) => {}
        Some(_) => {
            return Err(Error::UnbalancedStream { index: 0, reason: "stream must start with an opening marker" })
        }
    }
    let mut b = TreeBuilder::new();
    let mut closed = false;
    for (index, tok) in tokens.iter().enumerate() {
        if closed {
            return Err(Error::UnbalancedStream { index, reason: "content after the root closed" });
        }
        match tok {
            StructToken::Open(k) => {
                b.open(k.clone(), None)?;
            }
            StructToken::Close(k) => {
                let open: &NodeKind = b
                    .current_kind()
                    .ok_or(Error::UnbalancedStream { index, reason: "closing marker without an open node" })?;
                if open != k {
                    return Err(Error::KindMismatch { index, open: open.clone(), close: k.clone() });
                }
                b.close()?;
                closed = b.open_depth() == 0;
            }
            StructToken::Terminal(p) => {
                b.terminal(p.clone(), None)?;
            }
            StructToken::Ws(m) => {
                b.layout(*m, None)?;
            }
        }
    }
    if b.open_depth() > 0 {
        return Err(Error::UnbalancedStream { index: tokens.len(), reason: "missing closing marker" });
    }
    b.finish(stream.language.clone(), String::new(), false)
}

/// Strict inverse of [`serialize`]; the tree's source is its rendering
/// under `style` and every span is located in that rendering.
pub fn deserialize(stream: &SerializedTree, style: &RenderStyle) -> Result<CstTree, Error> {
    let mut tree = deserialize_structure(stream)?;
    let rendered = render_spans(&tree, style, true)?;
    tree.set_spans(rendered.text, rendered.spans.into_iter().map(Some).collect());
    Ok(tree)
}
