//! tree-sitter adapter.
//!
//! The tree-sitter tree is first copied into a small owned arena, where a
//! few normalizations happen:
//!
//! * a node becomes a single leaf holding its full source text when it is
//!   a token, an atomic literal kind, or when its children leave
//!   non-whitespace text uncovered;
//! * a named leaf whose text differs from its kind is wrapped, so
//!   `identifier` over `x` serializes as `(_.identifier x identifier._)`
//!   while keywords and punctuation stay bare;
//! * zero-width leaves (parser recovery artifacts) are dropped;
//! * for indentation-sensitive grammars, newline/indent/dedent markers are
//!   synthesized from logical line breaks, since the parser keeps those
//!   tokens hidden;
//! * for grammars exposing newline tokens, a run of blank lines becomes the
//!   blank-line marker.

use cstkit_core::{CstTree, NodeKind, Span, TreeBuilder, WsMarker};

use crate::error::{KitError, Result};
use crate::lang::{grammar, Grammar, Layout};

const NONE: u32 = u32::MAX;

#[derive(Debug)]
enum PKind {
    Inner(NodeKind),
    Leaf { wrap: Option<NodeKind>, comment: bool },
    Marker(WsMarker),
}

#[derive(Debug)]
struct PNode {
    kind: PKind,
    /// `None` for synthesized markers.
    span: Option<(usize, usize)>,
    children: Vec<u32>,
    parent: u32,
}

struct Arena<'s> {
    nodes: Vec<PNode>,
    source: &'s str,
}

impl Arena<'_> {
    fn push(&mut self, kind: PKind, span: Option<(usize, usize)>, parent: u32) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(PNode { kind, span, children: Vec::new(), parent });
        if parent != NONE {
            self.nodes[parent as usize].children.push(id);
        }
        id
    }

    fn is_leaf(&self, id: u32) -> bool {
        matches!(self.nodes[id as usize].kind, PKind::Leaf { .. })
    }

    fn text(&self, id: u32) -> &str {
        let (s, e) = self.nodes[id as usize].span.expect("leaf span");
        &self.source[s..e]
    }
}

/// A parser bound to one grammar. Not shareable across threads; give each
/// worker its own.
pub struct CstParser {
    parser: tree_sitter::Parser,
    grammar: &'static Grammar,
}

impl CstParser {
    pub fn new(grammar: &'static Grammar) -> Result<CstParser> {
        let mut parser = tree_sitter::Parser::new();
        parser.set_language(grammar.language()).map_err(|_| KitError::UnknownLanguage(grammar.name.to_string()))?;
        Ok(CstParser { parser, grammar })
    }

    pub fn for_language(name: &str) -> Result<CstParser> {
        CstParser::new(grammar(name)?)
    }

    pub fn grammar(&self) -> &'static Grammar {
        self.grammar
    }

    pub fn parse(&mut self, source: &str) -> Result<CstTree> {
        let ts = self.parser.parse(source, None).ok_or(KitError::ParseFatal)?;
        let root = ts.root_node();
        let mut arena = Arena { nodes: Vec::new(), source };
        copy_tree(&mut arena, root, self.grammar);
        if self.grammar.layout == Layout::Indentation {
            synthesize_layout(&mut arena, self.grammar);
        }
        Ok(emit(&arena, self.grammar, root.has_error())?)
    }
}

/// Per-worker parser cache keyed by grammar name.
pub type ParserCache = std::collections::HashMap<&'static str, CstParser>;

/// Looks up (or builds) the parser for `language` in a worker's cache.
pub fn cached_parser<'c>(cache: &'c mut ParserCache, language: &str) -> Result<&'c mut CstParser> {
    let g = grammar(language)?;
    Ok(match cache.entry(g.name) {
        std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
        std::collections::hash_map::Entry::Vacant(v) => v.insert(CstParser::new(g)?),
    })
}

/// One-shot convenience; builds a fresh parser each call.
pub fn parse(source: &str, language: &str) -> Result<CstTree> {
    CstParser::for_language(language)?.parse(source)
}

fn gap_is_trivia(gap: &str, continuation: bool) -> bool {
    let mut chars = gap.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if continuation && c == '\\' {
            if chars.peek() == Some(&'\r') {
                chars.next();
            }
            if chars.next() == Some('\n') {
                continue;
            }
        }
        return false;
    }
    true
}

fn copy_tree(arena: &mut Arena<'_>, root: tree_sitter::Node<'_>, g: &Grammar) {
    let source = arena.source;
    let continuation = g.layout == Layout::Indentation;
    let mut cursor = root.walk();
    let mut stack = vec![(root, NONE)];
    while let Some((n, parent)) = stack.pop() {
        let (start, end) = (n.start_byte(), n.end_byte());
        let kind = n.kind();
        let is_root = parent == NONE;
        let children: Vec<tree_sitter::Node<'_>> = n.children(&mut cursor).collect();
        let valid_kind = NodeKind::new(kind).ok();
        let (start, end) = if is_root { (0, source.len()) } else { (start, end) };

        let leafy =
            children.is_empty() || g.atomic_kinds.contains(&kind) || (n.is_named() && valid_kind.is_none()) || {
                let mut pos = start;
                let mut ok = true;
                for c in &children {
                    ok &= c.start_byte() >= pos && gap_is_trivia(&source[pos..c.start_byte()], continuation);
                    pos = pos.max(c.end_byte());
                }
                !(ok && pos <= end && gap_is_trivia(&source[pos..end], continuation))
            };

        if is_root {
            let kind = valid_kind.unwrap_or_else(|| NodeKind::new("ERROR").expect("valid kind"));
            let id = arena.push(PKind::Inner(kind), Some((start, end)), NONE);
            if leafy {
                let text = source[start..end].trim();
                if !text.is_empty() {
                    let s = start + source[start..end].find(text).unwrap_or(0);
                    arena.push(PKind::Leaf { wrap: None, comment: false }, Some((s, s + text.len())), id);
                }
            } else {
                stack.extend(children.into_iter().rev().map(|c| (c, id)));
            }
            continue;
        }
        if !leafy {
            let kind = valid_kind.expect("checked above");
            let id = arena.push(PKind::Inner(kind), Some((start, end)), parent);
            stack.extend(children.into_iter().rev().map(|c| (c, id)));
            continue;
        }
        if start == end {
            continue;
        }
        let text = &source[start..end];
        if g.layout == Layout::NewlineTokens && !n.is_named() && text.len() >= 2 && text.bytes().all(|b| b == b'\n') {
            arena.push(PKind::Marker(WsMarker::BlankLine), Some((start, end)), parent);
            continue;
        }
        let wrap = if n.is_named() && text != kind { valid_kind } else { None };
        let comment = g.comment_kinds.contains(&kind);
        arena.push(PKind::Leaf { wrap, comment }, Some((start, end)), parent);
    }
}

fn is_block(arena: &Arena<'_>, id: u32) -> bool {
    matches!(&arena.nodes[id as usize].kind, PKind::Inner(k) if k.as_str() == "block")
}

/// Inserts newline/indent/dedent markers.
///
/// A logical line ends at a source line break outside brackets that is not
/// a backslash continuation. Each line holding code ends either in an
/// indent (when the next code token opens an indented block) or in a
/// newline placed right after the line's last token, trailing comment
/// included: inside the innermost enclosing block when no code follows in
/// that block, otherwise in the lowest node spanning both it and the next
/// code token. Every indented block gets an indent just before it and a
/// dedent as its last child. Comment-only lines produce nothing.
fn synthesize_layout(arena: &mut Arena<'_>, _g: &Grammar) {
    let n = arena.nodes.len();
    // arena ids are in pre-order here, so subtrees are contiguous id ranges
    let mut size = vec![1u32; n];
    for i in (1..n).rev() {
        let p = arena.nodes[i].parent as usize;
        size[p] += size[i];
    }
    let leaves: Vec<u32> = (0..n as u32).filter(|&i| arena.is_leaf(i)).collect();
    if leaves.is_empty() {
        return;
    }
    let is_code =
        |arena: &Arena<'_>, id: u32| matches!(arena.nodes[id as usize].kind, PKind::Leaf { comment: false, .. });
    let leaf_range = |id: u32| {
        let lo = leaves.partition_point(|&l| l < id);
        let hi = leaves.partition_point(|&l| l < id + size[id as usize]);
        (lo, hi)
    };

    // first and last code leaf of every block
    let blocks: Vec<(u32, Option<usize>, Option<usize>)> = (0..n as u32)
        .filter(|&i| is_block(arena, i))
        .map(|b| {
            let (lo, hi) = leaf_range(b);
            let first = (lo..hi).find(|&p| is_code(arena, leaves[p]));
            let last = (lo..hi).rev().find(|&p| is_code(arena, leaves[p]));
            (b, first, last)
        })
        .collect();
    let mut block_first = vec![false; leaves.len()];
    for &(_, f, _) in &blocks {
        if let Some(f) = f {
            block_first[f] = true;
        }
    }

    // (anchor leaf position, next code leaf position)
    let mut newlines: Vec<(usize, Option<usize>)> = Vec::new();
    let mut line_start = vec![false; leaves.len()];
    let mut depth = 0usize;
    let mut pending: Option<usize> = None;
    let mut last_leaf: Option<usize> = None;
    let mut line_has_code = false;
    for (p, &leaf) in leaves.iter().enumerate() {
        if p > 0 && depth == 0 {
            let prev_end = arena.nodes[leaves[p - 1] as usize].span.expect("leaf span").1;
            let start = arena.nodes[leaf as usize].span.expect("leaf span").0;
            let gap = &arena.source[prev_end..start];
            if let Some(nl) = gap.find('\n') {
                let continued = gap[..nl].trim_end_matches('\r').ends_with('\\');
                if !continued && line_has_code {
                    pending = last_leaf;
                    line_has_code = false;
                }
            }
        }
        if is_code(arena, leaf) {
            if let Some(anchor) = pending.take() {
                line_start[p] = true;
                if !block_first[p] {
                    newlines.push((anchor, Some(p)));
                }
            }
            line_has_code = true;
            match arena.text(leaf) {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                _ => {}
            }
        }
        last_leaf = Some(p);
    }
    if let Some(anchor) = pending {
        newlines.push((anchor, None));
    } else if line_has_code {
        newlines.push((last_leaf.expect("code seen"), None));
    }

    let contains = |id: u32, pos: usize| {
        let (lo, hi) = leaf_range(id);
        lo <= pos && pos < hi
    };
    let child_towards = |arena: &Arena<'_>, container: u32, leaf: u32| -> usize {
        let mut c = leaf;
        while arena.nodes[c as usize].parent != container {
            c = arena.nodes[c as usize].parent;
        }
        arena.nodes[container as usize].children.iter().position(|&x| x == c).expect("child of container")
    };

    // (container, slot before original child index, order, marker)
    let mut inserts: Vec<(u32, usize, u64, WsMarker)> = Vec::new();
    for &(b, first, last) in &blocks {
        let (Some(first), Some(_)) = (first, last) else { continue };
        if !line_start[first] {
            continue;
        }
        let parent = arena.nodes[b as usize].parent;
        let slot = arena.nodes[parent as usize].children.iter().position(|&x| x == b).expect("child");
        inserts.push((parent, slot, first as u64 * 2, WsMarker::Indent));
        inserts.push((b, arena.nodes[b as usize].children.len(), u64::MAX, WsMarker::Dedent));
    }
    for (anchor, next) in newlines {
        let leaf = leaves[anchor];
        let mut block = arena.nodes[leaf as usize].parent;
        while block != NONE && !is_block(arena, block) {
            block = arena.nodes[block as usize].parent;
        }
        // the block holds no code after the anchor
        let own_block =
            blocks.iter().find(|&&(b, _, _)| b == block).filter(|&&(_, _, last)| last.is_some_and(|l| l <= anchor));
        let container = match (own_block, next) {
            (Some(&(b, _, _)), _) => b,
            (None, None) => 0,
            (None, Some(next)) => {
                let mut c = arena.nodes[leaf as usize].parent;
                while !contains(c, next) {
                    c = arena.nodes[c as usize].parent;
                }
                c
            }
        };
        let slot = child_towards(arena, container, leaf) + 1;
        inserts.push((container, slot, anchor as u64 * 2 + 1, WsMarker::Newline));
    }

    inserts.sort_by_key(|&(c, slot, order, _)| (c, slot, order));
    let mut i = 0;
    while i < inserts.len() {
        let container = inserts[i].0;
        let mut j = i;
        while j < inserts.len() && inserts[j].0 == container {
            j += 1;
        }
        let old = std::mem::take(&mut arena.nodes[container as usize].children);
        let mut merged = Vec::with_capacity(old.len() + j - i);
        let mut pending = inserts[i..j].iter().peekable();
        for slot in 0..=old.len() {
            while let Some(&&(_, s, _, m)) = pending.peek() {
                if s != slot {
                    break;
                }
                let id = arena.nodes.len() as u32;
                arena.nodes.push(PNode { kind: PKind::Marker(m), span: None, children: Vec::new(), parent: container });
                merged.push(id);
                pending.next();
            }
            if let Some(&c) = old.get(slot) {
                merged.push(c);
            }
        }
        arena.nodes[container as usize].children = merged;
        i = j;
    }
}

fn emit(arena: &Arena<'_>, g: &Grammar, had_errors: bool) -> Result<CstTree, cstkit_core::Error> {
    enum Frame {
        Enter(u32),
        Exit,
    }
    let span = |s: (usize, usize)| Some(Span::new(s.0, s.1));
    let mut b = TreeBuilder::new();
    let mut stack = vec![Frame::Enter(0)];
    let mut last_end = 0usize;
    let mut containers: Vec<usize> = Vec::new();
    while let Some(frame) = stack.pop() {
        let id = match frame {
            Frame::Exit => {
                b.close()?;
                containers.pop();
                continue;
            }
            Frame::Enter(id) => id,
        };
        let node = &arena.nodes[id as usize];
        match &node.kind {
            PKind::Inner(kind) => {
                let s = node.span.expect("inner span");
                b.open(kind.clone(), span(s))?;
                containers.push(s.0);
                stack.push(Frame::Exit);
                stack.extend(node.children.iter().rev().map(|&c| Frame::Enter(c)));
            }
            PKind::Leaf { wrap, .. } => {
                let s = node.span.expect("leaf span");
                let text = &arena.source[s.0..s.1];
                match wrap {
                    Some(kind) => {
                        b.open(kind.clone(), span(s))?;
                        b.terminal(text, span(s))?;
                        b.close()?;
                    }
                    None => {
                        b.terminal(text, span(s))?;
                    }
                }
                last_end = s.1;
            }
            PKind::Marker(m) => {
                let s = node.span.unwrap_or_else(|| {
                    let at = last_end.max(containers.last().copied().unwrap_or(0));
                    (at, at)
                });
                b.layout(*m, span(s))?;
                last_end = last_end.max(s.1);
            }
        }
    }
    b.finish(g.id(), arena.source.to_string(), had_errors)
}
