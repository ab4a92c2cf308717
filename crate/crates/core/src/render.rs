//! Code text from trees.
//!
//! Inter-token whitespace is not part of a tree, so rendering emits the
//! terminal payloads left to right joined by single spaces, with the space
//! dropped around a few punctuation tokens where that can never merge two
//! lexemes. Line structure comes from three sources: payloads that contain
//! newlines (grammars exposing newline tokens), layout markers (for
//! indentation-sensitive grammars), and the line break every line comment
//! requires. The result re-parses to the same tree; it is not byte-identical
//! to the original source.

use alloc::string::String;
use alloc::vec::Vec;

use crate::token::WsMarker;
use crate::tree::{CstTree, NodeData, Span};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderStyle {
    /// Newline/indent/dedent markers drive line breaks and indentation.
    pub indent_sensitive: bool,
    pub indent_unit: &'static str,
    pub line_comment_prefixes: &'static [&'static str],
    /// Start a new line after `;`, `{` and `}` outside parentheses. Only
    /// valid for grammars where line breaks are insignificant.
    pub break_after_braces: bool,
    /// Indent lines by `{` nesting depth (cosmetic).
    pub brace_indent: bool,
}

impl RenderStyle {
    /// Single-line output; only comments force line breaks.
    pub const fn free_form(line_comment_prefixes: &'static [&'static str]) -> RenderStyle {
        RenderStyle {
            indent_sensitive: false,
            indent_unit: "",
            line_comment_prefixes,
            break_after_braces: false,
            brace_indent: false,
        }
    }

    pub const fn indentation(unit: &'static str, line_comment_prefixes: &'static [&'static str]) -> RenderStyle {
        RenderStyle {
            indent_sensitive: true,
            indent_unit: unit,
            line_comment_prefixes,
            break_after_braces: false,
            brace_indent: false,
        }
    }

    fn is_line_comment(&self, text: &str) -> bool {
        self.line_comment_prefixes.iter().any(|p| text.starts_with(p))
    }
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle::free_form(&["//"])
    }
}

/// Rendered text plus the located span of every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub text: String,
    pub spans: Vec<Span>,
}

/// Renders `tree`, failing on layout that cannot be honoured (a dedent
/// without a matching indent).
pub fn render(tree: &CstTree, style: &RenderStyle) -> Result<String, Error> {
    render_spans(tree, style, true).map(|r| r.text)
}

/// Like [`render`] but tolerates unbalanced layout markers.
pub fn render_lenient(tree: &CstTree, style: &RenderStyle) -> String {
    match render_spans(tree, style, false) {
        Ok(r) => r.text,
        Err(_) => unreachable!("lenient rendering is total"),
    }
}

// Keywords that read badly glued to a following bracket.
const SPACED_KEYWORDS: &[&str] = &[
    "if",
    "elif",
    "while",
    "for",
    "switch",
    "catch",
    "return",
    "and",
    "or",
    "not",
    "in",
    "is",
    "with",
    "assert",
    "yield",
    "await",
    "case",
    "except",
    "del",
    "synchronized",
    "throw",
    "go",
    "defer",
    "func",
    "range",
    "import",
    "from",
    "raise",
    "else",
    "try",
    "finally",
];

fn word_like_end(prev: &str) -> bool {
    prev.ends_with(|c: char| c.is_alphanumeric() || matches!(c, '_' | ')' | ']' | '"' | '\''))
}

// Brackets, commas and semicolons are single-character tokens in every
// supported grammar, so dropping the space next to them cannot merge two
// lexemes. A dot is kept apart from numeric literals.
fn tight(prev: &str, next: &str) -> bool {
    let numeric = |s: &str| s.starts_with(|c: char| c.is_ascii_digit());
    match next {
        "," | ";" | ")" | "]" => return true,
        "." => return !numeric(prev),
        "(" | "[" => return word_like_end(prev) && !SPACED_KEYWORDS.contains(&prev),
        ":" => return word_like_end(prev),
        _ => {}
    }
    match prev {
        "(" | "[" => true,
        "." => !numeric(next),
        _ => false,
    }
}

struct Writer<'s> {
    style: &'s RenderStyle,
    out: String,
    depth: usize,
    braces: usize,
    parens: usize,
    at_line_start: bool,
    pending_break: bool,
    prev: Option<&'s str>,
}

impl<'s> Writer<'s> {
    fn newline(&mut self) {
        self.out.push('\n');
        self.at_line_start = true;
        self.pending_break = false;
        self.prev = None;
    }

    fn text(&mut self, text: &'s str) -> Span {
        if self.pending_break && !text.starts_with(['\n', '\r']) {
            self.newline();
        }
        self.pending_break = false;
        if text == "}" || text == ")" {
            if text == "}" {
                self.braces = self.braces.saturating_sub(1);
            } else {
                self.parens = self.parens.saturating_sub(1);
            }
        }
        if self.at_line_start {
            if !text.starts_with(['\n', '\r']) {
                let level = if self.style.indent_sensitive {
                    self.depth
                } else if self.style.brace_indent {
                    self.braces
                } else {
                    0
                };
                for _ in 0..level {
                    self.out.push_str(self.style.indent_unit);
                }
            }
        } else if let Some(prev) = self.prev {
            if !tight(prev, text) && !text.starts_with(['\n', '\r']) {
                self.out.push(' ');
            }
        }
        let start = self.out.len();
        self.out.push_str(text);
        let span = Span::new(start, self.out.len());
        self.at_line_start = text.ends_with('\n');
        self.prev = Some(text);
        match text {
            "{" => self.braces += 1,
            "(" => self.parens += 1,
            _ => {}
        }
        if self.style.is_line_comment(text)
            || (self.style.break_after_braces && self.parens == 0 && matches!(text, ";" | "{" | "}"))
        {
            self.pending_break = true;
        }
        span
    }

    fn layout(&mut self, m: WsMarker, strict: bool) -> Result<Span, Error> {
        let start = self.out.len();
        match m {
            WsMarker::Newline => self.newline(),
            WsMarker::Indent => {
                self.depth += 1;
                self.newline();
            }
            WsMarker::Dedent => {
                if self.depth == 0 && strict && self.style.indent_sensitive {
                    return Err(Error::RenderFailure("dedent without a matching indent"));
                }
                self.depth = self.depth.saturating_sub(1);
                if !self.at_line_start {
                    self.newline();
                }
                self.pending_break = false;
            }
            WsMarker::BlankLine => {
                if !self.at_line_start {
                    self.out.push('\n');
                }
                self.newline();
            }
        }
        Ok(Span::new(start, self.out.len()))
    }
}

/// Renders and records where every node ended up in the output.
pub fn render_spans(tree: &CstTree, style: &RenderStyle, strict: bool) -> Result<Rendered, Error> {
    let n = tree.len();
    let mut w = Writer {
        style,
        out: String::new(),
        depth: 0,
        braces: 0,
        parens: 0,
        at_line_start: true,
        pending_break: false,
        prev: None,
    };
    let mut spans = alloc::vec![Span::new(0, 0); n];
    let mut visit_pos = alloc::vec![0usize; n];
    for (i, node) in tree.nodes().enumerate() {
        visit_pos[i] = w.out.len();
        match node.data() {
            NodeData::NonTerminal(_) => {}
            NodeData::Terminal(p) => spans[i] = w.text(p),
            NodeData::Layout(m) => spans[i] = w.layout(*m, strict)?,
        }
    }
    if w.pending_break {
        w.out.push('\n');
    }
    for i in (0..n).rev() {
        let node = tree.node(crate::NodeId(i as u32));
        if node.is_terminal() {
            continue;
        }
        let mut children = node.children();
        spans[i] = match children.next() {
            None => Span::new(visit_pos[i], visit_pos[i]),
            Some(first) => {
                let start = spans[first.id().index()].start;
                let end = children.last().map_or(spans[first.id().index()].end, |c| spans[c.id().index()].end);
                Span::new(start, end)
            }
        };
    }
    Ok(Rendered { text: w.out, spans })
}
