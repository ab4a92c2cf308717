//! From generated stream text back to code.
//!
//! Model output is not guaranteed to be well formed, so besides the strict
//! path (which fails on any violation) there is a lenient path that repairs
//! the token list first. Repair is a greedy left-to-right pass over a stack
//! of open kinds; it is a heuristic, not a minimum-edit search.

use alloc::string::String;
use alloc::vec::Vec;

use crate::kind::{LanguageId, NodeKind};
use crate::render::{render, render_lenient, RenderStyle};
use crate::serial::{deserialize_structure, SerializedTree};
use crate::token::StructToken;
use crate::tree::TreeBuilder;
use crate::Error;

/// Splits on whitespace and classifies every word. Never fails.
pub fn lex_stream(text: &str) -> Vec<StructToken> {
    text.split_whitespace().map(StructToken::classify).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "action", rename_all = "kebab-case"))]
pub enum RepairAction {
    /// A closing marker with nothing to close, or one that would end the
    /// root while content still follows.
    DropStrayClose,
    /// A closing marker appended at the end of the stream.
    InsertMissingClose { kind: NodeKind },
    /// A closing marker whose kind disagreed with the open node.
    RetagKind { from: NodeKind, to: NodeKind },
    /// Content before the first opening marker.
    DropOrphan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RepairStep {
    /// Index into the raw token list; insertions use the list length.
    pub position: usize,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub action: RepairAction,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RepairReport {
    pub actions: Vec<RepairStep>,
    pub repaired: bool,
    /// Lenient decoding gave up on structure and emitted the terminals.
    pub terminal_fallback: bool,
}

impl RepairReport {
    /// Replays the recorded actions on the raw tokens they were computed
    /// from.
    pub fn apply(&self, raw: &[StructToken]) -> Vec<StructToken> {
        let mut out = Vec::with_capacity(raw.len());
        let mut steps = self.actions.iter().peekable();
        for (i, tok) in raw.iter().enumerate() {
            match steps.peek() {
                Some(s) if s.position == i => {
                    match &s.action {
                        RepairAction::RetagKind { to, .. } => out.push(StructToken::Close(to.clone())),
                        RepairAction::DropStrayClose | RepairAction::DropOrphan => {}
                        RepairAction::InsertMissingClose { .. } => unreachable!("insertions sit at the end"),
                    }
                    steps.next();
                }
                _ => out.push(tok.clone()),
            }
        }
        for s in steps {
            if let RepairAction::InsertMissingClose { kind } = &s.action {
                out.push(StructToken::Close(kind.clone()));
            }
        }
        out
    }
}

/// Makes `tokens` a well-formed stream. A valid stream comes back unchanged
/// with an empty report.
pub fn repair(tokens: &[StructToken]) -> Result<(Vec<StructToken>, RepairReport), Error> {
    let first_open = tokens.iter().position(|t| matches!(t, StructToken::Open(_))).ok_or(Error::Unrepairable)?;
    // non_close_after[i]: some non-closing token exists at an index > i
    let mut non_close_after = alloc::vec![false; tokens.len() + 1];
    for i in (0..tokens.len()).rev() {
        non_close_after[i] = non_close_after[i + 1] || !matches!(tokens.get(i + 1), None | Some(StructToken::Close(_)));
    }

    let mut report = RepairReport::default();
    let mut out = Vec::with_capacity(tokens.len() + 4);
    let mut stack: Vec<NodeKind> = Vec::new();
    let mut root_closed = false;
    let step = |position, action| RepairStep { position, action };

    for (i, tok) in tokens.iter().enumerate() {
        if i < first_open {
            let action = match tok {
                StructToken::Close(_) => RepairAction::DropStrayClose,
                _ => RepairAction::DropOrphan,
            };
            report.actions.push(step(i, action));
            continue;
        }
        match tok {
            StructToken::Close(k) => {
                let Some(top) = stack.last() else {
                    report.actions.push(step(i, RepairAction::DropStrayClose));
                    continue;
                };
                if stack.len() == 1 && non_close_after[i] {
                    report.actions.push(step(i, RepairAction::DropStrayClose));
                    continue;
                }
                if top != k {
                    report.actions.push(step(i, RepairAction::RetagKind { from: k.clone(), to: top.clone() }));
                }
                out.push(StructToken::Close(top.clone()));
                stack.pop();
                root_closed = stack.is_empty();
            }
            _ if root_closed => {
                // only reachable for non-close content, which the lookahead
                // above keeps from following a root close
                report.actions.push(step(i, RepairAction::DropOrphan));
            }
            StructToken::Open(k) => {
                stack.push(k.clone());
                out.push(tok.clone());
            }
            _ => out.push(tok.clone()),
        }
    }
    while let Some(kind) = stack.pop() {
        out.push(StructToken::Close(kind.clone()));
        report.actions.push(step(tokens.len(), RepairAction::InsertMissingClose { kind }));
    }
    report.repaired = !report.actions.is_empty();
    Ok((out, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecodeMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub code: String,
    /// Present in lenient mode.
    pub report: Option<RepairReport>,
}

fn decoded_language() -> LanguageId {
    LanguageId::new("decoded").expect("valid id")
}

/// Stream text to code. Strict mode fails on the first violation; lenient
/// mode repairs, and when there is no structure at all but there are
/// terminals, renders those alone and flags it in the report.
pub fn to_code(text: &str, mode: DecodeMode, style: &RenderStyle) -> Result<Decoded, Error> {
    let tokens = lex_stream(text);
    match mode {
        DecodeMode::Strict => {
            let tree = deserialize_structure(&SerializedTree { tokens, language: decoded_language() })?;
            Ok(Decoded { code: render(&tree, style)?, report: None })
        }
        DecodeMode::Lenient => match repair(&tokens) {
            Ok((fixed, report)) => {
                let tree = deserialize_structure(&SerializedTree { tokens: fixed, language: decoded_language() })?;
                Ok(Decoded { code: render_lenient(&tree, style), report: Some(report) })
            }
            Err(Error::Unrepairable) => {
                let mut b = TreeBuilder::new();
                b.open(NodeKind::new("fallback").expect("valid kind"), None)?;
                let mut any = false;
                for t in tokens {
                    match t {
                        StructToken::Terminal(p) => {
                            any = true;
                            b.terminal(p, None)?;
                        }
                        StructToken::Ws(m) => {
                            b.layout(m, None)?;
                        }
                        _ => {}
                    }
                }
                if !any {
                    return Err(Error::Unrepairable);
                }
                b.close()?;
                let tree = b.finish(decoded_language(), String::new(), true)?;
                let report = RepairReport { actions: Vec::new(), repaired: true, terminal_fallback: true };
                Ok(Decoded { code: render_lenient(&tree, style), report: Some(report) })
            }
            Err(e) => Err(e),
        },
    }
}
