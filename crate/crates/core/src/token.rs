//! Structural tokens and their single-token text spellings.
//!
//! A serialized tree is a flat list of [`StructToken`]s. In text form each
//! token is one whitespace-free word:
//!
//! | token            | spelling                          |
//! |------------------|-----------------------------------|
//! | open marker      | `(_.kind`                         |
//! | close marker     | `kind._)`                         |
//! | layout markers   | `newline` `indent` `dedent` `\n\n` |
//! | terminal payload | [`escape_payload`]                |
//!
//! Payload escaping uses `\` as the escape character. A space becomes `_`,
//! a literal `_` becomes `\_`, `\n` `\t` `\r` keep their C spellings, any
//! other whitespace is written `\u{hex}`, and the empty payload is `\e`.
//! A payload whose escaped form would begin like an opening marker or
//! match a layout spelling has its first character written as `\u{hex}`;
//! one that would end like a closing marker has its final `)` written as
//! `\u{29}`. Parentheses are otherwise left alone.

use alloc::string::{String, ToString};
use core::fmt::{self, Write};

use crate::kind::NodeKind;

pub const OPEN_PREFIX: &str = "(_.";
pub const CLOSE_SUFFIX: &str = "._)";

/// Whitespace structure carried explicitly for indentation-sensitive
/// grammars, plus the blank-line separator some grammars expose as a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WsMarker {
    Newline,
    Indent,
    Dedent,
    BlankLine,
}

impl WsMarker {
    pub const ALL: [WsMarker; 4] = [WsMarker::Newline, WsMarker::Indent, WsMarker::Dedent, WsMarker::BlankLine];

    pub fn spelling(self) -> &'static str {
        match self {
            WsMarker::Newline => "newline",
            WsMarker::Indent => "indent",
            WsMarker::Dedent => "dedent",
            WsMarker::BlankLine => "\\n\\n",
        }
    }

    pub fn from_spelling(s: &str) -> Option<WsMarker> {
        WsMarker::ALL.into_iter().find(|m| m.spelling() == s)
    }
}

impl fmt::Display for WsMarker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.spelling())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StructToken {
    Open(NodeKind),
    Close(NodeKind),
    /// Unescaped terminal payload.
    Terminal(String),
    Ws(WsMarker),
}

impl StructToken {
    pub fn is_marker(&self) -> bool {
        matches!(self, StructToken::Open(_) | StructToken::Close(_))
    }

    /// Classifies one whitespace-free word. Never fails: anything that is
    /// not a marker, a layout spelling or a well-formed escaped payload is
    /// taken verbatim as a terminal.
    pub fn classify(word: &str) -> StructToken {
        if let Some(kind) = word.strip_prefix(OPEN_PREFIX) {
            if let Ok(kind) = NodeKind::new(kind) {
                return StructToken::Open(kind);
            }
        }
        if let Some(kind) = word.strip_suffix(CLOSE_SUFFIX) {
            if let Ok(kind) = NodeKind::new(kind) {
                return StructToken::Close(kind);
            }
        }
        if let Some(m) = WsMarker::from_spelling(word) {
            return StructToken::Ws(m);
        }
        match unescape_payload(word) {
            Some(p) => StructToken::Terminal(p),
            None => StructToken::Terminal(word.to_string()),
        }
    }
}

impl fmt::Display for StructToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructToken::Open(k) => write!(f, "{OPEN_PREFIX}{k}"),
            StructToken::Close(k) => write!(f, "{k}{CLOSE_SUFFIX}"),
            StructToken::Terminal(p) => f.write_str(&escape_payload(p)),
            StructToken::Ws(m) => f.write_str(m.spelling()),
        }
    }
}

fn push_escaped(out: &mut String, c: char) {
    match c {
        '\\' => out.push_str("\\\\"),
        '_' => out.push_str("\\_"),
        ' ' => out.push('_'),
        '\n' => out.push_str("\\n"),
        '\t' => out.push_str("\\t"),
        '\r' => out.push_str("\\r"),
        c if c.is_whitespace() => {
            let _ = write!(out, "\\u{{{:x}}}", c as u32);
        }
        c => out.push(c),
    }
}

/// Escapes a terminal payload into a single whitespace-free word.
pub fn escape_payload(payload: &str) -> String {
    if payload.is_empty() {
        return "\\e".into();
    }
    let mut out = String::with_capacity(payload.len() + 2);
    for c in payload.chars() {
        push_escaped(&mut out, c);
    }
    if WsMarker::from_spelling(&out).is_some() || out.starts_with(OPEN_PREFIX) {
        let mut chars = payload.chars();
        let first = chars.next().expect("non-empty");
        out.clear();
        let _ = write!(out, "\\u{{{:x}}}", first as u32);
        for c in chars {
            push_escaped(&mut out, c);
        }
    }
    if out.ends_with(CLOSE_SUFFIX) {
        out.pop();
        out.push_str("\\u{29}");
    }
    out
}

/// Inverse of [`escape_payload`]; `None` for words that are not a valid
/// escape encoding.
pub fn unescape_payload(word: &str) -> Option<String> {
    if word == "\\e" {
        return Some(String::new());
    }
    if word.is_empty() {
        return None;
    }
    let mut out = String::with_capacity(word.len());
    let mut chars = word.chars();
    while let Some(c) = chars.next() {
        match c {
            '_' => out.push(' '),
            '\\' => match chars.next()? {
                '\\' => out.push('\\'),
                '_' => out.push('_'),
                'n' => out.push('\n'),
                't' => out.push('\t'),
                'r' => out.push('\r'),
                'u' => {
                    if chars.next()? != '{' {
                        return None;
                    }
                    let mut code = 0u32;
                    let mut digits = 0;
                    loop {
                        let d = chars.next()?;
                        if d == '}' {
                            break;
                        }
                        code = code.checked_mul(16)?.checked_add(d.to_digit(16)?)?;
                        digits += 1;
                    }
                    if digits == 0 {
                        return None;
                    }
                    out.push(char::from_u32(code)?);
                }
                _ => return None,
            },
            c if c.is_whitespace() => return None,
            c => out.push(c),
        }
    }
    Some(out)
}
