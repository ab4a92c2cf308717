use alloc::string::String;
use core::fmt;

use crate::Error;

/// A grammar rule name such as `function_definition`.
///
/// Kinds become the `(_.kind` / `kind._)` marker tokens, so they may not be
/// empty, contain whitespace, or end in the close suffix.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "String", into = "String"))]
pub struct NodeKind(String);

impl NodeKind {
    pub fn new(kind: impl Into<String>) -> Result<Self, Error> {
        let kind = kind.into();
        if kind.is_empty() || kind.chars().any(char::is_whitespace) || kind.ends_with("._)") {
            return Err(Error::InvalidKind(kind));
        }
        Ok(NodeKind(kind))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for NodeKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        NodeKind::new(s)
    }
}

impl From<NodeKind> for String {
    fn from(k: NodeKind) -> String {
        k.0
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

/// Name of a registered grammar, e.g. `python`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "String", into = "String"))]
pub struct LanguageId(String);

impl LanguageId {
    pub fn new(name: impl Into<String>) -> Result<Self, Error> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidLanguage(name));
        }
        Ok(LanguageId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for LanguageId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        LanguageId::new(s)
    }
}

impl From<LanguageId> for String {
    fn from(k: LanguageId) -> String {
        k.0
    }
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}
