//! The closed set of structural tokens a tokenizer must treat as atoms.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::kind::{LanguageId, NodeKind};
use crate::objectives::SentinelScheme;
use crate::token::{StructToken, WsMarker};
use crate::tree::{CstTree, NodeData};
use crate::Error;

pub const MANIFEST_VERSION: u32 = 1;

/// Node kinds seen per language. Merging is associative and commutative,
/// so per-worker inventories can be combined in any order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KindInventory {
    pub kinds: BTreeMap<LanguageId, BTreeSet<NodeKind>>,
}

impl KindInventory {
    pub fn new() -> KindInventory {
        KindInventory::default()
    }

    /// Records every non-terminal kind of `tree` under its language.
    pub fn observe(&mut self, tree: &CstTree) {
        let set = self.kinds.entry(tree.language().clone()).or_default();
        for n in tree.nodes() {
            if let NodeData::NonTerminal(k) = n.data() {
                if !set.contains(k) {
                    set.insert(k.clone());
                }
            }
        }
    }

    pub fn insert(&mut self, language: LanguageId, kind: NodeKind) {
        self.kinds.entry(language).or_default().insert(kind);
    }

    pub fn merge(&mut self, other: KindInventory) {
        for (lang, kinds) in other.kinds {
            self.kinds.entry(lang).or_default().extend(kinds);
        }
    }

    pub fn union(&self) -> BTreeSet<&NodeKind> {
        self.kinds.values().flatten().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.values().all(BTreeSet::is_empty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VocabManifest {
    pub version: u32,
    pub languages: BTreeMap<LanguageId, Vec<NodeKind>>,
    /// `(_.kind` and `kind._)` for every kind in the union, sorted by kind.
    pub markers: Vec<String>,
    pub ws: Vec<String>,
    pub sentinels: Vec<String>,
}

impl VocabManifest {
    /// Every reserved spelling, markers first.
    pub fn all_tokens(&self) -> impl Iterator<Item = &str> {
        self.markers.iter().chain(&self.ws).chain(&self.sentinels).map(String::as_str)
    }

    /// Whether a structural token has a reserved spelling here. Terminals
    /// belong to the base alphabet and always pass.
    pub fn covers(&self, token: &StructToken) -> bool {
        match token {
            StructToken::Terminal(_) => true,
            StructToken::Ws(m) => self.ws.iter().any(|w| w == m.spelling()),
            marker => {
                let spelled = marker.to_string();
                self.markers.contains(&spelled)
            }
        }
    }
}

pub fn emit_manifest(kinds: &KindInventory, scheme: &SentinelScheme) -> Result<VocabManifest, Error> {
    if kinds.kinds.is_empty() {
        return Err(Error::EmptyKinds(String::from("no languages")));
    }
    if let Some((lang, _)) = kinds.kinds.iter().find(|(_, k)| k.is_empty()) {
        return Err(Error::EmptyKinds(lang.to_string()));
    }
    let languages = kinds.kinds.iter().map(|(l, k)| (l.clone(), k.iter().cloned().collect())).collect();
    let mut markers = Vec::new();
    for k in kinds.union() {
        markers.push(format!("{}", StructToken::Open(k.clone())));
        markers.push(format!("{}", StructToken::Close(k.clone())));
    }
    Ok(VocabManifest {
        version: MANIFEST_VERSION,
        languages,
        markers,
        ws: WsMarker::ALL.iter().map(|m| m.spelling().to_string()).collect(),
        sentinels: scheme.spellings(),
    })
}
