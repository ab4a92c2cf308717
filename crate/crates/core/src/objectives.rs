//! Training pairs built from serialized trees.
//!
//! * masked subtree prediction (MSP): whole subtrees are cut out of the
//!   stream and replaced by numbered span sentinels; the target lists each
//!   sentinel followed by the tokens it hides.
//! * masked node prediction (MNP): every opening and closing marker is
//!   replaced by one shared node sentinel; the target is the hidden
//!   markers in order.
//! * text-to-tree / tree-to-text (TeTr / TrTe): natural language paired
//!   with the serialized tree, in either direction.
//! * decoder-only language modelling (DecLM): the stream itself, prefixed
//!   by the natural language and a separator when there is one.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::kind::LanguageId;
use crate::serial::{serialize, serialize_with_ranges, SerializedTree};
use crate::token::StructToken;
use crate::tree::{CstTree, NodeData, NodeId};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskingConfig {
    /// Fraction of all tree nodes to hide.
    pub mask_ratio: f64,
    pub rng_seed: u64,
    /// Upper bound on the number of masked subtrees.
    pub max_sentinels: usize,
}

/// Default cap on masked subtrees. Whole source files of a few thousand
/// tokens need over a hundred spans to reach a 15% budget.
pub const DEFAULT_MAX_SENTINELS: usize = 256;

impl Default for MaskingConfig {
    fn default() -> Self {
        MaskingConfig { mask_ratio: 0.15, rng_seed: 0, max_sentinels: DEFAULT_MAX_SENTINELS }
    }
}

impl MaskingConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.mask_ratio > 0.0 && self.mask_ratio < 1.0) {
            return Err(Error::InvalidConfig("mask_ratio must lie strictly between 0 and 1"));
        }
        if self.max_sentinels == 0 {
            return Err(Error::InvalidConfig("max_sentinels must be at least 1"));
        }
        Ok(())
    }

    /// Node budget `ceil(mask_ratio * total_nodes)`, tolerant of the
    /// representation error in products like `0.15 * 20`.
    pub fn budget(&self, total_nodes: usize) -> usize {
        let x = self.mask_ratio * total_nodes as f64;
        let floor = x as usize;
        if (floor as f64) < x - 1e-9 {
            floor + 1
        } else {
            floor
        }
    }

    pub fn with_seed(self, rng_seed: u64) -> MaskingConfig {
        MaskingConfig { rng_seed, ..self }
    }
}

/// Reserved placeholder tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sentinel {
    /// `<MASK_i>`, one per masked subtree plus the terminating one.
    Span(u32),
    /// `<NODE_MASK>`
    Node,
    /// `<NL_SEP>`, between natural language and the tree.
    NlSep,
}

impl fmt::Display for Sentinel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sentinel::Span(i) => write!(f, "<MASK_{i}>"),
            Sentinel::Node => f.write_str("<NODE_MASK>"),
            Sentinel::NlSep => f.write_str("<NL_SEP>"),
        }
    }
}

impl Sentinel {
    pub fn parse(word: &str) -> Option<Sentinel> {
        match word {
            "<NODE_MASK>" => Some(Sentinel::Node),
            "<NL_SEP>" => Some(Sentinel::NlSep),
            _ => {
                let digits = word.strip_prefix("<MASK_")?.strip_suffix('>')?;
                if digits.is_empty()
                    || !digits.bytes().all(|b| b.is_ascii_digit())
                    || (digits.len() > 1 && digits.starts_with('0'))
                {
                    return None;
                }
                digits.parse().ok().map(Sentinel::Span)
            }
        }
    }
}

/// The closed set of sentinels a generator may emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SentinelScheme {
    span_count: u32,
}

impl SentinelScheme {
    pub fn new(span_count: u32) -> SentinelScheme {
        SentinelScheme { span_count: span_count.max(1) }
    }

    /// Enough span sentinels for `max_sentinels` masked subtrees plus the
    /// terminating one.
    pub fn for_config(cfg: &MaskingConfig) -> SentinelScheme {
        SentinelScheme::new(u32::try_from(cfg.max_sentinels).unwrap_or(u32::MAX - 1) + 1)
    }

    pub fn span_sentinels(&self) -> impl Iterator<Item = Sentinel> {
        (0..self.span_count).map(Sentinel::Span)
    }

    pub fn node_sentinel(&self) -> Sentinel {
        Sentinel::Node
    }

    pub fn nl_code_separator(&self) -> Sentinel {
        Sentinel::NlSep
    }

    pub fn contains(&self, s: Sentinel) -> bool {
        match s {
            Sentinel::Span(i) => i < self.span_count,
            _ => true,
        }
    }

    /// Every spelling, span sentinels first.
    pub fn spellings(&self) -> Vec<String> {
        self.span_sentinels().chain([Sentinel::Node, Sentinel::NlSep]).map(|s| format!("{s}")).collect()
    }
}

/// One element of an objective's input or target sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Tree(StructToken),
    Sentinel(Sentinel),
    /// Natural-language text, kept verbatim.
    Text(String),
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Tree(t) => t.fmt(f),
            Piece::Sentinel(s) => s.fmt(f),
            Piece::Text(t) => f.write_str(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Objective {
    Msp,
    Mnp,
    TeTr,
    TrTe,
    DecLm,
}

impl Objective {
    pub const ALL: [Objective; 5] =
        [Objective::Msp, Objective::Mnp, Objective::TeTr, Objective::TrTe, Objective::DecLm];

    pub fn name(self) -> &'static str {
        match self {
            Objective::Msp => "msp",
            Objective::Mnp => "mnp",
            Objective::TeTr => "tetr",
            Objective::TrTe => "trte",
            Objective::DecLm => "declm",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Objective::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidConfig("unknown objective"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleMeta {
    pub record_id: String,
    pub language: LanguageId,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveExample {
    pub objective: Objective,
    pub input: Vec<Piece>,
    pub target: Vec<Piece>,
    pub meta: ExampleMeta,
}

fn join(pieces: &[Piece]) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    for (i, p) in pieces.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{p}");
    }
    out
}

impl ObjectiveExample {
    pub fn input_text(&self) -> String {
        join(&self.input)
    }

    pub fn target_text(&self) -> String {
        join(&self.target)
    }

    pub fn with_record_id(mut self, id: impl Into<String>) -> Self {
        self.meta.record_id = id.into();
        self
    }
}

/// Stable per-record seed: the same base seed and record id always give
/// the same value, independent of processing order.
pub fn derive_seed(base: u64, record_id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in record_id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = base ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draws non-root non-terminals in random order, skipping any draw nested
/// inside (or containing) an earlier pick, until the picked subtrees hold
/// at least `budget` nodes or `max_sentinels` subtrees are picked. Draws
/// that would overshoot the budget are set aside; if the budget is still
/// unmet after every draw, the smallest set-aside subtree that does not
/// nest completes it. Returned in left-to-right order.
pub fn select_mask_subtrees(tree: &CstTree, config: &MaskingConfig) -> Result<Vec<NodeId>, Error> {
    config.validate()?;
    let n = tree.len();
    let mut candidates: Vec<usize> =
        (1..n).filter(|&i| matches!(tree.slot_data(i), NodeData::NonTerminal(_))).collect();
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    candidates.shuffle(&mut rng);

    let budget = config.budget(n);
    let mut covered = alloc::vec![false; n];
    let mut selected = Vec::new();
    let mut masked = 0usize;
    let mut oversize = Vec::new();
    let free = |covered: &[bool], c: usize| !covered[c..c + tree.slot_size(c)].iter().any(|&x| x);
    for c in candidates {
        if !free(&covered, c) {
            continue;
        }
        let size = tree.slot_size(c);
        if masked + size > budget {
            oversize.push(c);
            continue;
        }
        covered[c..c + size].iter_mut().for_each(|x| *x = true);
        masked += size;
        selected.push(NodeId(c as u32));
        if masked >= budget || selected.len() >= config.max_sentinels {
            break;
        }
    }
    if masked < budget && selected.len() < config.max_sentinels {
        // everything still free overshoots; overshoot the least
        if let Some(c) = oversize.into_iter().filter(|&c| free(&covered, c)).min_by_key(|&c| tree.slot_size(c)) {
            selected.push(NodeId(c as u32));
        }
    }
    selected.sort_unstable();
    Ok(selected)
}

fn meta(tree: &CstTree, seed: Option<u64>) -> ExampleMeta {
    ExampleMeta { record_id: String::new(), language: tree.language().clone(), seed }
}

pub fn make_msp(tree: &CstTree, config: &MaskingConfig) -> Result<ObjectiveExample, Error> {
    let selected = select_mask_subtrees(tree, config)?;
    let (stream, ranges) = serialize_with_ranges(tree);
    let spans: Vec<(usize, usize)> = selected.iter().map(|id| ranges[id.index()]).collect();

    let mut input = Vec::with_capacity(stream.tokens.len());
    let mut target = Vec::new();
    let mut next = spans.iter().enumerate().peekable();
    let mut pos = 0;
    while pos < stream.tokens.len() {
        if let Some(&(i, &(start, end))) = next.peek() {
            if start == pos {
                let s = Sentinel::Span(i as u32);
                input.push(Piece::Sentinel(s));
                target.push(Piece::Sentinel(s));
                target.extend(stream.tokens[start..end].iter().cloned().map(Piece::Tree));
                pos = end;
                next.next();
                continue;
            }
        }
        input.push(Piece::Tree(stream.tokens[pos].clone()));
        pos += 1;
    }
    target.push(Piece::Sentinel(Sentinel::Span(spans.len() as u32)));
    Ok(ObjectiveExample { objective: Objective::Msp, input, target, meta: meta(tree, Some(config.rng_seed)) })
}

pub fn make_mnp(tree: &CstTree) -> ObjectiveExample {
    let stream = serialize(tree);
    let mut input = Vec::with_capacity(stream.tokens.len());
    let mut target = Vec::new();
    for t in stream.tokens {
        if t.is_marker() {
            input.push(Piece::Sentinel(Sentinel::Node));
            target.push(Piece::Tree(t));
        } else {
            input.push(Piece::Tree(t));
        }
    }
    ObjectiveExample { objective: Objective::Mnp, input, target, meta: meta(tree, None) }
}

fn require_nl(nl: Option<&str>) -> Result<&str, Error> {
    nl.filter(|s| !s.trim().is_empty()).ok_or(Error::MissingNl)
}

fn tree_pieces(stream: &SerializedTree) -> Vec<Piece> {
    stream.tokens.iter().cloned().map(Piece::Tree).collect()
}

fn stream_meta(stream: &SerializedTree) -> ExampleMeta {
    ExampleMeta { record_id: String::new(), language: stream.language.clone(), seed: None }
}

/// Natural language in, serialized tree out.
pub fn make_tetr(nl: Option<&str>, stream: &SerializedTree) -> Result<ObjectiveExample, Error> {
    let nl = require_nl(nl)?;
    Ok(ObjectiveExample {
        objective: Objective::TeTr,
        input: alloc::vec![Piece::Text(nl.into())],
        target: tree_pieces(stream),
        meta: stream_meta(stream),
    })
}

/// Serialized tree in, natural language out.
pub fn make_trte(nl: Option<&str>, stream: &SerializedTree) -> Result<ObjectiveExample, Error> {
    let nl = require_nl(nl)?;
    Ok(ObjectiveExample {
        objective: Objective::TrTe,
        input: tree_pieces(stream),
        target: alloc::vec![Piece::Text(nl.into())],
        meta: stream_meta(stream),
    })
}

/// Causal sequence `z`, or `x <NL_SEP> z` when natural language exists.
/// The target repeats the input; shifting is the trainer's job.
pub fn make_declm(nl: Option<&str>, stream: &SerializedTree) -> ObjectiveExample {
    let mut seq = Vec::with_capacity(stream.tokens.len() + 2);
    if let Ok(nl) = require_nl(nl) {
        seq.push(Piece::Text(nl.into()));
        seq.push(Piece::Sentinel(Sentinel::NlSep));
    }
    seq.extend(tree_pieces(stream));
    ObjectiveExample { objective: Objective::DecLm, target: seq.clone(), input: seq, meta: stream_meta(stream) }
}

/// Puts MSP target spans back over the sentinels of the input.
pub fn splice_msp(input: &[Piece], target: &[Piece]) -> Option<Vec<StructToken>> {
    let mut fills: Vec<(u32, &[Piece])> = Vec::new();
    let mut i = 0;
    while i < target.len() {
        let Piece::Sentinel(Sentinel::Span(s)) = target[i] else { return None };
        let start = i + 1;
        let mut end = start;
        while end < target.len() && !matches!(target[end], Piece::Sentinel(_)) {
            end += 1;
        }
        fills.push((s, &target[start..end]));
        i = end;
    }
    let mut out = Vec::new();
    for p in input {
        match p {
            Piece::Tree(t) => out.push(t.clone()),
            Piece::Sentinel(Sentinel::Span(s)) => {
                let (_, fill) = fills.iter().find(|(k, _)| k == s)?;
                for f in *fill {
                    let Piece::Tree(t) = f else { return None };
                    out.push(t.clone());
                }
            }
            _ => return None,
        }
    }
    Some(out)
}

/// Puts MNP target markers back over the node sentinels of the input.
pub fn zip_mnp(input: &[Piece], target: &[Piece]) -> Option<Vec<StructToken>> {
    let mut markers = target.iter();
    let mut out = Vec::with_capacity(input.len());
    for p in input {
        match p {
            Piece::Tree(t) => out.push(t.clone()),
            Piece::Sentinel(Sentinel::Node) => match markers.next()? {
                Piece::Tree(t) if t.is_marker() => out.push(t.clone()),
                _ => return None,
            },
            _ => return None,
        }
    }
    markers.next().is_none().then_some(out)
}
