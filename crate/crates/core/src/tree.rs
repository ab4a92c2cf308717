use alloc::string::String;
use alloc::vec::Vec;

use crate::kind::{LanguageId, NodeKind};
use crate::token::WsMarker;
use crate::Error;

/// Byte range `[start, end)` into a tree's source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Index of a node in its tree. Nodes are stored in pre-order, so a
/// node's subtree occupies the contiguous id range
/// `id .. id + subtree_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeData {
    NonTerminal(NodeKind),
    /// Exact source text of a leaf.
    Terminal(String),
    /// Explicit whitespace structure (newline/indent/dedent/blank line).
    Layout(WsMarker),
}

#[derive(Debug, Clone)]
struct Slot {
    data: NodeData,
    size: u32,
    depth: u32,
    parent: u32,
    span: Option<Span>,
}

/// A concrete syntax tree.
///
/// Terminal and layout nodes are leaves; non-terminals carry a grammar
/// kind and own an ordered (possibly empty) child list. The root is always
/// a non-terminal.
#[derive(Debug, Clone)]
pub struct CstTree {
    slots: Vec<Slot>,
    source: String,
    language: LanguageId,
    had_errors: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeStats {
    pub total_nodes: usize,
    pub non_terminals: usize,
    /// Leaves, layout markers included.
    pub terminals: usize,
    /// Number of nodes on the longest root-to-leaf path.
    pub depth: usize,
}

impl CstTree {
    pub fn root(&self) -> NodeRef<'_> {
        self.node(NodeId::ROOT)
    }

    pub fn node(&self, id: NodeId) -> NodeRef<'_> {
        assert!(id.index() < self.slots.len(), "node id out of range");
        NodeRef { tree: self, id }
    }

    /// All nodes in pre-order.
    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeRef<'_>> + '_ {
        (0..self.slots.len()).map(move |i| NodeRef { tree: self, id: NodeId(i as u32) })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn language(&self) -> &LanguageId {
        &self.language
    }

    /// Set when the parser had to recover from syntax errors.
    pub fn had_errors(&self) -> bool {
        self.had_errors
    }

    pub fn stats(&self) -> NodeStats {
        let mut stats = NodeStats { total_nodes: self.slots.len(), ..NodeStats::default() };
        for s in &self.slots {
            match s.data {
                NodeData::NonTerminal(_) => stats.non_terminals += 1,
                _ => stats.terminals += 1,
            }
            stats.depth = stats.depth.max(s.depth as usize + 1);
        }
        stats
    }

    /// Rebuilds the source from leaf spans and the gap text between them.
    /// Returns `None` when spans are missing, unordered or do not match the
    /// terminal payloads.
    pub fn reconstruct_source(&self) -> Option<String> {
        let mut out = String::with_capacity(self.source.len());
        let mut cursor = 0usize;
        for s in &self.slots {
            let text_span = match (&s.data, s.span) {
                (NodeData::NonTerminal(_), _) => continue,
                (_, None) => return None,
                (_, Some(span)) => span,
            };
            if text_span.start < cursor || text_span.end > self.source.len() {
                return None;
            }
            let piece = self.source.get(text_span.start..text_span.end)?;
            if let NodeData::Terminal(p) = &s.data {
                if p != piece {
                    return None;
                }
            }
            out.push_str(self.source.get(cursor..text_span.start)?);
            out.push_str(piece);
            cursor = text_span.end;
        }
        out.push_str(self.source.get(cursor..)?);
        Some(out)
    }

    /// Checks every structural and span invariant of the tree against its
    /// source text.
    pub fn check_invariants(&self) -> Result<(), &'static str> {
        if !matches!(self.slots[0].data, NodeData::NonTerminal(_)) {
            return Err("root is not a non-terminal");
        }
        for (i, s) in self.slots.iter().enumerate() {
            if !matches!(s.data, NodeData::NonTerminal(_)) && s.size != 1 {
                return Err("leaf with children");
            }
            if i > 0 {
                let p = &self.slots[s.parent as usize];
                if (s.parent as usize) >= i || i >= s.parent as usize + p.size as usize {
                    return Err("child outside parent range");
                }
            }
            if let (Some(span), NodeData::NonTerminal(_)) = (s.span, &s.data) {
                let mut prev_end = span.start;
                for c in self.node(NodeId(i as u32)).children() {
                    if let Some(cs) = c.span() {
                        if cs.start < prev_end || cs.end > span.end {
                            return Err("child spans unordered or outside parent span");
                        }
                        prev_end = cs.end;
                    }
                }
            }
        }
        match self.reconstruct_source() {
            Some(ref text) if *text == self.source => Ok(()),
            Some(_) => Err("reconstructed source differs"),
            None => Err("leaf spans do not match source"),
        }
    }

    pub(crate) fn slot_size(&self, i: usize) -> usize {
        self.slots[i].size as usize
    }

    pub(crate) fn slot_data(&self, i: usize) -> &NodeData {
        &self.slots[i].data
    }

    pub(crate) fn set_spans(&mut self, source: String, spans: Vec<Option<Span>>) {
        debug_assert_eq!(spans.len(), self.slots.len());
        self.source = source;
        for (s, span) in self.slots.iter_mut().zip(spans) {
            s.span = span;
        }
    }
}

/// Structural equality: kinds, child order and payloads; spans and source
/// text are ignored.
pub fn tree_equal(a: &CstTree, b: &CstTree) -> bool {
    a.slots.len() == b.slots.len() && a.slots.iter().zip(&b.slots).all(|(x, y)| x.size == y.size && x.data == y.data)
}

#[derive(Clone, Copy)]
pub struct NodeRef<'t> {
    tree: &'t CstTree,
    id: NodeId,
}

impl<'t> NodeRef<'t> {
    fn slot(&self) -> &'t Slot {
        &self.tree.slots[self.id.index()]
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn data(&self) -> &'t NodeData {
        &self.slot().data
    }

    pub fn kind(&self) -> Option<&'t NodeKind> {
        match &self.slot().data {
            NodeData::NonTerminal(k) => Some(k),
            _ => None,
        }
    }

    pub fn payload(&self) -> Option<&'t str> {
        match &self.slot().data {
            NodeData::Terminal(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_terminal(&self) -> bool {
        !matches!(self.slot().data, NodeData::NonTerminal(_))
    }

    pub fn span(&self) -> Option<Span> {
        self.slot().span
    }

    /// Node count of the subtree rooted here, this node included.
    pub fn subtree_size(&self) -> usize {
        self.slot().size as usize
    }

    /// Depth counted in nodes; the root has depth 0.
    pub fn depth(&self) -> usize {
        self.slot().depth as usize
    }

    pub fn parent(&self) -> Option<NodeRef<'t>> {
        (self.id.0 != 0).then(|| NodeRef { tree: self.tree, id: NodeId(self.slot().parent) })
    }

    /// True if `other` lies in this node's subtree (or is this node).
    pub fn contains(&self, other: NodeId) -> bool {
        other.0 >= self.id.0 && other.0 < self.id.0 + self.slot().size
    }

    pub fn children(&self) -> Children<'t> {
        Children { tree: self.tree, next: self.id.0 + 1, end: self.id.0 + self.slot().size }
    }
}

impl core::fmt::Debug for NodeRef<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("NodeRef").field("id", &self.id).field("data", self.data()).finish()
    }
}

pub struct Children<'t> {
    tree: &'t CstTree,
    next: u32,
    end: u32,
}

impl<'t> Iterator for Children<'t> {
    type Item = NodeRef<'t>;

    fn next(&mut self) -> Option<NodeRef<'t>> {
        if self.next >= self.end {
            return None;
        }
        let id = NodeId(self.next);
        self.next += self.tree.slots[id.index()].size;
        Some(NodeRef { tree: self.tree, id })
    }
}

/// Builds a [`CstTree`] from a pre-order event sequence.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    slots: Vec<Slot>,
    open: Vec<u32>,
    root_closed: bool,
}

impl TreeBuilder {
    pub fn new() -> TreeBuilder {
        TreeBuilder::default()
    }

    fn push(&mut self, data: NodeData, span: Option<Span>) -> Result<u32, Error> {
        if self.root_closed {
            return Err(Error::MalformedTree("node after the root was closed"));
        }
        let parent = match self.open.last() {
            Some(&p) => p,
            None if self.slots.is_empty() => 0,
            None => return Err(Error::MalformedTree("more than one root")),
        };
        if self.slots.is_empty() && !matches!(data, NodeData::NonTerminal(_)) {
            return Err(Error::MalformedTree("root must be a non-terminal"));
        }
        let depth = self.open.len() as u32;
        let id = u32::try_from(self.slots.len()).map_err(|_| Error::MalformedTree("tree too large"))?;
        self.slots.push(Slot { data, size: 1, depth, parent, span });
        Ok(id)
    }

    pub fn open(&mut self, kind: NodeKind, span: Option<Span>) -> Result<NodeId, Error> {
        let id = self.push(NodeData::NonTerminal(kind), span)?;
        self.open.push(id);
        Ok(NodeId(id))
    }

    pub fn terminal(&mut self, payload: impl Into<String>, span: Option<Span>) -> Result<NodeId, Error> {
        self.push(NodeData::Terminal(payload.into()), span).map(NodeId)
    }

    pub fn layout(&mut self, marker: WsMarker, span: Option<Span>) -> Result<NodeId, Error> {
        self.push(NodeData::Layout(marker), span).map(NodeId)
    }

    /// Closes the innermost open non-terminal and returns it.
    pub fn close(&mut self) -> Result<NodeId, Error> {
        let id = self.open.pop().ok_or(Error::MalformedTree("close without open node"))?;
        let size = self.slots.len() as u32 - id;
        self.slots[id as usize].size = size;
        if self.open.is_empty() {
            self.root_closed = true;
        }
        Ok(NodeId(id))
    }

    /// Kind of the innermost open non-terminal.
    pub fn current_kind(&self) -> Option<&NodeKind> {
        self.open.last().and_then(|&i| match &self.slots[i as usize].data {
            NodeData::NonTerminal(k) => Some(k),
            _ => None,
        })
    }

    pub fn open_depth(&self) -> usize {
        self.open.len()
    }

    pub fn finish(self, language: LanguageId, source: String, had_errors: bool) -> Result<CstTree, Error> {
        if self.slots.is_empty() {
            return Err(Error::MalformedTree("empty tree"));
        }
        if !self.open.is_empty() {
            return Err(Error::MalformedTree("unclosed non-terminal"));
        }
        Ok(CstTree { slots: self.slots, source, language, had_errors })
    }
}
