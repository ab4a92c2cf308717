//! Checks that a parsed tree survives serialization and rendering.

use cstkit_core::{deserialize, serialize, tree_equal, CstTree, SerializedTree};

use crate::parse::CstParser;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundTripFailure {
    /// The stream did not deserialize back into the same tree.
    Structure(String),
    Render(cstkit_core::Error),
    /// The rendered code parsed into a different tree. `token` is the first
    /// stream position where the two disagree.
    Reparse {
        token: usize,
        expected: String,
        found: String,
        code: String,
    },
}

impl std::fmt::Display for RoundTripFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RoundTripFailure::Structure(e) => write!(f, "stream does not deserialize to the same tree: {e}"),
            RoundTripFailure::Render(e) => write!(f, "render failed: {e}"),
            RoundTripFailure::Reparse { token, expected, found, .. } => {
                write!(f, "re-parse differs at token {token}: expected `{expected}`, found `{found}`")
            }
        }
    }
}

/// Serialize, deserialize and compare; then render and re-parse with
/// `parser` and compare again.
pub fn check_round_trip(parser: &mut CstParser, tree: &CstTree) -> Result<(), RoundTripFailure> {
    let stream = serialize(tree);
    let text = stream.to_text();
    let relexed = SerializedTree::from_text(&text, stream.language.clone());
    let back = deserialize(&relexed, &parser.grammar().style).map_err(|e| match e {
        cstkit_core::Error::RenderFailure(_) => RoundTripFailure::Render(e),
        e => RoundTripFailure::Structure(e.to_string()),
    })?;
    if !tree_equal(&back, tree) {
        return Err(RoundTripFailure::Structure("trees differ".into()));
    }
    let code = back.source().to_string();
    let again = parser.parse(&code).map_err(|e| RoundTripFailure::Structure(e.to_string()))?;
    if tree_equal(&again, tree) {
        return Ok(());
    }
    let a = stream.tokens;
    let b = serialize(&again).tokens;
    let token = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
    let show = |t: &[cstkit_core::StructToken]| t.get(token).map_or("<end>".to_string(), |t| t.to_string());
    Err(RoundTripFailure::Reparse { token, expected: show(&a), found: show(&b), code })
}
