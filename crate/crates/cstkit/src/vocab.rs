//! Collecting node kinds from a corpus and writing the vocabulary manifest.

use std::path::Path;

use cstkit_core::{emit_manifest, KindInventory, MaskingConfig, SentinelScheme, VocabManifest};
use rayon::prelude::*;

use crate::corpus::CorpusRecord;
use crate::error::{KitError, Result};
use crate::lang::grammar;
use crate::parse::{cached_parser, ParserCache};

#[derive(Debug, Default)]
pub struct KindScan {
    pub inventory: KindInventory,
    /// Records with an unknown language or a failed parse.
    pub skipped: usize,
}

/// Gathers every node kind observed in the corpus. Trees with recovered
/// errors still count, since their kinds can appear in generated streams.
pub fn collect_kinds(records: &[CorpusRecord]) -> KindScan {
    records
        .par_iter()
        .fold(
            || (ParserCache::new(), KindScan::default()),
            |(mut parsers, mut scan), r| {
                let tree = cached_parser(&mut parsers, &r.language).and_then(|p| p.parse(&r.code)).ok();
                match tree {
                    Some(t) => scan.inventory.observe(&t),
                    None => scan.skipped += 1,
                }
                (parsers, scan)
            },
        )
        .map(|(_, scan)| scan)
        .reduce(KindScan::default, |mut a, b| {
            a.inventory.merge(b.inventory);
            a.skipped += b.skipped;
            a
        })
}

/// Adds every kind the named grammars declare, so the manifest also
/// covers kinds absent from this particular corpus.
pub fn add_declared_kinds(inventory: &mut KindInventory, languages: &[&str]) -> Result<()> {
    for name in languages {
        let g = grammar(name)?;
        let id = g.id();
        for k in g.declared_kinds() {
            inventory.insert(id.clone(), k);
        }
    }
    Ok(())
}

pub fn build_manifest(inventory: &KindInventory, masking: &MaskingConfig) -> Result<VocabManifest> {
    Ok(emit_manifest(inventory, &SentinelScheme::for_config(masking))?)
}

pub fn write_manifest(manifest: &VocabManifest, path: &Path) -> Result<()> {
    let mut json = serde_json::to_string_pretty(manifest)?;
    json.push('\n');
    std::fs::write(path, json).map_err(|e| KitError::io(path, e))
}
