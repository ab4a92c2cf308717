//! Parallel example generation with sharded JSONL output.
//!
//! Records are processed in parallel, each worker owning its parsers; the
//! results are collected in input order and only then written, so output
//! is byte-identical across runs and thread counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use cstkit_core::objectives::derive_seed;
use cstkit_core::{
    make_declm, make_mnp, make_msp, make_tetr, make_trte, serialize, CstTree, MaskingConfig, Objective,
    ObjectiveExample, SerializedTree,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusRecord;
use crate::error::{KitError, Result};
use crate::parse::{cached_parser, CstParser, ParserCache};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RejectReason {
    UnknownLanguage,
    ParseFatal,
    /// The parser had to recover from syntax errors.
    HadErrors,
    MissingNl,
    /// The serialized tree is longer than the configured cap.
    LengthCap,
    NoCandidates,
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone)]
pub struct GenerateConfig {
    pub objectives: BTreeSet<Objective>,
    /// Base masking settings; the seed is mixed with each record id.
    pub masking: MaskingConfig,
    pub shard_size: usize,
    /// Maximum serialized-tree length in tokens.
    pub length_cap: usize,
    pub skip_errors: bool,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig {
            objectives: Objective::ALL.into_iter().collect(),
            masking: MaskingConfig::default(),
            shard_size: 100_000,
            length_cap: 4096,
            skip_errors: true,
        }
    }
}

/// One line of a shard file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardLine {
    pub id: String,
    pub objective: Objective,
    pub input: String,
    pub target: String,
    pub language: String,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectLine {
    pub id: String,
    pub objective: Objective,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub ingested: usize,
    pub emitted: usize,
    pub rejected: usize,
}

/// Per-objective accounting; `ingested == emitted + rejected` always.
pub type Ledger = BTreeMap<Objective, LedgerEntry>;

/// Everything generated from one record, in objective order.
#[derive(Debug, Clone)]
pub struct RecordOutcome {
    pub id: String,
    pub results: Vec<(Objective, std::result::Result<ObjectiveExample, RejectReason>)>,
}

/// Parses a record's code, applying the error and length filters.
pub fn prepare(
    parser: &mut CstParser,
    record: &CorpusRecord,
    config: &GenerateConfig,
) -> std::result::Result<(CstTree, SerializedTree), RejectReason> {
    let tree = parser.parse(&record.code).map_err(|_| RejectReason::ParseFatal)?;
    if config.skip_errors && tree.had_errors() {
        return Err(RejectReason::HadErrors);
    }
    let stream = serialize(&tree);
    if stream.tokens.len() > config.length_cap {
        return Err(RejectReason::LengthCap);
    }
    Ok((tree, stream))
}

fn reject_reason(e: cstkit_core::Error) -> RejectReason {
    match e {
        cstkit_core::Error::MissingNl => RejectReason::MissingNl,
        cstkit_core::Error::NoCandidates => RejectReason::NoCandidates,
        _ => RejectReason::ParseFatal,
    }
}

/// Builds every requested example for one record.
pub fn process_record(parsers: &mut ParserCache, record: &CorpusRecord, config: &GenerateConfig) -> RecordOutcome {
    let reject_all = |reason| RecordOutcome {
        id: record.id.clone(),
        results: config.objectives.iter().map(|&o| (o, Err(reason))).collect(),
    };
    let Ok(parser) = cached_parser(parsers, &record.language) else {
        return reject_all(RejectReason::UnknownLanguage);
    };
    let (tree, stream) = match prepare(parser, record, config) {
        Ok(x) => x,
        Err(reason) => return reject_all(reason),
    };
    let seed = derive_seed(config.masking.rng_seed, &record.id);
    let nl = record.nl.as_deref();
    let results = config
        .objectives
        .iter()
        .map(|&o| {
            let ex = match o {
                Objective::Msp => make_msp(&tree, &config.masking.with_seed(seed)),
                Objective::Mnp => Ok(make_mnp(&tree)),
                Objective::TeTr => make_tetr(nl, &stream),
                Objective::TrTe => make_trte(nl, &stream),
                Objective::DecLm => Ok(make_declm(nl, &stream)),
            };
            (o, ex.map(|e| e.with_record_id(record.id.clone())).map_err(reject_reason))
        })
        .collect();
    RecordOutcome { id: record.id.clone(), results }
}

/// Processes all records in parallel; outcomes come back in input order.
pub fn generate_examples(records: &[CorpusRecord], config: &GenerateConfig) -> Vec<RecordOutcome> {
    records.par_iter().map_init(ParserCache::new, |parsers, r| process_record(parsers, r, config)).collect()
}

pub fn shard_line(ex: &ObjectiveExample) -> ShardLine {
    ShardLine {
        id: ex.meta.record_id.clone(),
        objective: ex.objective,
        input: ex.input_text(),
        target: ex.target_text(),
        language: ex.meta.language.to_string(),
        seed: ex.meta.seed,
    }
}

pub fn ledger_of(outcomes: &[RecordOutcome], config: &GenerateConfig) -> Ledger {
    let mut ledger: Ledger = config.objectives.iter().map(|&o| (o, LedgerEntry::default())).collect();
    for outcome in outcomes {
        for (o, r) in &outcome.results {
            let e = ledger.get_mut(o).expect("requested objective");
            e.ingested += 1;
            match r {
                Ok(_) => e.emitted += 1,
                Err(_) => e.rejected += 1,
            }
        }
    }
    ledger
}

struct ShardWriter {
    dir: PathBuf,
    objective: Objective,
    shard_size: usize,
    index: usize,
    in_shard: usize,
    out: Option<BufWriter<fs::File>>,
    written: Vec<PathBuf>,
}

impl ShardWriter {
    fn write(&mut self, line: &ShardLine) -> Result<()> {
        if self.out.is_none() || self.in_shard == self.shard_size {
            self.finish_shard()?;
            let path = self.dir.join(format!("{}-{:05}.jsonl", self.objective.name(), self.index));
            self.index += 1;
            self.in_shard = 0;
            self.out = Some(BufWriter::new(fs::File::create(&path).map_err(|e| KitError::io(&path, e))?));
            self.written.push(path);
        }
        let out = self.out.as_mut().expect("open shard");
        serde_json::to_writer(&mut *out, line)?;
        let path = self.written.last().expect("open shard");
        out.write_all(b"\n").map_err(|e| KitError::io(path, e))?;
        self.in_shard += 1;
        Ok(())
    }

    fn finish_shard(&mut self) -> Result<()> {
        if let Some(mut out) = self.out.take() {
            let path = self.written.last().expect("open shard");
            out.flush().map_err(|e| KitError::io(path, e))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerateSummary {
    pub ledger: Ledger,
    pub shards: Vec<PathBuf>,
}

/// Writes `{objective}-{NNNNN}.jsonl` shards, `rejects.jsonl` and
/// `ledger.json` into `out_dir`.
pub fn write_outputs(outcomes: &[RecordOutcome], config: &GenerateConfig, out_dir: &Path) -> Result<GenerateSummary> {
    if config.shard_size == 0 {
        return Err(cstkit_core::Error::InvalidConfig("shard size must be at least 1").into());
    }
    fs::create_dir_all(out_dir).map_err(|e| KitError::io(out_dir, e))?;
    let mut shards = Vec::new();
    for &objective in &config.objectives {
        let mut w = ShardWriter {
            dir: out_dir.to_path_buf(),
            objective,
            shard_size: config.shard_size,
            index: 0,
            in_shard: 0,
            out: None,
            written: Vec::new(),
        };
        for outcome in outcomes {
            for (o, r) in &outcome.results {
                if let (true, Ok(ex)) = (*o == objective, r) {
                    w.write(&shard_line(ex))?;
                }
            }
        }
        w.finish_shard()?;
        shards.extend(w.written);
    }

    let rejects_path = out_dir.join("rejects.jsonl");
    let mut rejects = BufWriter::new(fs::File::create(&rejects_path).map_err(|e| KitError::io(&rejects_path, e))?);
    for outcome in outcomes {
        for (o, r) in &outcome.results {
            if let Err(reason) = r {
                serde_json::to_writer(
                    &mut rejects,
                    &RejectLine { id: outcome.id.clone(), objective: *o, reason: *reason },
                )?;
                rejects.write_all(b"\n").map_err(|e| KitError::io(&rejects_path, e))?;
            }
        }
    }
    rejects.flush().map_err(|e| KitError::io(&rejects_path, e))?;

    let ledger = ledger_of(outcomes, config);
    let ledger_path = out_dir.join("ledger.json");
    let mut text = serde_json::to_string_pretty(&ledger)?;
    text.push('\n');
    fs::write(&ledger_path, text).map_err(|e| KitError::io(&ledger_path, e))?;
    Ok(GenerateSummary { ledger, shards })
}

/// Generation end to end.
pub fn generate(records: &[CorpusRecord], config: &GenerateConfig, out_dir: &Path) -> Result<GenerateSummary> {
    if config.objectives.is_empty() {
        return Err(cstkit_core::Error::InvalidConfig("no objectives requested").into());
    }
    config.masking.validate()?;
    let outcomes = generate_examples(records, config);
    write_outputs(&outcomes, config, out_dir)
}
