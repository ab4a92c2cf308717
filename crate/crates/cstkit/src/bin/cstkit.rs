//! `cstkit` command line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 fatal IO or parse error,
//! 3 a serialized stream was rejected (strict decoding).

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cstkit::corpus::{ingest, InputFormat};
use cstkit::pipeline::{generate, process_record, shard_line, GenerateConfig};
use cstkit::vocab::{add_declared_kinds, build_manifest, collect_kinds, write_manifest};
use cstkit::{grammar, grammar_for_path, stats, CorpusRecord, CstParser, Grammar, KitError, ParserCache};
use cstkit_core::{
    deserialize, render, serialize, to_code, CstTree, DecodeMode, MaskingConfig, NodeData, NodeRef, Objective,
    SerializedTree, DEFAULT_MAX_SENTINELS,
};

#[derive(Parser)]
#[command(name = "cstkit", version, about = "Concrete syntax tree serialization and training-data generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a source file and print its tree as an indented outline.
    Parse(SourceArgs),
    /// Parse a source file and print its serialized stream.
    Serialize(SourceArgs),
    /// Check a serialized stream and print the tree it describes.
    Deserialize(StreamArgs),
    /// Render a serialized stream back to source code.
    Render(StreamArgs),
    /// Build masking examples (MSP/MNP by default) for one source file.
    Mask(MaskArgs),
    /// Write the vocabulary manifest for a corpus.
    Vocab(VocabArgs),
    /// Generate sharded training examples from a corpus.
    Generate(GenerateArgs),
    /// Corpus statistics.
    Stats(StatsArgs),
    /// Decode model output (a serialized stream) into code.
    Decode(DecodeArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Source file, or `-` for stdin.
    input: PathBuf,
    /// Language; inferred from the file extension when omitted.
    #[arg(long)]
    language: Option<String>,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StreamArgs {
    /// Serialized stream file, or `-` for stdin.
    input: PathBuf,
    /// Language whose layout rules apply when rendering.
    #[arg(long)]
    language: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MaskingArgs {
    #[arg(long, default_value_t = 0.15)]
    mask_ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Upper bound on masked subtrees per example.
    #[arg(long, default_value_t = DEFAULT_MAX_SENTINELS)]
    max_sentinels: usize,
}

impl MaskingArgs {
    fn config(&self) -> MaskingConfig {
        MaskingConfig { mask_ratio: self.mask_ratio, rng_seed: self.seed, max_sentinels: self.max_sentinels }
    }
}

#[derive(Args)]
struct MaskArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_delimiter = ',', default_value = "msp,mnp")]
    objectives: Vec<Objective>,
    #[command(flatten)]
    masking: MaskingArgs,
}

#[derive(Args)]
struct CorpusArgs {
    /// A JSONL file, a directory of sources, or a single source file.
    input: PathBuf,
    /// Input format; inferred when omitted.
    #[arg(long)]
    format: Option<InputFormat>,
    /// Language for JSONL lines without a `language` field.
    #[arg(long)]
    language: Option<String>,
}

#[derive(Args)]
struct VocabArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Only kinds seen in the corpus, without the grammars' declared kinds.
    #[arg(long)]
    observed_only: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_SENTINELS)]
    max_sentinels: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, value_delimiter = ',', default_value = "msp,mnp,tetr,trte,declm")]
    objectives: Vec<Objective>,
    #[command(flatten)]
    masking: MaskingArgs,
    /// Output directory for shards, rejects and the ledger.
    #[arg(long)]
    out: PathBuf,
    /// Examples per shard file.
    #[arg(long, default_value_t = 100_000)]
    shard_size: usize,
    /// Reject records whose serialized tree is longer than this.
    #[arg(long, default_value_t = 4096)]
    length_cap: usize,
    /// Keep trees the parser had to recover from syntax errors.
    #[arg(long)]
    keep_errors: bool,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Print the full statistics as JSON instead of the table.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    Lenient,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, value_enum, conflicts_with_all = ["strict", "lenient"])]
    mode: Option<Mode>,
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    /// Repair malformed streams; the repair report goes to
    /// `<out>.repair.json`, or stderr without `--out`.
    #[arg(long)]
    lenient: bool,
}

/// Failure classes, one per exit code.
enum Failure {
    Usage(anyhow::Error),
    Fatal(anyhow::Error),
    Rejected(anyhow::Error),
}

impl From<KitError> for Failure {
    fn from(e: KitError) -> Failure {
        match e {
            KitError::UnknownLanguage(_) | KitError::UnknownFormat(_) => Failure::Usage(e.into()),
            KitError::Core(cstkit_core::Error::InvalidConfig(_)) => Failure::Usage(e.into()),
            KitError::Core(_) => Failure::Rejected(e.into()),
            KitError::Io { .. } | KitError::ParseFatal | KitError::Json(_) => Failure::Fatal(e.into()),
        }
    }
}

impl From<cstkit_core::Error> for Failure {
    fn from(e: cstkit_core::Error) -> Failure {
        KitError::Core(e).into()
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read_input(path: &Path) -> CliResult<String> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| KitError::io("<stdin>", e))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| KitError::io(path, e))?;
    }
    Ok(text)
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| KitError::io(path, e))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| KitError::io("<stdout>", e))?;
        }
    }
    Ok(())
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn source_grammar(args: &SourceArgs) -> CliResult<&'static Grammar> {
    match &args.language {
        Some(name) => Ok(grammar(name)?),
        None => grammar_for_path(&args.input).ok_or_else(|| {
            Failure::Usage(anyhow!("cannot infer the language of {}; pass --language", args.input.display()))
        }),
    }
}

fn parse_source(args: &SourceArgs) -> CliResult<(&'static Grammar, CstTree)> {
    let g = source_grammar(args)?;
    let code = read_input(&args.input)?;
    let tree = CstParser::new(g)?.parse(&code)?;
    if tree.had_errors() {
        eprintln!("warning: {} has syntax errors; the tree contains recovered nodes", args.input.display());
    }
    Ok((g, tree))
}

fn outline(tree: &CstTree) -> String {
    fn walk(node: NodeRef<'_>, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match node.data() {
            NodeData::NonTerminal(kind) => out.push_str(&format!("{pad}{kind}\n")),
            NodeData::Terminal(text) => out.push_str(&format!("{pad}{text:?}\n")),
            NodeData::Layout(marker) => out.push_str(&format!("{pad}{marker}\n")),
        }
        for child in node.children() {
            walk(child, depth + 1, out);
        }
    }
    let mut out = String::new();
    walk(tree.root(), 0, &mut out);
    out
}

fn read_stream(args: &StreamArgs) -> CliResult<(&'static Grammar, SerializedTree)> {
    let g = grammar(&args.language)?;
    let text = read_input(&args.input)?;
    Ok((g, SerializedTree::from_text(&text, g.id())))
}

fn load_corpus(args: &CorpusArgs) -> CliResult<Vec<CorpusRecord>> {
    let ingested = ingest(&args.input, args.format, args.language.as_deref())?;
    for (at, reason) in &ingested.malformed {
        eprintln!("skipped {at}: {reason}");
    }
    Ok(ingested.records)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Parse(args) => {
            let (_, tree) = parse_source(&args)?;
            write_output(args.out.as_deref(), &outline(&tree))
        }
        Command::Serialize(args) => {
            let (_, tree) = parse_source(&args)?;
            write_output(args.out.as_deref(), &with_newline(serialize(&tree).to_text()))
        }
        Command::Deserialize(args) => {
            let (g, stream) = read_stream(&args)?;
            let tree = deserialize(&stream, &g.style)?;
            write_output(args.out.as_deref(), &outline(&tree))
        }
        Command::Render(args) => {
            let (g, stream) = read_stream(&args)?;
            let code = render(&deserialize(&stream, &g.style)?, &g.style)?;
            write_output(args.out.as_deref(), &code)
        }
        Command::Mask(args) => {
            let g = source_grammar(&args.source)?;
            let config = GenerateConfig {
                objectives: args.objectives.iter().copied().collect::<BTreeSet<_>>(),
                masking: args.masking.config(),
                length_cap: usize::MAX,
                skip_errors: false,
                ..GenerateConfig::default()
            };
            config.masking.validate()?;
            let record = CorpusRecord {
                id: args.source.input.display().to_string(),
                language: g.name.to_string(),
                code: read_input(&args.source.input)?,
                nl: None,
            };
            let outcome = process_record(&mut ParserCache::new(), &record, &config);
            let mut text = String::new();
            for (objective, result) in &outcome.results {
                match result {
                    Ok(ex) => {
                        text.push_str(&serde_json::to_string(&shard_line(ex)).map_err(KitError::from)?);
                        text.push('\n');
                    }
                    Err(reason) => eprintln!("{objective}: rejected ({reason})"),
                }
            }
            write_output(args.source.out.as_deref(), &text)
        }
        Command::Vocab(args) => {
            let records = load_corpus(&args.corpus)?;
            let mut scan = collect_kinds(&records);
            if scan.skipped > 0 {
                eprintln!("{} records could not be parsed", scan.skipped);
            }
            if !args.observed_only {
                let languages: BTreeSet<&str> =
                    records.iter().filter_map(|r| grammar(&r.language).ok()).map(|g| g.name).collect();
                add_declared_kinds(&mut scan.inventory, &languages.into_iter().collect::<Vec<_>>())?;
            }
            let masking = MaskingConfig { max_sentinels: args.max_sentinels, ..MaskingConfig::default() };
            let manifest = build_manifest(&scan.inventory, &masking)?;
            match &args.out {
                Some(path) => Ok(write_manifest(&manifest, path)?),
                None => {
                    let json = serde_json::to_string_pretty(&manifest).map_err(KitError::from)?;
                    write_output(None, &with_newline(json))
                }
            }
        }
        Command::Generate(args) => {
            let records = load_corpus(&args.corpus)?;
            let config = GenerateConfig {
                objectives: args.objectives.iter().copied().collect(),
                masking: args.masking.config(),
                shard_size: args.shard_size,
                length_cap: args.length_cap,
                skip_errors: !args.keep_errors,
            };
            let summary = generate(&records, &config, &args.out)?;
            let mut text = String::new();
            for (objective, e) in &summary.ledger {
                text.push_str(&format!(
                    "{objective}: ingested {} emitted {} rejected {}\n",
                    e.ingested, e.emitted, e.rejected
                ));
            }
            text.push_str(&format!("{} shard files in {}\n", summary.shards.len(), args.out.display()));
            write_output(None, &text)
        }
        Command::Stats(args) => {
            let records = load_corpus(&args.corpus)?;
            let s = stats(&records);
            let text = if args.json {
                with_newline(serde_json::to_string_pretty(&s).map_err(KitError::from)?)
            } else {
                let e = &s.expansion_ratio;
                format!(
                    "{}\nrecords {}\nparse failures {} ({:.2}%)\nexpansion ratio mean {:.2} p50 {:.2} p90 {:.2} p99 {:.2}\n",
                    s.table(),
                    s.records,
                    s.parse_failures,
                    100.0 * s.parse_failure_rate,
                    e.mean,
                    e.p50,
                    e.p90,
                    e.p99
                )
            };
            write_output(args.out.as_deref(), &text)
        }
        Command::Decode(args) => {
            let mode = match (args.mode, args.lenient) {
                (Some(Mode::Lenient), _) | (None, true) => DecodeMode::Lenient,
                _ => DecodeMode::Strict,
            };
            let g = grammar(&args.stream.language)?;
            let text = read_input(&args.stream.input)?;
            let decoded = to_code(&text, mode, &g.style)?;
            if let Some(report) = &decoded.report {
                let json = with_newline(serde_json::to_string_pretty(report).map_err(KitError::from)?);
                match &args.stream.out {
                    Some(out) => {
                        let mut path = out.clone().into_os_string();
                        path.push(".repair.json");
                        write_output(Some(Path::new(&path)), &json)?;
                    }
                    None => eprint!("{json}"),
                }
            }
            write_output(args.stream.out.as_deref(), &decoded.code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let (code, err) = match failure {
                Failure::Usage(e) => (1, e),
                Failure::Fatal(e) => (2, e),
                Failure::Rejected(e) => (3, e),
            };
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
