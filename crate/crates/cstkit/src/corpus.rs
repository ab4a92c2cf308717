//! Corpus records and ingestion from JSONL files or source trees.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{KitError, Result};
use crate::lang::{grammar, grammar_for_path};

/// One code sample with optional natural-language description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub language: String,
    pub code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nl: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// One JSON object per line.
    Jsonl,
    /// A directory (or single file) of source files, language by extension.
    Dir,
}

impl std::str::FromStr for InputFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "jsonl" => Ok(InputFormat::Jsonl),
            "dir" => Ok(InputFormat::Dir),
            _ => Err(format!("unknown format `{s}` (expected jsonl or dir)")),
        }
    }
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Ingested {
    pub records: Vec<CorpusRecord>,
    /// Lines or files skipped as unusable, with a short reason each.
    pub malformed: Vec<(String, String)>,
}

pub fn infer_format(path: &Path) -> Result<InputFormat> {
    if path.is_dir() || grammar_for_path(path).is_some() {
        return Ok(InputFormat::Dir);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl" | "json" | "ndjson") => Ok(InputFormat::Jsonl),
        _ => Err(KitError::UnknownFormat(path.to_path_buf())),
    }
}

/// Reads a corpus. `language` is the fallback for JSONL lines without a
/// `language` field.
pub fn ingest(path: &Path, format: Option<InputFormat>, language: Option<&str>) -> Result<Ingested> {
    let format = match format {
        Some(f) => f,
        None => infer_format(path)?,
    };
    match format {
        InputFormat::Jsonl => ingest_jsonl(path, language),
        InputFormat::Dir => ingest_dir(path),
    }
}

fn first_text(obj: &serde_json::Map<String, Value>, keys: &[&str]) -> Option<String> {
    keys.iter().filter_map(|k| obj.get(*k)?.as_str()).find(|s| !s.trim().is_empty()).map(str::to_string)
}

/// Parses one JSONL line. The description may come from `nl`,
/// `docstring` or `comment`; a missing id becomes `file:line`.
pub fn parse_record_line(
    line: &str,
    fallback_id: &str,
    language: Option<&str>,
) -> std::result::Result<CorpusRecord, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = value.as_object().ok_or("not a JSON object")?;
    let code = obj.get("code").and_then(Value::as_str).ok_or("missing `code`")?;
    if code.trim().is_empty() {
        return Err("empty `code`".into());
    }
    let lang = obj.get("language").and_then(Value::as_str).or(language).ok_or("missing `language`")?;
    let lang = grammar(lang).map_err(|e| e.to_string())?.name;
    let id = match obj.get("id") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => fallback_id.to_string(),
    };
    Ok(CorpusRecord {
        id,
        language: lang.to_string(),
        code: code.to_string(),
        nl: first_text(obj, &["nl", "docstring", "comment"]),
    })
}

fn ingest_jsonl(path: &Path, language: Option<&str>) -> Result<Ingested> {
    let file = fs::File::open(path).map_err(|e| KitError::io(path, e))?;
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    let mut out = Ingested::default();
    let mut seen = HashSet::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| KitError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let at = format!("{name}:{}", i + 1);
        match parse_record_line(&line, &at, language) {
            Ok(r) if !seen.insert(r.id.clone()) => out.malformed.push((at, format!("duplicate id `{}`", r.id))),
            Ok(r) => out.records.push(r),
            Err(reason) => out.malformed.push((at, reason)),
        }
    }
    Ok(out)
}

fn ingest_dir(root: &Path) -> Result<Ingested> {
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            KitError::io(path, e.into())
        })?;
        if entry.file_type().is_file() && grammar_for_path(entry.path()).is_some() {
            files.push(entry.into_path());
        }
    }
    let mut out = Ingested::default();
    for path in files {
        let g = grammar_for_path(&path).expect("filtered above");
        let rel = path.strip_prefix(root).ok().filter(|p| !p.as_os_str().is_empty()).unwrap_or(&path);
        let id = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        match fs::read(&path) {
            Err(e) => return Err(KitError::io(&path, e)),
            Ok(bytes) => match String::from_utf8(bytes) {
                Err(_) => out.malformed.push((id, "not UTF-8".into())),
                Ok(code) if code.trim().is_empty() => out.malformed.push((id, "empty file".into())),
                Ok(code) => out.records.push(CorpusRecord { id, language: g.name.to_string(), code, nl: None }),
            },
        }
    }
    Ok(out)
}
