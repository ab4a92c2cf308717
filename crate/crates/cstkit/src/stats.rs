//! Corpus statistics and the per-language count table.

use std::collections::BTreeMap;

use cstkit_core::serialize;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusRecord;
use crate::parse::{cached_parser, ParserCache};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageCounts {
    pub with_nl: u64,
    pub without_nl: u64,
    pub total: u64,
}

impl LanguageCounts {
    pub fn add(&mut self, has_nl: bool) {
        if has_nl {
            self.with_nl += 1;
        } else {
            self.without_nl += 1;
        }
        self.total += 1;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
}

impl Summary {
    /// Nearest-rank percentiles.
    pub fn of(values: &[f64]) -> Summary {
        if values.is_empty() {
            return Summary::default();
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let rank = |p: f64| v[((p * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Summary {
            count: v.len(),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            p50: rank(0.5),
            p90: rank(0.9),
            p99: rank(0.99),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub languages: BTreeMap<String, LanguageCounts>,
    pub records: usize,
    /// Records that failed to parse or parsed with recovered errors.
    pub parse_failures: usize,
    pub parse_failure_rate: f64,
    /// Serialized tokens per whitespace-separated code token, over
    /// parseable records.
    pub expansion_ratio: Summary,
    /// Power-of-two buckets: `(lower bound, count)` of serialized lengths.
    pub serialized_length_histogram: Vec<(usize, usize)>,
    pub code_length_histogram: Vec<(usize, usize)>,
}

/// Serialized tokens divided by whitespace-separated code tokens.
pub fn expansion_ratio(serialized_tokens: usize, code: &str) -> Option<f64> {
    let words = code.split_whitespace().count();
    (words > 0).then(|| serialized_tokens as f64 / words as f64)
}

fn histogram(values: impl Iterator<Item = usize>) -> Vec<(usize, usize)> {
    let mut buckets: BTreeMap<usize, usize> = BTreeMap::new();
    for v in values {
        let lo = if v == 0 { 0 } else { 1 << (usize::BITS - 1 - v.leading_zeros()) };
        *buckets.entry(lo).or_default() += 1;
    }
    buckets.into_iter().collect()
}

pub fn stats(records: &[CorpusRecord]) -> CorpusStats {
    let mut out = CorpusStats { records: records.len(), ..CorpusStats::default() };
    for r in records {
        out.languages.entry(r.language.clone()).or_default().add(r.nl.as_deref().is_some_and(|s| !s.trim().is_empty()));
    }
    // serialized length per record, None when unparseable
    let lengths: Vec<Option<usize>> = records
        .par_iter()
        .map_init(ParserCache::new, |parsers, r| {
            let p = cached_parser(parsers, &r.language).ok()?;
            let tree = p.parse(&r.code).ok().filter(|t| !t.had_errors())?;
            Some(serialize(&tree).tokens.len())
        })
        .collect();
    out.parse_failures = lengths.iter().filter(|l| l.is_none()).count();
    out.parse_failure_rate = if records.is_empty() { 0.0 } else { out.parse_failures as f64 / records.len() as f64 };
    let ratios: Vec<f64> =
        records.iter().zip(&lengths).filter_map(|(r, l)| l.and_then(|l| expansion_ratio(l, &r.code))).collect();
    out.expansion_ratio = Summary::of(&ratios);
    out.serialized_length_histogram = histogram(lengths.iter().flatten().copied());
    out.code_length_histogram = histogram(records.iter().map(|r| r.code.split_whitespace().count()));
    out
}

/// `1234567` → `1,234,567`.
pub fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

pub fn display_name(language: &str) -> String {
    match language {
        "python" => "Python".into(),
        "go" => "Go".into(),
        "java" => "Java".into(),
        other => other.into(),
    }
}

/// Plain-text table: a header, one `Name with without total` row per
/// language in the given order, and a `Total` row.
pub fn format_table<'a>(rows: impl IntoIterator<Item = (&'a str, LanguageCounts)>) -> String {
    let mut out = String::from("Language With NL W/O NL Total\n");
    let mut sum = LanguageCounts::default();
    for (name, c) in rows {
        out.push_str(&format!(
            "{} {} {} {}\n",
            display_name(name),
            thousands(c.with_nl),
            thousands(c.without_nl),
            thousands(c.total)
        ));
        sum.with_nl += c.with_nl;
        sum.without_nl += c.without_nl;
        sum.total += c.total;
    }
    out.push_str(&format!("Total {} {} {}\n", thousands(sum.with_nl), thousands(sum.without_nl), thousands(sum.total)));
    out
}

impl CorpusStats {
    pub fn table(&self) -> String {
        format_table(self.languages.iter().map(|(k, v)| (k.as_str(), *v)))
    }
}
