//! Shared fixtures: a seeded generator of syntactically valid Python, Go
//! and Java programs (the desk corpus) and a random tree generator.

#![allow(dead_code)]


use std::path::{Path, PathBuf};

use cstkit::CorpusRecord;
use cstkit_core::{CstTree, LanguageId, NodeKind, TreeBuilder, WsMarker};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FILES_PER_LANGUAGE: usize = 400;

/// One generated source file.
#[derive(Debug, Clone)]
pub struct DeskFile {
    pub name: String,
    pub language: &'static str,
    pub code: String,
    pub nl: Option<String>,
}

impl DeskFile {
    pub fn record(&self) -> CorpusRecord {
        CorpusRecord {
            id: self.name.clone(),
            language: self.language.into(),
            code: self.code.clone(),
            nl: self.nl.clone(),
        }
    }
}

/// The full desk corpus: `FILES_PER_LANGUAGE` files for each language.
pub fn desk_corpus(seed: u64) -> Vec<DeskFile> {
    desk_corpus_sized(seed, FILES_PER_LANGUAGE)
}

pub fn desk_corpus_sized(seed: u64, per_language: usize) -> Vec<DeskFile> {
    let mut out = Vec::with_capacity(3 * per_language);
    for (li, (language, ext)) in [("python", "py"), ("go", "go"), ("java", "java")].into_iter().enumerate() {
        for i in 0..per_language {
            let mut g = Gen::new(seed ^ ((li as u64) << 40) ^ i as u64, language);
            let code = match language {
                "python" => g.python_file(),
                "go" => g.go_file(),
                _ => g.java_file(i),
            };
            let nl = g.rng.gen_bool(0.5).then(|| g.sentence());
            out.push(DeskFile { name: format!("{language}/f{i:04}.{ext}"), language, code, nl });
        }
    }
    out
}

pub fn desk_records(seed: u64) -> Vec<CorpusRecord> {
    desk_corpus(seed).iter().map(DeskFile::record).collect()
}

/// Writes the corpus under `dir`, one file per record.
pub fn write_corpus(files: &[DeskFile], dir: &Path) -> Vec<PathBuf> {
    files
        .iter()
        .map(|f| {
            let path = dir.join(&f.name);
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &f.code).unwrap();
            path
        })
        .collect()
}

/// Extra source directories to sweep, from `CSTKIT_EXTRA_CORPUS`
/// (separated like `PATH`).
pub fn extra_corpus_dirs() -> Vec<PathBuf> {
    std::env::var_os("CSTKIT_EXTRA_CORPUS").map(|v| std::env::split_paths(&v).collect()).unwrap_or_default()
}

const WORDS: &[&str] = &[
    "value", "count", "total", "item", "node", "left", "right", "key", "data", "buf", "size", "index", "name", "path",
    "result", "acc", "tmp", "state", "config", "parent", "child", "limit", "offset", "flag", "queue",
];

const STRINGS: &[&str] = &[
    "",
    "hello world",
    "two  spaces",
    "snake_case_name",
    "_",
    "__",
    "trailing space ",
    " leading",
    "(_.module",
    "module._)",
    "(_.a b._)",
    "back\\\\slash",
    "tab\\there",
    "line\\nbreak",
    "quote \\\" inside",
    "<MASK_0>",
    "<NODE_MASK>",
    "newline",
    "\\u00e9t\\u00e9",
    "x = y + z",
    "{}",
    "100%",
    "a,b,c",
];

const SENTENCE: &[&str] = &[
    "Return", "the", "sum", "of", "two", "numbers", "parse", "a", "config", "file", "into", "map", "and", "check",
    "whether", "list", "is", "empty", "build", "tree", "from", "input", "tokens", "count", "matching", "items",
];

pub struct Gen {
    pub rng: ChaCha8Rng,
    out: String,
    depth: usize,
    unit: &'static str,
    fresh: usize,
}

impl Gen {
    pub fn new(seed: u64, language: &str) -> Gen {
        let unit = match language {
            "go" => "\t",
            "python" => ["    ", "  "][(seed % 2) as usize],
            _ => "    ",
        };
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), out: String::new(), depth: 0, unit, fresh: 0 }
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        *items.choose(&mut self.rng).expect("non-empty")
    }

    fn ident(&mut self) -> String {
        let w = self.pick(WORDS);
        match self.rng.gen_range(0..6) {
            0 => format!("{w}_{}", self.pick(WORDS)),
            1 => format!("{w}{}", self.rng.gen_range(0..10)),
            2 => format!("_{w}"),
            _ => w.to_string(),
        }
    }

    fn camel(&mut self) -> String {
        let a = self.pick(WORDS);
        let b = self.pick(WORDS);
        format!("{a}{}{}", b[..1].to_uppercase(), &b[1..])
    }

    fn type_name(&mut self) -> String {
        let c = self.camel();
        format!("{}{}", c[..1].to_uppercase(), &c[1..])
    }

    fn new_name(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    pub fn sentence(&mut self) -> String {
        let n = self.rng.gen_range(3..10);
        let mut words: Vec<&str> = (0..n).map(|_| self.pick(SENTENCE)).collect();
        words[0] = "Return";
        format!("{}.", words.join(" "))
    }

    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str(self.unit);
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn blank(&mut self) {
        self.out.push('\n');
        if self.chance(0.1) {
            self.out.push('\n');
        }
    }

    fn take(&mut self) -> String {
        std::mem::take(&mut self.out)
    }

    fn number(&mut self) -> String {
        match self.rng.gen_range(0..5) {
            0 => self.rng.gen_range(0..1000).to_string(),
            1 => format!("{}.{}", self.rng.gen_range(0..100), self.rng.gen_range(0..100)),
            2 => format!("0x{:x}", self.rng.gen_range(0..65536)),
            _ => self.rng.gen_range(0..10).to_string(),
        }
    }

    // ---------------------------------------------------------------- python

    fn py_string(&mut self) -> String {
        let s = self.pick(STRINGS);
        match self.rng.gen_range(0..8) {
            0 => format!("'{}'", s.replace('\'', "\\'")),
            1 => format!("f\"{} {{{}}}\"", s.replace(['{', '}'], ""), self.ident()),
            2 => format!("r'{}'", s.replace(['\\', '\''], "")),
            3 => format!("b\"{}\"", s.replace(['\\', '"'], "")),
            4 => format!("\"\"\"{s}\n{}\"\"\"", self.pick(STRINGS)),
            _ => format!("\"{s}\""),
        }
    }

    fn py_atom(&mut self) -> String {
        match self.rng.gen_range(0..10) {
            0..=3 => self.ident(),
            4 | 5 => self.number(),
            6 | 7 => self.py_string(),
            8 => self.pick(&["True", "False", "None", "..."]).to_string(),
            _ => format!("{}.{}", self.ident(), self.ident()),
        }
    }

    fn py_expr(&mut self, d: usize) -> String {
        if d == 0 || self.chance(0.35) {
            return self.py_atom();
        }
        let d = d - 1;
        match self.rng.gen_range(0..16) {
            0 | 1 => {
                let op = self.pick(&["+", "-", "*", "/", "//", "%", "**", "<<", "|", "&", "@"]);
                format!("{} {op} {}", self.py_expr(d), self.py_expr(d))
            }
            2 | 3 => {
                let n = self.rng.gen_range(0..4);
                let mut args: Vec<String> = (0..n)
                    .map(|_| {
                        if self.chance(0.2) {
                            format!("{}={}", self.ident(), self.py_expr(d))
                        } else {
                            self.py_expr(d)
                        }
                    })
                    .collect();
                // keyword arguments last
                args.sort_by_key(|a| a.split_once('=').is_some_and(|(k, _)| !k.contains(['(', '[', '"', '\'', ' '])));
                if n >= 2 && self.chance(0.3) {
                    // bracketed continuation lines
                    let pad = self.unit.repeat(self.depth + 1);
                    format!("{}(\n{pad}{},\n{pad})", self.ident(), args.join(&format!(",\n{pad}")))
                } else {
                    format!("{}({})", self.ident(), args.join(", "))
                }
            }
            4 => {
                let op = self.pick(&["==", "!=", "<", ">=", "in", "not in", "is", "is not"]);
                format!("{} {op} {}", self.py_expr(d), self.py_expr(d))
            }
            5 => format!("{} {} {}", self.py_expr(d), self.pick(&["and", "or"]), self.py_expr(d)),
            6 => format!("(not {})", self.py_expr(d)),
            7 => format!("-{}", self.py_atom()),
            8 => {
                let n = self.rng.gen_range(0..4);
                let items: Vec<String> = (0..n).map(|_| self.py_expr(d)).collect();
                format!("[{}]", items.join(", "))
            }
            9 => {
                let n = self.rng.gen_range(0..3);
                let items: Vec<String> = (0..n).map(|_| format!("{}: {}", self.py_string(), self.py_expr(d))).collect();
                format!("{{{}}}", items.join(", "))
            }
            10 => format!("({}, {})", self.py_expr(d), self.py_expr(d)),
            11 => {
                let v = self.ident();
                let cond = if self.chance(0.5) { format!(" if {v}") } else { String::new() };
                format!("[{} for {v} in {}{cond}]", self.py_expr(d), self.ident())
            }
            12 => format!("(lambda {}: {})", self.ident(), self.py_expr(d)),
            13 => format!("({} if {} else {})", self.py_atom(), self.py_expr(d), self.py_atom()),
            14 => format!("{}[{}]", self.ident(), if self.chance(0.3) { "1:".to_string() } else { self.py_expr(d) }),
            _ => format!("({})", self.py_expr(d)),
        }
    }

    fn py_trailing_comment(&mut self) -> String {
        if self.chance(0.12) {
            format!("  # {}", self.pick(&["note", "TODO: fix_me", "keep (_.this", "x._)", "#"]))
        } else {
            String::new()
        }
    }

    fn py_simple(&mut self, in_fn: bool, in_loop: bool) -> String {
        match self.rng.gen_range(0..14) {
            0..=3 => format!("{} = {}", self.ident(), self.py_expr(3)),
            4 => format!("{} {} {}", self.ident(), self.pick(&["+=", "-=", "*=", "|="]), self.py_expr(2)),
            5 | 6 => {
                let call = format!("{}({})", self.ident(), self.py_expr(2));
                call
            }
            7 if in_fn => format!("return {}", self.py_expr(3)),
            8 if in_loop => self.pick(&["break", "continue"]).to_string(),
            9 => format!("assert {}, {}", self.py_expr(2), self.py_string()),
            10 => format!("{}, {} = {}, {}", self.ident(), self.ident(), self.py_atom(), self.py_atom()),
            11 => format!("x = {} + \\\n{}{}", self.py_atom(), self.unit.repeat(self.depth + 1), self.py_atom()),
            12 => format!("{} = {}; {}({})", self.ident(), self.py_atom(), self.ident(), self.py_atom()),
            _ => "pass".to_string(),
        }
    }

    fn py_block(&mut self, d: usize, in_fn: bool, in_loop: bool) {
        self.depth += 1;
        let n = self.rng.gen_range(1..5);
        for i in 0..n {
            if i > 0 && self.chance(0.15) {
                self.blank();
            }
            if self.chance(0.1) {
                let c = format!("# {}", self.sentence());
                self.line(&c);
            }
            self.py_stmt(d, in_fn, in_loop);
        }
        self.depth -= 1;
    }

    fn py_stmt(&mut self, d: usize, in_fn: bool, in_loop: bool) {
        if d == 0 || self.chance(0.55) {
            let s = self.py_simple(in_fn, in_loop);
            let c = self.py_trailing_comment();
            self.line(&format!("{s}{c}"));
            return;
        }
        let d = d - 1;
        match self.rng.gen_range(0..9) {
            0 | 1 => {
                let c = self.py_expr(2);
                if self.chance(0.2) {
                    // one-line body
                    let s = self.py_simple(in_fn, in_loop);
                    self.line(&format!("if {c}: {s}"));
                    return;
                }
                self.line(&format!("if {c}:"));
                self.py_block(d, in_fn, in_loop);
                if self.chance(0.3) {
                    let c = self.py_expr(2);
                    self.line(&format!("elif {c}:"));
                    self.py_block(d, in_fn, in_loop);
                }
                if self.chance(0.4) {
                    self.line("else:");
                    self.py_block(d, in_fn, in_loop);
                }
            }
            2 => {
                let (v, it) = (self.ident(), self.py_expr(1));
                self.line(&format!("for {v} in {it}:"));
                self.py_block(d, in_fn, true);
            }
            3 => {
                let c = self.py_expr(2);
                self.line(&format!("while {c}:"));
                self.py_block(d, in_fn, true);
            }
            4 => {
                self.line("try:");
                self.py_block(d, in_fn, in_loop);
                let e = self.pick(&["ValueError", "KeyError", "(OSError, TypeError)", "Exception"]);
                self.line(&format!("except {e} as err:"));
                self.py_block(d, in_fn, in_loop);
                if self.chance(0.3) {
                    self.line("finally:");
                    self.py_block(d, in_fn, in_loop);
                }
            }
            5 => {
                let (a, b) = (self.py_expr(1), self.ident());
                self.line(&format!("with open({a}) as {b}:"));
                self.py_block(d, in_fn, in_loop);
            }
            6 | 7 => self.py_def(d),
            _ => self.py_class(d),
        }
    }

    fn py_def(&mut self, d: usize) {
        if self.chance(0.2) {
            let dec = self.pick(&["@staticmethod", "@property", "@functools.lru_cache(maxsize=None)"]);
            self.line(dec);
        }
        let name = self.new_name("func_");
        let n = self.rng.gen_range(0..4);
        let mut params: Vec<String> = (0..n).map(|i| format!("{}{i}", self.ident())).collect();
        if self.chance(0.3) {
            params.push(format!("opt={}", self.py_atom()));
        }
        if self.chance(0.15) {
            params.push("*args".into());
            params.push("**kwargs".into());
        }
        let ret = if self.chance(0.2) { " -> int" } else { "" };
        self.line(&format!("def {name}({}){ret}:", params.join(", ")));
        if self.chance(0.3) {
            self.depth += 1;
            let doc = format!("\"\"\"{}\"\"\"", self.sentence());
            self.line(&doc);
            self.depth -= 1;
        }
        self.py_block(d, true, false);
    }

    fn py_class(&mut self, d: usize) {
        let name = self.type_name();
        let base = if self.chance(0.4) { "(object)" } else { "" };
        self.line(&format!("class {name}{base}:"));
        self.depth += 1;
        let n = self.rng.gen_range(1..3);
        for i in 0..n {
            if i > 0 {
                self.blank();
            }
            if self.chance(0.3) {
                let s = format!("{} = {}", self.ident(), self.py_atom());
                self.line(&s);
            } else {
                self.py_def(d.saturating_sub(1));
            }
        }
        self.depth -= 1;
    }

    pub fn python_file(&mut self) -> String {
        if self.chance(0.3) {
            let doc = format!("\"\"\"{}\"\"\"", self.sentence());
            self.line(&doc);
        }
        if self.chance(0.6) {
            let m = self.pick(&[
                "import os",
                "import sys, re",
                "from collections import defaultdict",
                "from . import util as u_til",
            ]);
            self.line(m);
            self.blank();
        }
        let n = self.rng.gen_range(2..7);
        for _ in 0..n {
            if self.chance(0.5) {
                self.blank();
            }
            if self.chance(0.15) {
                let c = format!("# {}", self.sentence());
                self.line(&c);
            }
            self.py_stmt(3, false, false);
        }
        let mut code = self.take();
        if self.chance(0.1) {
            // no trailing newline
            code.pop();
        }
        code
    }

    // -------------------------------------------------------------------- go

    fn go_string(&mut self) -> String {
        let s = self.pick(STRINGS);
        match self.rng.gen_range(0..4) {
            0 => format!("`{}`", s.replace('`', "")),
            1 => format!("'{}'", self.pick(&["a", "_", " ", "\\n", "\\'", "(", "é"])),
            _ => format!("\"{s}\""),
        }
    }

    fn go_atom(&mut self) -> String {
        match self.rng.gen_range(0..9) {
            0..=3 => self.camel(),
            4 | 5 => self.number(),
            6 | 7 => self.go_string(),
            _ => self.pick(&["nil", "true", "false", "iota"]).to_string(),
        }
    }

    fn go_expr(&mut self, d: usize) -> String {
        if d == 0 || self.chance(0.35) {
            return self.go_atom();
        }
        let d = d - 1;
        match self.rng.gen_range(0..11) {
            0 | 1 => {
                let op = self.pick(&["+", "-", "*", "/", "%", "<<", "&^", "|", "==", "!=", "<", "&&", "||"]);
                format!("{} {op} {}", self.go_expr(d), self.go_expr(d))
            }
            2 | 3 => {
                let n = self.rng.gen_range(0..4);
                let args: Vec<String> = (0..n).map(|_| self.go_expr(d)).collect();
                let f = if self.chance(0.4) {
                    format!("fmt.{}", self.pick(&["Println", "Sprintf", "Errorf"]))
                } else {
                    self.camel()
                };
                format!("{f}({})", args.join(", "))
            }
            4 => format!("{}.{}", self.camel(), self.type_name()),
            5 => format!("{}[{}]", self.camel(), self.go_expr(d)),
            6 => format!("[]int{{{}, {}}}", self.number(), self.number()),
            7 => format!("map[string]int{{\"{}\": {}}}", self.pick(&["k", "some key", "a_b"]), self.number()),
            8 => format!("!{}", self.go_atom()),
            9 => format!("&{}{{}}", self.type_name()),
            _ => format!("({})", self.go_expr(d)),
        }
    }

    /// Composite literals in a clause header need parentheses.
    fn go_cond(&mut self, d: usize) -> String {
        let e = self.go_expr(d);
        if e.contains('{') {
            format!("({e})")
        } else {
            e
        }
    }

    fn go_comment(&mut self) -> String {
        if self.chance(0.1) {
            format!(" // {}", self.pick(&["note", "keep (_.this", "_x._)", "TODO"]))
        } else {
            String::new()
        }
    }

    fn go_simple(&mut self) -> String {
        match self.rng.gen_range(0..9) {
            0 | 1 => format!("{} := {}", self.camel(), self.go_expr(3)),
            2 => format!("{} = {}", self.camel(), self.go_expr(2)),
            3 => format!("{} {} {}", self.camel(), self.pick(&["+=", "-=", "|="]), self.go_expr(2)),
            4 => format!("{}++", self.camel()),
            5 => format!("defer {}()", self.camel()),
            6 => format!("go func() {{ {}() }}()", self.camel()),
            _ => format!("{}({})", self.camel(), self.go_expr(2)),
        }
    }

    fn go_block_body(&mut self, d: usize, in_loop: bool) {
        self.depth += 1;
        let n = self.rng.gen_range(1..5);
        for i in 0..n {
            if i > 0 && self.chance(0.15) {
                self.blank();
            }
            if self.chance(0.08) {
                let c = format!("// {}", self.sentence());
                self.line(&c);
            }
            self.go_stmt(d, in_loop);
        }
        self.depth -= 1;
    }

    fn go_stmt(&mut self, d: usize, in_loop: bool) {
        if d == 0 || self.chance(0.55) {
            let s = if in_loop && self.chance(0.1) {
                self.pick(&["break", "continue"]).to_string()
            } else if self.chance(0.1) {
                format!("return {}", self.go_expr(2))
            } else {
                self.go_simple()
            };
            let c = self.go_comment();
            self.line(&format!("{s}{c}"));
            return;
        }
        let d = d - 1;
        match self.rng.gen_range(0..6) {
            0 | 1 => {
                let c = self.go_cond(2);
                let init =
                    if self.chance(0.2) { format!("{} := {}; ", self.camel(), self.go_atom()) } else { String::new() };
                self.line(&format!("if {init}{c} {{"));
                self.go_block_body(d, in_loop);
                if self.chance(0.4) {
                    let c = self.go_cond(1);
                    self.line(&format!("}} else if {c} {{"));
                    self.go_block_body(d, in_loop);
                }
                if self.chance(0.3) {
                    self.line("} else {");
                    self.go_block_body(d, in_loop);
                }
                self.line("}");
            }
            2 => {
                let head = match self.rng.gen_range(0..3) {
                    0 => format!("for i := 0; i < {}; i++ {{", self.number()),
                    1 => format!("for _, {} := range {} {{", self.camel(), self.camel()),
                    _ => "for {".to_string(),
                };
                self.line(&head);
                self.go_block_body(d, true);
                self.line("}");
            }
            3 => {
                let v = self.camel();
                self.line(&format!("switch {v} {{"));
                for _ in 0..self.rng.gen_range(1..4) {
                    let c = self.go_atom();
                    self.line(&format!("case {c}:"));
                    self.go_block_body(d, in_loop);
                }
                if self.chance(0.5) {
                    self.line("default:");
                    self.go_block_body(d, in_loop);
                }
                self.line("}");
            }
            4 => {
                let v = self.camel();
                self.line(&format!("{v} := func(x int) int {{"));
                self.go_block_body(d, false);
                self.line("}");
            }
            _ => {
                self.line("{");
                self.go_block_body(d, in_loop);
                self.line("}");
            }
        }
    }

    fn go_func(&mut self) {
        if self.chance(0.4) {
            let c = format!("// {}", self.sentence());
            self.line(&c);
        }
        let name = self.new_name("Func");
        let recv = if self.chance(0.3) {
            format!("({} *{}) ", self.pick(&["s", "r", "t"]), self.type_name())
        } else {
            String::new()
        };
        let n = self.rng.gen_range(0..3);
        let params: Vec<String> = (0..n)
            .map(|i| {
                format!(
                    "{}{i} {}",
                    self.camel(),
                    self.pick(&["int", "string", "[]byte", "map[string]int", "...interface{}"])
                )
            })
            .collect();
        let ret = self.pick(&["", " int", " (int, error)", " error", " string"]);
        self.line(&format!("func {recv}{name}({}){ret} {{", params.join(", ")));
        self.go_block_body(3, false);
        self.line("}");
    }

    pub fn go_file(&mut self) -> String {
        if self.chance(0.3) {
            let c = format!("// Package main {}", self.sentence());
            self.line(&c);
        }
        self.line("package main");
        self.blank();
        match self.rng.gen_range(0..3) {
            0 => self.line("import \"fmt\""),
            1 => {
                self.line("import (");
                self.depth += 1;
                self.line("\"fmt\"");
                self.line("str \"strings\"");
                self.depth -= 1;
                self.line(")");
            }
            _ => {}
        }
        let n = self.rng.gen_range(1..5);
        for _ in 0..n {
            self.blank();
            match self.rng.gen_range(0..6) {
                0 => {
                    let t = self.type_name();
                    self.line(&format!("type {t} struct {{"));
                    self.depth += 1;
                    for _ in 0..self.rng.gen_range(0..4) {
                        let f = format!("{} {}", self.type_name(), self.pick(&["int", "string", "*Node", "[]float64"]));
                        let tag = if self.chance(0.3) { " `json:\"some_field\"`" } else { "" };
                        self.line(&format!("{f}{tag}"));
                    }
                    self.depth -= 1;
                    self.line("}");
                }
                1 => {
                    self.line("const (");
                    self.depth += 1;
                    let s = format!("{} = iota", self.type_name());
                    self.line(&s);
                    let s = self.type_name();
                    self.line(&s);
                    self.depth -= 1;
                    self.line(")");
                }
                2 => {
                    let s = format!("var {} = {}", self.camel(), self.go_expr(2));
                    self.line(&s);
                }
                _ => self.go_func(),
            }
        }
        self.take()
    }

    // ------------------------------------------------------------------ java

    fn java_string(&mut self) -> String {
        if self.chance(0.2) {
            return format!("'{}'", self.pick(&["a", "_", " ", "\\n", "\\'", "(", "\\\\"]));
        }
        format!("\"{}\"", self.pick(STRINGS))
    }

    fn java_atom(&mut self) -> String {
        match self.rng.gen_range(0..9) {
            0..=3 => self.camel(),
            4 | 5 => self.number(),
            6 | 7 => self.java_string(),
            _ => self.pick(&["null", "true", "false", "this"]).to_string(),
        }
    }

    fn java_expr(&mut self, d: usize) -> String {
        if d == 0 || self.chance(0.35) {
            return self.java_atom();
        }
        let d = d - 1;
        match self.rng.gen_range(0..11) {
            0 | 1 => {
                let op = self.pick(&["+", "-", "*", "/", "%", "<<", ">>>", "|", "==", "!=", "<", "&&", "||"]);
                format!("{} {op} {}", self.java_expr(d), self.java_expr(d))
            }
            2 | 3 => {
                let n = self.rng.gen_range(0..4);
                let args: Vec<String> = (0..n).map(|_| self.java_expr(d)).collect();
                let target = if self.chance(0.5) { format!("{}.", self.camel()) } else { String::new() };
                format!("{target}{}({})", self.camel(), args.join(", "))
            }
            4 => format!("new {}<>()", self.pick(&["ArrayList", "HashMap", "ArrayDeque"])),
            5 => format!("{}[{}]", self.camel(), self.java_expr(d)),
            6 => format!("{} ? {} : {}", self.java_expr(d), self.java_atom(), self.java_atom()),
            7 => format!("({}) {}", self.pick(&["int", "String", "long"]), self.java_atom()),
            8 => format!("!{}", self.java_atom()),
            9 => format!("new int[] {{{}, {}}}", self.number(), self.number()),
            _ => format!("({})", self.java_expr(d)),
        }
    }

    fn java_comment(&mut self) -> String {
        match self.rng.gen_range(0..20) {
            0 => " // trailing note".to_string(),
            1 => " /* inline (_.x */".to_string(),
            _ => String::new(),
        }
    }

    fn java_simple(&mut self) -> String {
        match self.rng.gen_range(0..8) {
            0 | 1 => format!(
                "{} {} = {};",
                self.pick(&["int", "var", "String", "List<String>", "long[]"]),
                self.camel(),
                self.java_expr(3)
            ),
            2 => format!("{} = {};", self.camel(), self.java_expr(2)),
            3 => format!("{} {} {};", self.camel(), self.pick(&["+=", "-=", "|="]), self.java_expr(2)),
            4 => format!("{}++;", self.camel()),
            5 => format!("Function<Integer, Integer> {} = ({}) -> {};", self.camel(), self.camel(), self.java_expr(2)),
            _ => format!("{}.{}({});", self.camel(), self.camel(), self.java_expr(2)),
        }
    }

    fn java_block_body(&mut self, d: usize, in_loop: bool) {
        self.depth += 1;
        let n = self.rng.gen_range(1..5);
        for i in 0..n {
            if i > 0 && self.chance(0.15) {
                self.blank();
            }
            if self.chance(0.08) {
                let c = format!("// {}", self.sentence());
                self.line(&c);
            }
            self.java_stmt(d, in_loop);
        }
        self.depth -= 1;
    }

    fn java_stmt(&mut self, d: usize, in_loop: bool) {
        if d == 0 || self.chance(0.55) {
            let s = if in_loop && self.chance(0.1) {
                self.pick(&["break;", "continue;"]).to_string()
            } else if self.chance(0.05) {
                format!("throw new IllegalStateException({});", self.java_string())
            } else {
                self.java_simple()
            };
            let c = self.java_comment();
            self.line(&format!("{s}{c}"));
            return;
        }
        let d = d - 1;
        match self.rng.gen_range(0..7) {
            0 | 1 => {
                let c = self.java_expr(2);
                self.line(&format!("if ({c}) {{"));
                self.java_block_body(d, in_loop);
                if self.chance(0.4) {
                    self.line("} else {");
                    self.java_block_body(d, in_loop);
                }
                self.line("}");
            }
            2 => {
                let head = match self.rng.gen_range(0..3) {
                    0 => format!("for (int i = 0; i < {}; i++) {{", self.number()),
                    1 => format!("for (String {} : {}) {{", self.camel(), self.camel()),
                    _ => format!("while ({}) {{", self.java_expr(1)),
                };
                self.line(&head);
                self.java_block_body(d, true);
                self.line("}");
            }
            3 => {
                self.line("do {");
                self.java_block_body(d, true);
                let c = self.java_expr(1);
                self.line(&format!("}} while ({c});"));
            }
            4 => {
                let v = self.camel();
                self.line(&format!("switch ({v}) {{"));
                self.depth += 1;
                for _ in 0..self.rng.gen_range(1..3) {
                    let c = self.number();
                    self.line(&format!("case {c}:"));
                    self.java_block_body(d, in_loop);
                    self.depth += 1;
                    self.line("break;");
                    self.depth -= 1;
                }
                self.line("default:");
                self.java_block_body(0, in_loop);
                self.depth -= 1;
                self.line("}");
            }
            5 => {
                self.line("try {");
                self.java_block_body(d, in_loop);
                let e = self.pick(&["Exception", "IOException | RuntimeException"]);
                self.line(&format!("}} catch ({e} e) {{"));
                self.java_block_body(d, in_loop);
                if self.chance(0.3) {
                    self.line("} finally {");
                    self.java_block_body(d, in_loop);
                }
                self.line("}");
            }
            _ => {
                let s = format!("return {};", self.java_expr(2));
                self.line(&s);
            }
        }
    }

    fn java_method(&mut self) {
        match self.rng.gen_range(0..4) {
            0 => {
                let c = format!("/** {} */", self.sentence());
                self.line(&c);
            }
            1 => self.line("@Override"),
            _ => {}
        }
        let mods = self.pick(&["public", "private static", "protected final", "static <T>"]);
        let ret = self.pick(&["void", "int", "String", "List<Integer>", "T"]);
        let name = self.new_name("method");
        let n = self.rng.gen_range(0..3);
        let params: Vec<String> = (0..n)
            .map(|i| format!("{} {}{i}", self.pick(&["int", "String", "Map<String, Integer>", "int..."]), self.camel()))
            .collect();
        let throws = if self.chance(0.2) { " throws IOException" } else { "" };
        self.line(&format!("{mods} {ret} {name}({}){throws} {{", params.join(", ")));
        self.java_block_body(3, false);
        self.line("}");
    }

    pub fn java_file(&mut self, i: usize) -> String {
        if self.chance(0.5) {
            self.line("package org.example.desk;");
            self.blank();
        }
        if self.chance(0.6) {
            self.line("import java.util.*;");
            self.line("import java.io.IOException;");
            self.blank();
        }
        if self.chance(0.3) {
            let c = format!("/*\n * {}\n */", self.sentence());
            self.line(&c);
        }
        let kind = self.rng.gen_range(0..5);
        let name = format!("Desk{i}");
        match kind {
            0 => {
                self.line(&format!("public interface {name} {{"));
                self.depth += 1;
                for _ in 0..self.rng.gen_range(1..4) {
                    let m = format!(
                        "{} {}({} x);",
                        self.pick(&["int", "void", "String"]),
                        self.camel(),
                        self.pick(&["int", "String"])
                    );
                    self.line(&m);
                }
                self.depth -= 1;
                self.line("}");
            }
            1 => {
                self.line(&format!("enum {name} {{"));
                self.depth += 1;
                self.line("RED, GREEN_LIGHT, BLUE;");
                self.depth -= 1;
                self.line("}");
            }
            _ => {
                let ext = if self.chance(0.3) { " extends Base implements Runnable" } else { "" };
                self.line(&format!("public class {name}{ext} {{"));
                self.depth += 1;
                for _ in 0..self.rng.gen_range(0..3) {
                    let f = format!(
                        "private {} {} = {};",
                        self.pick(&["int", "String", "final long"]),
                        self.camel(),
                        self.java_atom()
                    );
                    self.line(&f);
                }
                let n = self.rng.gen_range(1..4);
                for _ in 0..n {
                    self.blank();
                    self.java_method();
                }
                self.depth -= 1;
                self.line("}");
            }
        }
        self.take()
    }
}

// ------------------------------------------------------------ random trees

pub const KINDS: &[&str] = &["expr", "stmt", "block", "call", "name", "binary_op", "args", "if_stmt"];

/// A random tree with at least `min_nodes` nodes: non-terminals from
/// `KINDS`, terminal payloads with spaces and underscores, and some
/// layout markers.
pub fn random_tree(rng: &mut impl Rng, min_nodes: usize) -> CstTree {
    let target = rng.gen_range(min_nodes..min_nodes * 4);
    let mut b = TreeBuilder::new();
    b.open(NodeKind::new("module").unwrap(), None).unwrap();
    let mut count = 1;
    grow(rng, &mut b, &mut count, target, 1);
    while count < min_nodes {
        grow(rng, &mut b, &mut count, min_nodes, 1);
    }
    b.close().unwrap();
    b.finish(LanguageId::new("synthetic").unwrap(), String::new(), false).unwrap()
}

fn grow(rng: &mut impl Rng, b: &mut TreeBuilder, count: &mut usize, target: usize, depth: usize) {
    let children = rng.gen_range(1..5);
    for _ in 0..children {
        if *count >= target {
            return;
        }
        *count += 1;
        let r: f64 = rng.gen();
        if depth < 12 && r < 0.45 {
            b.open(NodeKind::new(*KINDS.choose(rng).unwrap()).unwrap(), None).unwrap();
            grow(rng, b, count, target, depth + 1);
            b.close().unwrap();
        } else if r < 0.5 {
            b.layout(*WsMarker::ALL.choose(rng).unwrap(), None).unwrap();
        } else {
            let p = *["x", "a b", "snake_case", "_", "(", ")", "+", "42", "\"s p\""].choose(rng).unwrap();
            b.terminal(p, None).unwrap();
        }
    }
}
