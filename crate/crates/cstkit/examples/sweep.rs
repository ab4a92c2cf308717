//! Round-trips every source file under a directory and reports failures.
//!
//! cargo run --release --example sweep -- /usr/lib/python3

use std::path::PathBuf;

use cstkit::{check_round_trip, grammar_for_path, CstParser};

fn main() {
    let root: PathBuf = std::env::args().nth(1).expect("usage: sweep <dir> [max-failures]").into();
    let show: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(20);
    let (mut ok, mut errors, mut failed) = (0usize, 0usize, 0usize);
    let mut entries: Vec<_> = walkdir::WalkDir::new(&root).sort_by_file_name().into_iter().flatten().collect();
    entries.retain(|e| e.file_type().is_file() && grammar_for_path(e.path()).is_some());
    for e in entries {
        let g = grammar_for_path(e.path()).unwrap();
        let Ok(src) = std::fs::read_to_string(e.path()) else { continue };
        let mut p = CstParser::new(g).unwrap();
        let tree = p.parse(&src).unwrap();
        if tree.had_errors() {
            errors += 1;
            continue;
        }
        match check_round_trip(&mut p, &tree) {
            Ok(()) => ok += 1,
            Err(f) => {
                failed += 1;
                if failed <= show {
                    println!("{}: {f}", e.path().display());
                }
            }
        }
    }
    println!("ok {ok}, failed {failed}, parse errors {errors}");
}
