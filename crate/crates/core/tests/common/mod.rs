use std::fs;
use std::path::PathBuf;

use genfitch::io::{read_map, read_tree, FormatError};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/malformed")
}

pub struct CorpusCase {
    pub file: String,
    pub kind: String,
    pub line: usize,
    pub col: usize,
}

pub fn corpus_cases() -> Vec<CorpusCase> {
    let text = fs::read_to_string(corpus_dir().join("expected.tsv")).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            CorpusCase {
                file: f[0].to_string(),
                kind: f[1].to_string(),
                line: f[2].parse().unwrap(),
                col: f[3].parse().unwrap(),
            }
        })
        .collect()
}

pub fn parse_corpus_file(file: &str) -> Result<(), FormatError> {
    let text = fs::read_to_string(corpus_dir().join(file)).unwrap();
    if file.ends_with(".fm") {
        read_map(&text).map(|_| ())
    } else {
        read_tree(&text).map(|_| ())
    }
}

/// Mismatches between the corpus and its expectations, one message each.
pub fn corpus_failures() -> Vec<String> {
    corpus_cases()
        .iter()
        .filter_map(|c| match parse_corpus_file(&c.file) {
            Ok(()) => Some(format!("{}: accepted", c.file)),
            Err(e) if e.kind() == c.kind && e.position() == Some((c.line, c.col)) => None,
            Err(e) => Some(format!(
                "{}: got {} at {:?}, expected {} at {}:{}",
                c.file,
                e.kind(),
                e.position(),
                c.kind,
                c.line,
                c.col
            )),
        })
        .collect()
}
