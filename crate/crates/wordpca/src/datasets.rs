//! Benchmark datasets stored as tab-separated text.
//!
//! Word similarity: `token_a<TAB>token_b<TAB>score`.
//! Labeled sentences: `split<TAB>label<TAB>pre-tokenized text`, with split
//! `train` or `test`.
//! In both, lines starting with `#` and blank lines are skipped.

use std::fmt;
use std::fs;
use std::io::BufRead;
use std::path::Path;

use wordpca_core::{SimilarityDataset, SimilarityPair};

use crate::{Error, Result};

fn lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.split(b'\n').enumerate().filter_map(|(i, line)| {
        let line_no = i + 1;
        let bytes = match line {
            Ok(b) => b,
            Err(e) => return Some(Err(Error::Io(e))),
        };
        let text = match String::from_utf8(bytes) {
            Ok(t) => t,
            Err(_) => return Some(Err(Error::MalformedRecord { line: line_no, reason: "invalid UTF-8".into() })),
        };
        let text = text.strip_suffix('\r').map(str::to_owned).unwrap_or(text);
        if text.trim().is_empty() || text.starts_with('#') {
            None
        } else {
            Some(Ok((line_no, text)))
        }
    })
}

pub fn load_similarity_dataset<R: BufRead>(name: &str, reader: R) -> Result<SimilarityDataset> {
    let mut pairs = Vec::new();
    for item in lines(reader) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split('\t').collect();
        let [a, b, score] = fields[..] else {
            return Err(Error::MalformedRecord { line, reason: format!("expected 3 fields, found {}", fields.len()) });
        };
        if a.is_empty() || b.is_empty() {
            return Err(Error::MalformedRecord { line, reason: "empty token".into() });
        }
        let score: f64 = score
            .trim()
            .parse()
            .map_err(|_| Error::MalformedRecord { line, reason: format!("bad score {score:?}") })?;
        if !score.is_finite() {
            return Err(Error::NonFiniteValue { line });
        }
        pairs.push(SimilarityPair { a: a.to_owned(), b: b.to_owned(), score });
    }
    Ok(SimilarityDataset::new(name, pairs)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledRecord {
    pub split: Split,
    pub label: String,
    pub tokens: Vec<String>,
}

/// Sentences with class labels and a train/test split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTextDataset {
    pub name: String,
    pub records: Vec<LabeledRecord>,
}

impl LabeledTextDataset {
    pub fn split(&self, split: Split) -> impl Iterator<Item = &LabeledRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }

    /// Distinct labels in order of first appearance.
    pub fn labels(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.label.as_str()) {
                out.push(&r.label);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Treat `dev` records as training data instead of rejecting them.
    pub dev_as_train: bool,
}

pub fn load_labeled_dataset<R: BufRead>(name: &str, reader: R, opts: LoadOptions) -> Result<LabeledTextDataset> {
    let mut records = Vec::new();
    for item in lines(reader) {
        let (line, text) = item?;
        let mut fields = text.splitn(3, '\t');
        let (Some(split), Some(label), Some(sentence)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::MalformedRecord { line, reason: "expected split, label and text".into() });
        };
        let split = match split {
            "train" => Split::Train,
            "test" => Split::Test,
            "dev" if opts.dev_as_train => Split::Train,
            other => return Err(Error::UnknownSplit { line, split: other.to_owned() }),
        };
        if label.is_empty() {
            return Err(Error::MalformedRecord { line, reason: "empty label".into() });
        }
        records.push(LabeledRecord {
            split,
            label: label.to_owned(),
            tokens: sentence.split_whitespace().map(str::to_owned).collect(),
        });
    }
    Ok(LabeledTextDataset { name: name.to_owned(), records })
}

/// Dataset name derived from a path: the file stem.
pub fn dataset_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

pub fn read_similarity_file(path: &Path) -> Result<SimilarityDataset> {
    let bytes = fs::read(path)?;
    load_similarity_dataset(&dataset_name(path), &bytes[..])
}

pub fn read_labeled_file(path: &Path, opts: LoadOptions) -> Result<LabeledTextDataset> {
    let bytes = fs::read(path)?;
    load_labeled_dataset(&dataset_name(path), &bytes[..], opts)
}
