//! Runs the `wordpca` binary inside a scratch directory holding a small
//! planted-signal corpus.

#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;
use wordpca::formats::write_embeddings_file;
use wordpca::EmbeddingFormat;

use super::fixtures;

pub struct Scratch {
    dir: TempDir,
}

impl Scratch {
    /// `emb.txt` (GloVe text), `sim.tsv` and `cls.tsv`.
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let p = fixtures::planted_sweep();
        write_embeddings_file(&p.embeddings, EmbeddingFormat::GloveText, &dir.path().join("emb.txt")).unwrap();
        let sim = fixtures::similarity_over(&p.embeddings, 40, 3);
        fs::write(dir.path().join("sim.tsv"), fixtures::similarity_tsv(&sim)).unwrap();
        fs::write(dir.path().join("cls.tsv"), fixtures::labeled_tsv(&p.dataset)).unwrap();
        Scratch { dir }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn write(&self, name: &str, contents: &str) {
        fs::write(self.path(name), contents).unwrap();
    }

    pub fn read(&self, name: &str) -> Vec<u8> {
        fs::read(self.path(name)).unwrap()
    }

    /// Runs the binary with the scratch directory as working directory.
    pub fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_wordpca")).args(args).current_dir(self.dir.path()).output().unwrap()
    }
}

/// Report text with `provenance.created_unix` removed; CSV passes through.
pub fn without_timestamp(report: &[u8]) -> String {
    let text = String::from_utf8(report.to_vec()).unwrap();
    match serde_json::from_str::<serde_json::Value>(&text) {
        Ok(mut v) => {
            v["provenance"].as_object_mut().unwrap().remove("created_unix");
            serde_json::to_string_pretty(&v).unwrap()
        }
        Err(_) => text,
    }
}
