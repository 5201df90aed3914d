#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn mitosis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mitosis"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("failed to launch mitosis")
}

/// Runs a command that must succeed and returns its stderr.
pub fn run_ok(args: &[&str]) -> String {
    let out = mitosis(args);
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(out.status.success(), "mitosis {args:?} failed: {stderr}");
    stderr
}

pub struct Table {
    pub comment: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name} in {:?}", self.header))
    }

    pub fn reals(&self, name: &str) -> Vec<f64> {
        let c = self.column(name);
        self.rows.iter().map(|r| r[c].parse().unwrap()).collect()
    }

    pub fn lists(&self, name: &str) -> Vec<Vec<f64>> {
        let c = self.column(name);
        self.rows
            .iter()
            .map(|r| r[c].split(',').map(|v| v.parse().unwrap()).collect())
            .collect()
    }
}

pub fn read_table(path: &Path) -> Table {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    let (comment, body) = text.split_once('\n').unwrap();
    assert!(
        comment.starts_with("# "),
        "{}: missing comment line",
        path.display()
    );
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    Table {
        comment: comment.to_string(),
        header,
        rows,
    }
}
