//! Deterministic file emission and the run manifest.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Format;

pub const HASH_ALGORITHM: &str = "sha256";
pub const MANIFEST: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// 12 significant digits, scientific notation.
pub fn csv_number(v: f64) -> String {
    if v.is_finite() {
        // adding zero turns -0.0 into 0.0
        format!("{:.11e}", v + 0.0)
    } else {
        String::new()
    }
}

/// Builds a CSV document with a fixed header and LF line endings.
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text, columns: header.len() }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            self.text.push_str(c);
        }
        self.text.push('\n');
    }

    pub fn numbers(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| csv_number(v)).collect();
        self.row(&cells);
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

/// Two-column profile CSV (`x_m,intensity`).
pub fn profile_csv(xs: &[f64], values: &[f64]) -> Vec<u8> {
    let mut csv = Csv::new(&["x_m", "intensity"]);
    for (x, v) in xs.iter().zip(values) {
        csv.numbers(&[*x, *v]);
    }
    csv.into_bytes()
}

pub fn json_bytes<S: Serialize>(value: &S) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("output values serialize");
    text.push('\n');
    text.into_bytes()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Output directory that only accepts plain file names, skips formats that
/// were not requested, and records a digest for everything it writes.
pub struct OutputDir {
    root: PathBuf,
    formats: BTreeSet<Format>,
    entries: Vec<OutputEntry>,
}

impl OutputDir {
    pub fn create(root: &Path, formats: BTreeSet<Format>) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), formats, entries: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }

    /// Writes `name` when `format` is enabled (or is `None`, for files that
    /// are always produced).
    pub fn write(&mut self, name: &str, format: Option<Format>, bytes: &[u8]) -> io::Result<()> {
        if format.is_some_and(|f| !self.wants(f)) {
            return Ok(());
        }
        let path = self.path_for(name)?;
        fs::write(&path, bytes)?;
        self.entries.push(OutputEntry { file: name.to_owned(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
        Ok(())
    }

    fn path_for(&self, name: &str) -> io::Result<PathBuf> {
        let plain = !name.is_empty()
            && name != "."
            && name != ".."
            && !name.contains(['/', '\\'])
            && Path::new(name).components().count() == 1;
        if !plain {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, format!("refusing output name `{name}`")));
        }
        Ok(self.root.join(name))
    }

    pub fn entries(&self) -> &[OutputEntry] {
        &self.entries
    }

    pub fn write_manifest(&self, manifest: &RunManifest) -> io::Result<()> {
        fs::write(self.path_for(MANIFEST)?, json_bytes(manifest))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    pub hash_algorithm: String,
    pub outputs: Vec<OutputEntry>,
    pub status: String,
    pub failed_stage: Option<String>,
    pub error: Option<String>,
    pub warnings: Vec<String>,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn succeeded(&self) -> bool {
        self.status == "ok"
    }

    /// Everything except the wall time, for comparing two runs.
    pub fn content_key(&self) -> String {
        let mut key = format!("{}|{}|{}|{}|{}", self.version, self.command, self.config_digest, self.seed, self.status);
        for o in &self.outputs {
            let _ = write!(key, "|{}={}", o.file, o.sha256);
        }
        key
    }
}
