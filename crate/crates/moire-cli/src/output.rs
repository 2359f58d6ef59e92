//! Deterministic file output with a metadata header on every artifact.

use crate::config::Resolved;
use crate::error::{CliError, CliResult};
use moire::C64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

pub const ARTIFACT: &str = "moire";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Complex number as `{ "re": …, "im": … }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

/// Shortest round-trip text for a CSV cell; scientific outside `[1e-4, 1e6)`.
pub fn fmt_f64(x: f64) -> String {
    let x = x + 0.0;
    if x == 0.0 || (1e-4..1e6).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub cutoff: usize,
    pub config: Resolved,
}

impl Metadata {
    pub fn new(config: &Resolved) -> Self {
        let canonical = serde_json::to_string(config).expect("config serializes");
        let config_hash = hex::encode(Sha256::digest(canonical.as_bytes()));
        Metadata {
            artifact: ARTIFACT,
            version: VERSION,
            command: config.command.clone(),
            config_hash,
            cutoff: config.cutoff,
            config: config.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Assertion,
    Convergence,
}

/// One named pass/fail verdict recorded by a command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn assertion(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), kind: CheckKind::Assertion, passed, detail: detail.into() }
    }

    pub fn convergence(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), kind: CheckKind::Convergence, passed, detail: detail.into() }
    }
}

/// Result of a command: its report, verdicts and the files it wrote.
#[derive(Debug, Clone)]
pub struct Outcome<R> {
    pub report: R,
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
}

impl<R> Outcome<R> {
    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Convergence failures take precedence over assertion failures.
    pub fn status(&self) -> CliResult<()> {
        let describe = |kind: CheckKind| -> Option<String> {
            let v: Vec<String> =
                self.failed().filter(|c| c.kind == kind).map(|c| format!("{} ({})", c.name, c.detail)).collect();
            (!v.is_empty()).then(|| v.join("; "))
        };
        if let Some(msg) = describe(CheckKind::Convergence) {
            return Err(CliError::Convergence(msg));
        }
        if let Some(msg) = describe(CheckKind::Assertion) {
            return Err(CliError::Assertion(msg));
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    metadata: &'a Metadata,
    result: &'a T,
    checks: &'a [Check],
}

pub struct OutputWriter {
    dir: PathBuf,
    metadata: Metadata,
    written: Vec<PathBuf>,
}

impl OutputWriter {
    pub fn new(dir: &Path, config: &Resolved) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
        Ok(OutputWriter { dir: dir.to_path_buf(), metadata: Metadata::new(config), written: Vec::new() })
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    fn put(&mut self, name: &str, contents: String) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, result: &T, checks: &[Check]) -> CliResult<PathBuf> {
        let doc = Document { metadata: &self.metadata, result, checks };
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        self.put(name, text)
    }

    /// CSV with `# key: value` header lines ahead of the column row.
    pub fn write_csv(&mut self, name: &str, columns: &[String], rows: &[Vec<String>]) -> CliResult<PathBuf> {
        let m = &self.metadata;
        let mut text = String::new();
        text.push_str(&format!("# artifact: {}\n# version: {}\n", m.artifact, m.version));
        text.push_str(&format!("# command: {}\n# config_hash: {}\n", m.command, m.config_hash));
        text.push_str(&format!("# cutoff: {}\n", m.cutoff));
        text.push_str(&format!("# config: {}\n", serde_json::to_string(&m.config).expect("config serializes")));
        text.push_str(&columns.join(","));
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.put(name, text)
    }

    pub fn finish<R>(self, report: R, checks: Vec<Check>) -> Outcome<R> {
        Outcome { report, checks, files: self.written }
    }
}
