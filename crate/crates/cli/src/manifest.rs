//! The run manifest: what ran, with which settings, and which files it produced.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub git: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    /// File names relative to the output directory, in write order.
    pub outputs: Vec<String>,
    /// Scalar summaries, in insertion order.
    pub results: Vec<(String, String)>,
    pub wall_time_s: f64,
}

impl Manifest {
    pub fn result(&self, key: &str) -> Option<&str> {
        self.results.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// A result parsed as `f64`; panics with the key name when absent.
    pub fn number(&self, key: &str) -> f64 {
        self.result(key)
            .and_then(|v| v.parse().ok())
            .unwrap_or_else(|| panic!("manifest has no numeric result `{key}`"))
    }

    /// `key=value` lines; `wall_time_s` is the only field that differs between reruns.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command={}", self.command);
        let _ = writeln!(s, "version={}", self.version);
        let _ = writeln!(s, "git={}", self.git);
        let _ = writeln!(s, "seed={}", self.seed);
        for (k, v) in &self.config {
            let _ = writeln!(s, "config.{k}={v}");
        }
        for o in &self.outputs {
            let _ = writeln!(s, "output={o}");
        }
        for (k, v) in &self.results {
            let _ = writeln!(s, "result.{k}={v}");
        }
        let _ = writeln!(s, "wall_time_s={:.3}", self.wall_time_s);
        s
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = |line: &str| CliError::Config(format!("malformed manifest line `{line}`"));
        let mut m = Manifest {
            command: String::new(),
            version: String::new(),
            git: String::new(),
            seed: 0,
            config: BTreeMap::new(),
            outputs: Vec::new(),
            results: Vec::new(),
            wall_time_s: 0.0,
        };
        for line in text.lines().filter(|l| !l.is_empty()) {
            let (k, v) = line.split_once('=').ok_or_else(|| bad(line))?;
            match k {
                "command" => m.command = v.to_string(),
                "version" => m.version = v.to_string(),
                "git" => m.git = v.to_string(),
                "seed" => m.seed = v.parse().map_err(|_| bad(line))?,
                "output" => m.outputs.push(v.to_string()),
                "wall_time_s" => m.wall_time_s = v.parse().map_err(|_| bad(line))?,
                _ => {
                    if let Some(key) = k.strip_prefix("config.") {
                        m.config.insert(key.to_string(), v.to_string());
                    } else if let Some(key) = k.strip_prefix("result.") {
                        m.results.push((key.to_string(), v.to_string()));
                    } else {
                        return Err(bad(line));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn read(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Short commit hash of the source tree, or `unknown` outside a checkout.
pub fn git_revision() -> String {
    std::process::Command::new("git")
        .args(["-C", env!("CARGO_MANIFEST_DIR"), "rev-parse", "--short", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".to_string())
}
