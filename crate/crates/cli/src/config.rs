//! Run settings from a flat `key=value` file overlaid with command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use quark_core::amplify::PadPolicy;

use crate::error::CliError;
use crate::tasks::Task;

/// Every recognised key. Flags use the same names with a `--` prefix.
pub const KEYS: &[&str] = &[
    "task",
    "k",
    "method",
    "shots",
    "eval-shots",
    "budget",
    "runs",
    "seed",
    "branch-m",
    "pad",
    "exact-theta",
    "strict-paper-theta",
    "out",
    "mnist-dir",
    "epsilons",
    "ks",
    "k-max",
    "cap",
    "dump-state",
];

/// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value", n + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("config line {}: unknown key `{key}`", n + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Amplified sampling with `k` parallel datasets.
    Kpd(u32),
    Urs,
}

impl Method {
    pub fn label(self) -> String {
        match self {
            Method::Kpd(k) => format!("kpd:{k}"),
            Method::Urs => "urs".to_string(),
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub task: Task,
    pub k: u32,
    pub method: Method,
    pub shots: Option<u64>,
    pub eval_shots: Option<u64>,
    pub budgets: Vec<usize>,
    pub runs: usize,
    pub seed: u64,
    pub branch_m: u32,
    pub pad: PadPolicy,
    pub exact_theta: bool,
    pub strict_paper_theta: bool,
    pub out: PathBuf,
    pub mnist_dir: PathBuf,
    pub epsilons: Vec<f64>,
    pub ks: Vec<u32>,
    pub k_max: u32,
    pub cap: usize,
    pub dump_state: bool,
    /// The merged key=value map the settings came from.
    pub snapshot: BTreeMap<String, String>,
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad value `{v}` for {key}")))
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(key, s)).collect()
}

fn flag(key: &str, v: &str) -> Result<bool, CliError> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Config(format!("bad boolean `{v}` for {key}"))),
    }
}

/// Where MNIST lives when neither a flag nor a config key says.
pub fn default_mnist_dir() -> PathBuf {
    std::env::var_os("MNIST_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data/mnist"))
}

impl Settings {
    pub fn from_map(map: BTreeMap<String, String>) -> Result<Self, CliError> {
        for key in map.keys() {
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("unknown setting `{key}`")));
            }
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let task = match get("task") {
            Some(t) => t.parse()?,
            None => Task::Edge,
        };
        let mut k = get("k").map(|v| parse("k", v)).transpose()?.unwrap_or(1u32);
        let method = match get("method").unwrap_or("kpd") {
            "urs" => Method::Urs,
            "kpd" => Method::Kpd(k),
            m => match m.strip_prefix("kpd:") {
                Some(n) => {
                    k = parse("method", n)?;
                    Method::Kpd(k)
                }
                None => return Err(CliError::Config(format!("unknown method `{m}` (kpd, kpd:K, urs)"))),
            },
        };
        if k == 0 {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        let pad = match get("pad").unwrap_or("auto") {
            "auto" => PadPolicy::Auto,
            n => PadPolicy::Fixed(parse("pad", n)?),
        };
        let positive = |key: &str, v: Option<u64>| -> Result<Option<u64>, CliError> {
            if v == Some(0) {
                Err(CliError::Config(format!("{key} must be at least 1")))
            } else {
                Ok(v)
            }
        };
        let settings = Settings {
            task,
            k,
            method,
            shots: positive("shots", get("shots").map(|v| parse("shots", v)).transpose()?)?,
            eval_shots: positive("eval-shots", get("eval-shots").map(|v| parse("eval-shots", v)).transpose()?)?,
            budgets: list("budget", get("budget").unwrap_or("1,2,4,8,16,32,64,128"))?,
            runs: parse("runs", get("runs").unwrap_or("20"))?,
            seed: parse("seed", get("seed").unwrap_or("0"))?,
            branch_m: parse("branch-m", get("branch-m").unwrap_or("0"))?,
            pad,
            exact_theta: flag("exact-theta", get("exact-theta").unwrap_or("false"))?,
            strict_paper_theta: flag("strict-paper-theta", get("strict-paper-theta").unwrap_or("false"))?,
            out: PathBuf::from(get("out").unwrap_or("out")),
            mnist_dir: get("mnist-dir").map(PathBuf::from).unwrap_or_else(default_mnist_dir),
            epsilons: list("epsilons", get("epsilons").unwrap_or("0,0.01,0.02,0.05,0.1"))?,
            ks: list("ks", get("ks").unwrap_or("1,2,3,4,5,6"))?,
            k_max: parse("k-max", get("k-max").unwrap_or("64"))?,
            cap: parse("cap", get("cap").unwrap_or("26"))?,
            dump_state: flag("dump-state", get("dump-state").unwrap_or("false"))?,
            snapshot: map,
        };
        if settings.budgets.is_empty() || settings.budgets.contains(&0) {
            return Err(CliError::Config("budgets must be a non-empty list of positive counts".into()));
        }
        if settings.runs == 0 {
            return Err(CliError::Config("runs must be at least 1".into()));
        }
        if settings.ks.contains(&0) || settings.k_max == 0 {
            return Err(CliError::Config("k values must be at least 1".into()));
        }
        Ok(settings)
    }
}
