use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quark_cli::{read_config, run, CliError, Command, Settings};

/// Amplitude-amplification training experiments on small binary networks.
#[derive(Parser)]
#[command(name = "quark", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Write the task's train/test samples and model circuit.
    GenData,
    /// Exact accuracy of every weight on the train (and test) set.
    Jtable,
    /// Weight distribution after amplification.
    Distribution,
    /// Best-of-m accuracy against measurement budget, over repeated runs.
    ShotsCurve,
    /// Compare the gate-level simulation with the closed-form distribution.
    VerifyOracle,
    /// Query-complexity bounds and the optimal number of copies.
    Theory,
}

#[derive(Args)]
struct Opts {
    /// key=value file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// toy, edge, simplified-edge or tiny-mnist.
    #[arg(long, global = true)]
    task: Option<String>,
    /// Parallel dataset copies.
    #[arg(long, global = true)]
    k: Option<String>,
    /// kpd, kpd:K or urs.
    #[arg(long, global = true)]
    method: Option<String>,
    /// Shots for estimating the amplification angle.
    #[arg(long, global = true)]
    shots: Option<String>,
    /// Shots per accuracy estimate; exact when omitted.
    #[arg(long, global = true)]
    eval_shots: Option<String>,
    /// Comma-separated measurement budgets.
    #[arg(long, global = true)]
    budget: Option<String>,
    #[arg(long, global = true)]
    runs: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Branch index of the iteration count.
    #[arg(long, global = true)]
    branch_m: Option<String>,
    /// auto or a fixed number of auxiliary samples.
    #[arg(long, global = true)]
    pad: Option<String>,
    /// Use the exact angle even when --shots is given.
    #[arg(long, global = true)]
    exact_theta: bool,
    /// Take the angle as arcsin of the fraction rather than of its square root.
    #[arg(long, global = true)]
    strict_paper_theta: bool,
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true)]
    mnist_dir: Option<String>,
    /// Comma-separated slack values for the theory table.
    #[arg(long, global = true)]
    epsilons: Option<String>,
    /// Comma-separated copy counts for the theory table.
    #[arg(long, global = true)]
    ks: Option<String>,
    #[arg(long, global = true)]
    k_max: Option<String>,
    /// Largest simulated qubit count.
    #[arg(long, global = true)]
    cap: Option<String>,
    /// Also write the final statevector.
    #[arg(long, global = true)]
    dump_state: bool,
}

impl Opts {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let values = [
            ("task", &self.task),
            ("k", &self.k),
            ("method", &self.method),
            ("shots", &self.shots),
            ("eval-shots", &self.eval_shots),
            ("budget", &self.budget),
            ("runs", &self.runs),
            ("seed", &self.seed),
            ("branch-m", &self.branch_m),
            ("pad", &self.pad),
            ("out", &self.out),
            ("mnist-dir", &self.mnist_dir),
            ("epsilons", &self.epsilons),
            ("ks", &self.ks),
            ("k-max", &self.k_max),
            ("cap", &self.cap),
        ];
        for (key, value) in values {
            if let Some(value) = value {
                v.push((key, value.clone()));
            }
        }
        for (key, set) in
            [("exact-theta", self.exact_theta), ("strict-paper-theta", self.strict_paper_theta), ("dump-state", self.dump_state)]
        {
            if set {
                v.push((key, "true".to_string()));
            }
        }
        v
    }
}

fn settings(opts: &Opts) -> Result<Settings, CliError> {
    let mut map = match &opts.config {
        Some(path) => read_config(path)?,
        None => BTreeMap::new(),
    };
    for (key, value) in opts.overrides() {
        map.insert(key.to_string(), value);
    }
    Settings::from_map(map)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::GenData => Command::GenData,
        Cmd::Jtable => Command::Jtable,
        Cmd::Distribution => Command::Distribution,
        Cmd::ShotsCurve => Command::ShotsCurve,
        Cmd::VerifyOracle => Command::VerifyOracle,
        Cmd::Theory => Command::Theory,
    };
    let result = settings(&cli.opts).and_then(|s| run(command, &s));
    match result {
        Ok(m) => {
            println!("{}: wrote {} to {}", m.command, m.outputs.join(", "), m.config.get("out").map_or("out", String::as_str));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
