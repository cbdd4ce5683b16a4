//! Experiment runner: each subcommand loads a task, runs one experiment, and
//! writes CSV outputs plus a [`Manifest`] into the output directory.

mod config;
mod error;
mod manifest;
mod tasks;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use quark_core::amplify::{
    accuracy_table, distribution_csv, evolve_distribution, jtable_csv, optimize_table, plan, trace_csv,
    uniform_random_search_table, AccuracyTable, AngleRule, ExperimentConfig, GroverPlan, PlanConfig, SearchOutcome,
    ThetaSource, WeightDistribution,
};
use quark_core::boolcirc::{compile, write_circuit};
use quark_core::fmt::sig12;
use quark_core::statevec::{apply_diffusion, apply_oracle, prepare_initial};
use quark_core::theory::{moment_gap, theory_csv, theory_rows};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{default_mnist_dir, parse_config, read_config, Method, Settings, KEYS};
pub use error::CliError;
pub use manifest::{git_revision, Manifest, MANIFEST_FILE};
pub use tasks::{load_task, Task, TaskData, EDGE_TRAIN_SIZE};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    GenData,
    Jtable,
    Distribution,
    ShotsCurve,
    VerifyOracle,
    Theory,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GenData => "gen-data",
            Command::Jtable => "jtable",
            Command::Distribution => "distribution",
            Command::ShotsCurve => "shots-curve",
            Command::VerifyOracle => "verify-oracle",
            Command::Theory => "theory",
        }
    }
}

/// Collects outputs and results while a command runs.
struct Run<'a> {
    dir: &'a Path,
    outputs: Vec<String>,
    results: Vec<(String, String)>,
}

impl Run<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        assert!(!contents.is_empty(), "output {name} is empty");
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Output { path: path.display().to_string(), source })?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn result(&mut self, key: &str, value: impl ToString) {
        self.results.push((key.to_string(), value.to_string()));
    }

    fn float(&mut self, key: &str, value: f64) {
        self.result(key, sig12(value));
    }
}

/// Runs `command` and writes its outputs and manifest under `settings.out`.
pub fn run(command: Command, settings: &Settings) -> Result<Manifest, CliError> {
    let start = Instant::now();
    fs::create_dir_all(&settings.out).map_err(|source| CliError::Output {
        path: settings.out.display().to_string(),
        source,
    })?;
    let mut r = Run { dir: &settings.out, outputs: Vec::new(), results: Vec::new() };
    match command {
        Command::GenData => gen_data(settings, &mut r)?,
        Command::Jtable => jtable(settings, &mut r)?,
        Command::Distribution => distribution(settings, &mut r)?,
        Command::ShotsCurve => shots_curve(settings, &mut r)?,
        Command::VerifyOracle => verify_oracle(settings, &mut r)?,
        Command::Theory => theory(settings, &mut r)?,
    }
    let manifest = Manifest {
        command: command.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        git: git_revision(),
        seed: settings.seed,
        config: settings.snapshot.clone(),
        outputs: r.outputs,
        results: r.results,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let path = settings.out.join(MANIFEST_FILE);
    fs::write(&path, manifest.render()).map_err(|source| CliError::Output { path: path.display().to_string(), source })?;
    Ok(manifest)
}

fn load(settings: &Settings) -> Result<TaskData, CliError> {
    load_task(settings.task, settings.seed, &settings.mnist_dir)
}

fn plan_config(settings: &Settings, k: u32) -> PlanConfig {
    PlanConfig {
        k,
        branch: settings.branch_m,
        theta: match settings.shots {
            Some(s) if !settings.exact_theta => ThetaSource::Shots(s),
            _ => ThetaSource::Exact,
        },
        rule: if settings.strict_paper_theta { AngleRule::Probability } else { AngleRule::Amplitude },
        pad: settings.pad,
    }
}

fn plan_results(r: &mut Run, p: &GroverPlan) {
    r.result("k", p.k);
    r.result("n_aux", p.n_aux);
    r.float("theta", p.theta);
    r.float("theta_estimate", p.theta_estimate);
    r.result("g", p.g);
    r.float("residual", p.residual);
}

/// Pearson correlation of two equal-length series; 0 when either is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

/// Population mean and standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn gen_data(settings: &Settings, r: &mut Run) -> Result<(), CliError> {
    let data = load(settings)?;
    r.write("train.csv", &data.train.to_csv())?;
    if let Some(test) = &data.test {
        r.write("test.csv", &test.to_csv())?;
        r.result("test_samples", test.len());
    }
    r.write("model.circuit", &write_circuit(&data.model))?;
    r.result("train_samples", data.train.len());
    r.result("weight_bits", data.model.weight_width());
    Ok(())
}

fn table_results(r: &mut Run, prefix: &str, t: &AccuracyTable) {
    r.float(&format!("{prefix}max_accuracy"), t.accuracy(t.argmax()));
    r.result(&format!("{prefix}argmax"), t.argmax());
    r.float(&format!("{prefix}mean_accuracy"), t.mean_accuracy());
}

fn jtable(settings: &Settings, r: &mut Run) -> Result<(), CliError> {
    let data = load(settings)?;
    let train = accuracy_table(&data.model, &data.train)?;
    r.write("jtable.csv", &jtable_csv(&train))?;
    table_results(r, "", &train);
    if let Some(test) = &data.test {
        let test = accuracy_table(&data.model, test)?;
        r.write("jtable_test.csv", &jtable_csv(&test))?;
        table_results(r, "test_", &test);
        r.float("test_accuracy_at_train_argmax", test.accuracy(train.argmax()));
    }
    Ok(())
}

fn distribution(settings: &Settings, r: &mut Run) -> Result<(), CliError> {
    let data = load(settings)?;
    let t = accuracy_table(&data.model, &data.train)?;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let p = plan(&t, &plan_config(settings, settings.k), &mut rng)?;
    let dist = evolve_distribution(&t, &p)?;
    r.write("distribution.csv", &distribution_csv(&t, &dist, &p))?;
    plan_results(r, &p);
    let j_hat = t.normalized();
    let probs = dist.probabilities();
    r.float("pearson", pearson(probs, &j_hat));
    r.float("max_abs_diff", probs.iter().zip(&j_hat).map(|(p, j)| (p - j).abs()).fold(0.0, f64::max));
    let best = t.max_count();
    let mass: f64 = t.counts().iter().zip(probs).filter(|(&c, _)| c == best).map(|(_, &p)| p).sum();
    r.float("mass_on_best", mass);
    Ok(())
}

fn shots_curve(settings: &Settings, r: &mut Run) -> Result<(), CliError> {
    let data = load(settings)?;
    let train = accuracy_table(&data.model, &data.train)?;
    let test = data.test.as_ref().map(|d| accuracy_table(&data.model, d)).transpose()?;
    let budget = *settings.budgets.iter().max().expect("non-empty budgets");
    let k = match settings.method {
        Method::Kpd(k) => k,
        Method::Urs => 1,
    };
    let cfg = ExperimentConfig { plan: plan_config(settings, k), budget, eval_shots: settings.eval_shots };
    let outcomes: Vec<SearchOutcome> = (0..settings.runs)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
            rng.set_stream(rep as u64);
            match settings.method {
                Method::Kpd(_) => optimize_table(&cfg, &train, &mut rng),
                Method::Urs => uniform_random_search_table(&cfg, &train, &mut rng),
            }
        })
        .collect::<Result<_, _>>()?;

    let mut csv = String::from("method,budget,runs,train_mean,train_std,test_mean,test_std\n");
    for &b in &settings.budgets {
        let picks: Vec<usize> = outcomes.iter().map(|o| o.best_within(b).expect("budget ≥ 1").0).collect();
        let tr: Vec<f64> = picks.iter().map(|&w| train.accuracy(w)).collect();
        let (tm, ts) = mean_std(&tr);
        let _ = write!(csv, "{},{b},{},{},{},", settings.method.label(), settings.runs, sig12(tm), sig12(ts));
        match &test {
            Some(test) => {
                let te: Vec<f64> = picks.iter().map(|&w| test.accuracy(w)).collect();
                let (em, es) = mean_std(&te);
                let _ = writeln!(csv, "{},{}", sig12(em), sig12(es));
            }
            None => csv.push_str(",\n"),
        }
    }
    r.write("shots_curve.csv", &csv)?;
    r.write("trace.csv", &trace_csv(&outcomes[0].trace))?;
    if let Some(p) = &outcomes[0].plan {
        plan_results(r, p);
    }
    Ok(())
}

fn verify_oracle(settings: &Settings, r: &mut Run) -> Result<(), CliError> {
    let tasks = if settings.snapshot.contains_key("task") {
        vec![settings.task]
    } else {
        vec![Task::Toy, Task::SimplifiedEdge]
    };
    let mut csv = String::from("instance,qubits,k,n_aux,theta,g,residual,max_deviation\n");
    for task in tasks {
        let data = load_task(task, settings.seed, &settings.mnist_dir)?;
        let t = accuracy_table(&data.model, &data.train)?;
        let mut cfg = plan_config(settings, settings.k);
        cfg.theta = ThetaSource::Exact;
        let p = plan(&t, &cfg, &mut ChaCha8Rng::seed_from_u64(settings.seed))?;
        let closed = evolve_distribution(&t, &p)?;
        let list = compile(&data.model)?;
        let (psi0, layout) = prepare_initial(&list, &data.train, p.k, p.n_aux, settings.cap)?;
        let mut state = psi0.clone();
        for _ in 0..p.g {
            apply_oracle(&mut state, &layout, data.train.correctness());
            apply_diffusion(&mut state, &psi0)?;
        }
        let simulated = WeightDistribution::from_masses(state.marginal("w")?)?;
        let deviation = simulated.max_deviation(&closed);
        let _ = writeln!(
            csv,
            "{task},{},{},{},{},{},{},{}",
            layout.n_qubits(),
            p.k,
            p.n_aux,
            sig12(p.theta),
            p.g,
            sig12(p.residual),
            sig12(deviation)
        );
        println!(
            "{task}: {} qubits, k={}, n_aux={}, theta={:.6}, g={}, residual={:.6}, max deviation {:.3e}",
            layout.n_qubits(),
            p.k,
            p.n_aux,
            p.theta,
            p.g,
            p.residual,
            deviation
        );
        r.result(&format!("{task}.qubits"), layout.n_qubits());
        r.float(&format!("{task}.max_deviation"), deviation);
        if settings.dump_state {
            r.write(&format!("state_{task}.csv"), &state.to_csv())?;
        }
    }
    r.write("verify_oracle.csv", &csv)?;
    Ok(())
}

fn theory(settings: &Settings, r: &mut Run) -> Result<(), CliError> {
    let data = load(settings)?;
    let t = accuracy_table(&data.model, &data.train)?;
    let rows = theory_rows(&t, data.train.classes(), &settings.epsilons, &settings.ks, settings.k_max)?;
    if rows.is_empty() {
        return Err(CliError::Config("no epsilon gives a usable alpha and beta".into()));
    }
    r.write("theory.csv", &theory_csv(&rows))?;
    let mut gaps = String::from("k,mean_jk,mean_j_pow_k\n");
    for &k in &settings.ks {
        let (kth, pow) = moment_gap(&t, k);
        let _ = writeln!(gaps, "{k},{},{}", sig12(kth), sig12(pow));
    }
    r.write("moments.csv", &gaps)?;
    Ok(())
}
