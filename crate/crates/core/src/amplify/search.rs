use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::table::count_correct;
use super::{evolve_distribution, plan, sample_weights, AccuracyTable, GroverPlan, PlanConfig, WeightDistribution};
use crate::boolcirc::ModelCircuit;
use crate::datasets::Dataset;
use crate::{Error, Result};

/// Mean of `shots` Bernoulli(`accuracy`) draws.
pub fn estimate_accuracy<R: Rng + ?Sized>(accuracy: f64, shots: u64, rng: &mut R) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("at least one shot is needed".into()));
    }
    let hits = Binomial::new(shots, accuracy)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .sample(rng);
    Ok(hits as f64 / shots as f64)
}

/// `J(w)` exactly when `shots` is `None`, otherwise a `shots`-shot estimate.
pub fn evaluate<R: Rng + ?Sized>(
    w: u64,
    model: &ModelCircuit,
    d: &Dataset,
    shots: Option<u64>,
    rng: &mut R,
) -> Result<f64> {
    let exact = f64::from(count_correct(model, d, w)?) / d.len() as f64;
    match shots {
        None => Ok(exact),
        Some(s) => estimate_accuracy(exact, s, rng),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub plan: PlanConfig,
    /// Weight measurements `m`.
    pub budget: usize,
    /// Shots per accuracy estimate; `None` evaluates exactly.
    pub eval_shots: Option<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { plan: PlanConfig::default(), budget: 1, eval_shots: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEntry {
    pub draw: usize,
    pub weight: usize,
    pub estimate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub best: usize,
    pub best_estimate: f64,
    /// `None` for uniform random search.
    pub plan: Option<GroverPlan>,
    pub trace: Vec<TraceEntry>,
}

impl SearchOutcome {
    /// Best weight among the first `m` draws, ties to the smallest index.
    pub fn best_within(&self, m: usize) -> Option<(usize, f64)> {
        self.trace[..m.min(self.trace.len())]
            .iter()
            .map(|e| (e.weight, e.estimate))
            .reduce(|a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a })
    }
}

/// Draws `cfg.budget` weights from `dist` and scores each against `t`.
fn sample_and_score<R: Rng + ?Sized>(
    t: &AccuracyTable,
    dist: &WeightDistribution,
    cfg: &ExperimentConfig,
    plan: Option<GroverPlan>,
    rng: &mut R,
) -> Result<SearchOutcome> {
    if cfg.budget == 0 {
        return Err(Error::InvalidArgument("measurement budget must be at least 1".into()));
    }
    let draws = sample_weights(dist, cfg.budget, rng)?;
    let mut trace = Vec::with_capacity(draws.len());
    for (draw, weight) in draws.into_iter().enumerate() {
        let estimate = match cfg.eval_shots {
            None => t.accuracy(weight),
            Some(s) => estimate_accuracy(t.accuracy(weight), s, rng)?,
        };
        trace.push(TraceEntry { draw, weight, estimate });
    }
    let mut out = SearchOutcome { best: 0, best_estimate: 0.0, plan, trace };
    (out.best, out.best_estimate) = out.best_within(cfg.budget).expect("budget ≥ 1");
    Ok(out)
}

/// The full optimizer on a precomputed table: plan, evolve, measure, evaluate,
/// keep the best.
pub fn optimize_table<R: Rng + ?Sized>(cfg: &ExperimentConfig, t: &AccuracyTable, rng: &mut R) -> Result<SearchOutcome> {
    let p = plan(t, &cfg.plan, rng)?;
    let dist = evolve_distribution(t, &p)?;
    sample_and_score(t, &dist, cfg, Some(p), rng)
}

pub fn optimize<R: Rng + ?Sized>(
    cfg: &ExperimentConfig,
    model: &ModelCircuit,
    train: &Dataset,
    rng: &mut R,
) -> Result<SearchOutcome> {
    optimize_table(cfg, &super::accuracy_table(model, train)?, rng)
}

/// Same loop with weights drawn uniformly, with replacement.
pub fn uniform_random_search_table<R: Rng + ?Sized>(
    cfg: &ExperimentConfig,
    t: &AccuracyTable,
    rng: &mut R,
) -> Result<SearchOutcome> {
    sample_and_score(t, &WeightDistribution::uniform(t.weight_width()), cfg, None, rng)
}

pub fn uniform_random_search<R: Rng + ?Sized>(
    cfg: &ExperimentConfig,
    model: &ModelCircuit,
    train: &Dataset,
    rng: &mut R,
) -> Result<SearchOutcome> {
    uniform_random_search_table(cfg, &super::accuracy_table(model, train)?, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolcirc::toy_model;
    use crate::datasets::gen_toy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn estimates_at_the_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for s in [1, 7, 1000] {
            assert_eq!(estimate_accuracy(1.0, s, &mut rng).unwrap(), 1.0);
            assert_eq!(estimate_accuracy(0.0, s, &mut rng).unwrap(), 0.0);
        }
        assert!((estimate_accuracy(0.3, 1_000_000, &mut rng).unwrap() - 0.3).abs() < 3e-3);
        assert!(estimate_accuracy(0.3, 0, &mut rng).is_err());
    }

    #[test]
    fn evaluate_toy() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(evaluate(0, &toy_model(), &gen_toy(), None, &mut rng).unwrap(), 1.0);
        assert_eq!(evaluate(1, &toy_model(), &gen_toy(), Some(50), &mut rng).unwrap(), 0.0);
        assert!(evaluate(2, &toy_model(), &gen_toy(), None, &mut rng).is_err());
    }

    #[test]
    fn optimize_toy() {
        let cfg = ExperimentConfig::default();
        for seed in 0..10 {
            let out = optimize(&cfg, &toy_model(), &gen_toy(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(out.best, 0);
            assert_eq!(out.trace.len(), 1);
            assert_eq!(out.plan.unwrap().n_aux, 2);
        }
    }

    #[test]
    fn ties_go_to_the_smallest_index() {
        let t = AccuracyTable::from_counts(3, vec![4; 8], 8).unwrap();
        let cfg = ExperimentConfig { budget: 64, ..ExperimentConfig::default() };
        let out = uniform_random_search_table(&cfg, &t, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let smallest = out.trace.iter().map(|e| e.weight).min().unwrap();
        assert_eq!(out.best, smallest);
    }

    #[test]
    fn uniform_search_on_toy() {
        let cfg = ExperimentConfig { budget: 10, ..ExperimentConfig::default() };
        let mut found = 0;
        for seed in 0..200 {
            let out = uniform_random_search(&cfg, &toy_model(), &gen_toy(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            found += usize::from(out.best == 0);
            assert!(out.plan.is_none());
        }
        // failure probability per run is 2^-10
        assert!(found >= 199);
    }

    #[test]
    fn reproducible() {
        let t = AccuracyTable::from_counts(3, vec![1, 5, 2, 8, 3, 8, 0, 4], 8).unwrap();
        let cfg = ExperimentConfig { budget: 20, eval_shots: Some(5), ..ExperimentConfig::default() };
        let a = optimize_table(&cfg, &t, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = optimize_table(&cfg, &t, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert!(optimize_table(&ExperimentConfig { budget: 0, ..cfg }, &t, &mut ChaCha8Rng::seed_from_u64(4)).is_err());
    }
}
