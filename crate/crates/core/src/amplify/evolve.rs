use rand::Rng;
use rand_distr::{Distribution, weighted::WeightedIndex};

use super::plan::{ratio, solution_stats, theta_exact};
use super::{AccuracyTable, GroverPlan};
use crate::{Error, Result};

/// Agreement required between a plan's θ and the table's.
const PLAN_THETA_TOLERANCE: f64 = 1e-9;

/// Measurement distribution of the weight register.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightDistribution {
    p: Vec<f64>,
}

impl WeightDistribution {
    /// Rescales nonnegative masses to sum to 1.
    pub fn from_masses(mut p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("probabilities must be finite and nonnegative".into()));
        }
        let total: f64 = p.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument("distribution has no mass".into()));
        }
        p.iter_mut().for_each(|v| *v /= total);
        Ok(WeightDistribution { p })
    }

    pub fn uniform(weight_width: usize) -> Self {
        let n = 1usize << weight_width;
        WeightDistribution { p: vec![1.0 / n as f64; n] }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Largest entrywise difference from `other`.
    pub fn max_deviation(&self, other: &WeightDistribution) -> f64 {
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(if self.len() == other.len() { 0.0 } else { f64::INFINITY }, f64::max)
    }
}

/// Closed-form marginal of the weight register after `plan.g` Grover iterations.
///
/// A weight with `s_i = c_i^k` solution states out of `M = (N + n_aux)^k` gets
/// `p_i = r·s_i/|S| + (1 − r)·(M − s_i)/(N_tot − |S|)` with `r` the plan's
/// residual. Cost is linear in the number of weights and independent of `N` beyond
/// the `N + 1` distinct counts.
pub fn evolve_distribution(t: &AccuracyTable, plan: &GroverPlan) -> Result<WeightDistribution> {
    let stats = solution_stats(t, plan.k, plan.n_aux)?;
    let theta = theta_exact(&stats.solutions, &stats.total)?;
    if (theta - plan.theta).abs() > PLAN_THETA_TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "plan angle {} does not match the table's {theta}",
            plan.theta
        )));
    }
    let r = plan.residual;
    let non_solutions = &stats.total - &stats.solutions;
    let by_count: Vec<f64> = stats
        .power_by_count
        .iter()
        .map(|s| r * ratio(s, &stats.solutions) + (1.0 - r) * ratio(&(&stats.per_weight - s), &non_solutions))
        .collect();
    WeightDistribution::from_masses(t.counts().iter().map(|&c| by_count[c as usize]).collect())
}

/// `m` independent draws from `dist`.
pub fn sample_weights<R: Rng + ?Sized>(dist: &WeightDistribution, m: usize, rng: &mut R) -> Result<Vec<usize>> {
    let index = WeightedIndex::new(&dist.p).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok((0..m).map(|_| index.sample(rng)).collect())
}
