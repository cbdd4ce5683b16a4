//! Amplitude amplification over the weight register.
//!
//! The pipeline is: count correct samples per weight ([`accuracy_table`]), turn the
//! solution fraction into a Grover angle and an iteration count ([`plan`]), push the
//! closed-form weight marginal through those iterations ([`evolve_distribution`]),
//! then measure and score weights ([`optimize`]).
//!
//! With `k` parallel copies of the dataset a weight that is right on `c` samples
//! owns `c^k` solution states, so amplification favours it in proportion to `J^k`.
//! All state counts are exact big integers; only angles and probabilities are
//! floats.

mod evolve;
mod plan;
mod search;
mod table;

use std::fmt::Write as _;

use crate::fmt::sig12;

pub use evolve::{evolve_distribution, sample_weights, WeightDistribution};
pub use plan::{
    grover_iterations, pad_auxiliary, plan, residual, solution_stats, theta_exact, theta_shots, AngleRule,
    GroverPlan, PadPolicy, PlanConfig, SolutionStats, ThetaSource, AUTO_PAD_RESIDUAL, AUTO_PAD_TARGET,
};
pub use search::{
    estimate_accuracy, evaluate, optimize, optimize_table, uniform_random_search, uniform_random_search_table,
    ExperimentConfig, SearchOutcome, TraceEntry,
};
pub use table::{accuracy_table, count_correct, AccuracyTable, MAX_WEIGHT_BITS};

/// `weight_index,correct_count,accuracy`.
pub fn jtable_csv(t: &AccuracyTable) -> String {
    let mut s = String::from("weight_index,correct_count,accuracy\n");
    for (w, &c) in t.counts().iter().enumerate() {
        let _ = writeln!(s, "{w},{c},{}", sig12(t.accuracy(w)));
    }
    s
}

/// `weight_index,probability,k,g,residual,normalized_accuracy`; the last column is
/// Ĵ for overlaying on the distribution.
pub fn distribution_csv(t: &AccuracyTable, d: &WeightDistribution, p: &GroverPlan) -> String {
    let mut s = String::from("weight_index,probability,k,g,residual,normalized_accuracy\n");
    let (residual, j_hat) = (sig12(p.residual), t.normalized());
    for (w, &prob) in d.probabilities().iter().enumerate() {
        let _ = writeln!(s, "{w},{},{},{},{residual},{}", sig12(prob), p.k, p.g, sig12(j_hat[w]));
    }
    s
}

/// `draw_index,weight_index,estimate`.
pub fn trace_csv(trace: &[TraceEntry]) -> String {
    let mut s = String::from("draw_index,weight_index,estimate\n");
    for e in trace {
        let _ = writeln!(s, "{},{},{}", e.draw, e.weight, sig12(e.estimate));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn csv_layouts() {
        let t = AccuracyTable::from_counts(1, vec![2, 0], 2).unwrap();
        assert_eq!(jtable_csv(&t), "weight_index,correct_count,accuracy\n0,2,1\n1,0,0\n");
        let p = plan(&t, &PlanConfig::default(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let d = evolve_distribution(&t, &p).unwrap();
        let csv = distribution_csv(&t, &d, &p);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "weight_index,probability,k,g,residual,normalized_accuracy");
        assert_eq!(lines[1], "0,1,1,1,1,1");
        assert!(lines[2].starts_with("1,"));
        let trace = [TraceEntry { draw: 0, weight: 3, estimate: 0.25 }];
        assert_eq!(trace_csv(&trace), "draw_index,weight_index,estimate\n0,3,0.25\n");
    }
}
