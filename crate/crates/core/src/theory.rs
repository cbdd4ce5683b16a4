//! Query-complexity expressions for amplification with `k` parallel datasets.
//!
//! ε-optimality is absolute slack: a weight is ε-optimal when
//! `J(w) ≥ max J − ε`. Integrals over weight space are uniform sums over the
//! `2^{d_w}` grid.
//!
//! - `α`: share of `Σ J` carried by the ε-optimal weights.
//! - `β`: number of ε-optimal weights over the number of the rest.

use std::fmt::Write as _;

use crate::amplify::AccuracyTable;
use crate::fmt::sig12;
use crate::{Error, Result};

/// Slack on floating comparisons of accuracies and logarithms.
const SNAP: f64 = 1e-9;

pub fn epsilon_optimal_set(t: &AccuracyTable, epsilon: f64) -> Vec<usize> {
    let best = f64::from(t.max_count()) / t.samples() as f64;
    (0..t.len())
        .filter(|&w| t.accuracy(w) >= best - epsilon - SNAP / t.samples() as f64)
        .collect()
}

/// `(α, β)`. `β` is infinite when every weight is ε-optimal.
pub fn alpha_beta(t: &AccuracyTable, epsilon: f64) -> Result<(f64, f64)> {
    let set = epsilon_optimal_set(t, epsilon);
    let total: u64 = t.counts().iter().map(|&c| u64::from(c)).sum();
    if total == 0 {
        return Err(Error::InvalidArgument("every weight has accuracy 0".into()));
    }
    if set.is_empty() {
        return Err(Error::InvalidArgument("no ε-optimal weight".into()));
    }
    let inside: u64 = set.iter().map(|&w| u64::from(t.count(w))).sum();
    let rest = t.len() - set.len();
    let beta = if rest == 0 { f64::INFINITY } else { set.len() as f64 / rest as f64 };
    Ok((inside as f64 / total as f64, beta))
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} outside (0, 1]")))
    }
}

fn check_classes(c: f64) -> Result<()> {
    if c >= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("class count {c} below 2")))
    }
}

/// `√C / α`.
pub fn queries_1pd(alpha: f64, classes: f64) -> Result<f64> {
    check_unit("α", alpha)?;
    check_classes(classes)?;
    Ok(classes.sqrt() / alpha)
}

/// `(1 + β^{k−1} (1/α − 1)^k) · k · C^{k/2}`.
pub fn queries_kpd(alpha: f64, beta: f64, classes: f64, k: u32) -> Result<f64> {
    check_unit("α", alpha)?;
    check_unit("β", beta)?;
    check_classes(classes)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let k_f = f64::from(k);
    Ok((1.0 + beta.powi(k as i32 - 1) * (1.0 / alpha - 1.0).powi(k as i32)) * k_f * classes.powf(k_f / 2.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalK {
    pub k: u32,
    /// `m = ⌊log_{α/β}(1/α)⌋ + 1`; 1 when `α ≤ β`.
    pub m: u32,
    /// Whether `α/β ≥ m^{1/(m−1)} √C`. Undefined, and reported false, for `m = 1`.
    pub condition: bool,
    /// `α ≤ β`: the logarithm base is at most 1 and `k = 1` is returned.
    pub degenerate_base: bool,
}

/// `k* = m` when `α/β ≥ m^{1/(m−1)} √C`, otherwise 1.
pub fn optimal_k(alpha: f64, beta: f64, classes: f64) -> Result<OptimalK> {
    check_unit("α", alpha)?;
    check_unit("β", beta)?;
    check_classes(classes)?;
    let ratio = alpha / beta;
    if ratio <= 1.0 {
        return Ok(OptimalK { k: 1, m: 1, condition: false, degenerate_base: true });
    }
    let log = (1.0 / alpha).ln() / ratio.ln();
    let snapped = if (log - log.round()).abs() < SNAP { log.round() } else { log };
    let m = snapped.floor() as u32 + 1;
    let condition = m >= 2 && ratio >= f64::from(m).powf(1.0 / f64::from(m - 1)) * classes.sqrt() * (1.0 - SNAP);
    Ok(OptimalK { k: if condition { m } else { 1 }, m, condition, degenerate_base: false })
}

/// `argmin_{1 ≤ k ≤ k_max} queries_kpd`, ties to the smallest `k`.
pub fn brute_force_optimal_k(alpha: f64, beta: f64, classes: f64, k_max: u32) -> Result<u32> {
    let mut best = (1, queries_kpd(alpha, beta, classes, 1)?);
    for k in 2..=k_max {
        let v = queries_kpd(alpha, beta, classes, k)?;
        if v < best.1 {
            best = (k, v);
        }
    }
    Ok(best.0)
}

/// `(E[J^k], E[J]^k)` over uniform weights.
pub fn moment_gap(t: &AccuracyTable, k: u32) -> (f64, f64) {
    let n = t.len() as f64;
    let kth = (0..t.len()).map(|w| t.accuracy(w).powi(k as i32)).sum::<f64>() / n;
    (kth, t.mean_accuracy().powi(k as i32))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryRow {
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub classes: f64,
    pub k: u32,
    /// `queries_kpd` at this `k`.
    pub bound: f64,
    pub k_star: u32,
    pub condition: bool,
    pub brute_force_k: u32,
    /// `queries_1pd`, equal to `bound` at `k = 1`.
    pub one_pd: f64,
}

/// One row per `(ε, k)` pair from a task's exact table. Pairs where α or β leaves
/// (0, 1] are skipped.
pub fn theory_rows(t: &AccuracyTable, classes: usize, epsilons: &[f64], ks: &[u32], k_max: u32) -> Result<Vec<TheoryRow>> {
    let c = classes as f64;
    let mut rows = Vec::new();
    for &epsilon in epsilons {
        let (alpha, beta) = alpha_beta(t, epsilon)?;
        if !(beta > 0.0 && beta <= 1.0) {
            continue;
        }
        let opt = optimal_k(alpha, beta, c)?;
        let brute_force_k = brute_force_optimal_k(alpha, beta, c, k_max)?;
        let one_pd = queries_1pd(alpha, c)?;
        for &k in ks {
            rows.push(TheoryRow {
                epsilon,
                alpha,
                beta,
                classes: c,
                k,
                bound: queries_kpd(alpha, beta, c, k)?,
                k_star: opt.k,
                condition: opt.condition,
                brute_force_k,
                one_pd,
            });
        }
    }
    Ok(rows)
}

/// `epsilon,alpha,beta,C,k,bound_value,k_star,condition_holds,brute_force_k,queries_1pd`.
pub fn theory_csv(rows: &[TheoryRow]) -> String {
    let mut s = String::from("epsilon,alpha,beta,C,k,bound_value,k_star,condition_holds,brute_force_k,queries_1pd\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            sig12(r.epsilon),
            sig12(r.alpha),
            sig12(r.beta),
            sig12(r.classes),
            r.k,
            sig12(r.bound),
            r.k_star,
            u8::from(r.condition),
            r.brute_force_k,
            sig12(r.one_pd)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy() -> AccuracyTable {
        AccuracyTable::from_counts(1, vec![2, 0], 2).unwrap()
    }

    #[test]
    fn epsilon_sets() {
        let t = AccuracyTable::from_counts(2, vec![3, 4, 2, 4], 4).unwrap();
        assert_eq!(epsilon_optimal_set(&t, 0.0), vec![1, 3]);
        assert_eq!(epsilon_optimal_set(&t, 0.25), vec![0, 1, 3]);
        assert_eq!(epsilon_optimal_set(&t, 1.0), vec![0, 1, 2, 3]);
        assert_eq!(epsilon_optimal_set(&toy(), 0.5), vec![0]);
    }

    #[test]
    fn alpha_beta_values() {
        assert_eq!(alpha_beta(&toy(), 0.5).unwrap(), (1.0, 1.0));
        let flat = AccuracyTable::from_counts(2, vec![3; 4], 4).unwrap();
        let (a, b) = alpha_beta(&flat, 0.0).unwrap();
        assert_eq!(a, 1.0);
        assert!(b.is_infinite());
        let t = AccuracyTable::from_counts(2, vec![3, 4, 2, 4], 4).unwrap();
        assert_eq!(alpha_beta(&t, 0.0).unwrap(), (8.0 / 13.0, 1.0));
        assert_eq!(alpha_beta(&t, 0.25).unwrap(), (11.0 / 13.0, 3.0));
        assert!(alpha_beta(&AccuracyTable::from_counts(1, vec![0, 0], 2).unwrap(), 0.0).is_err());
    }

    #[test]
    fn query_values() {
        assert_eq!(queries_1pd(1.0, 4.0).unwrap(), 2.0);
        assert!((queries_1pd(0.1, 4.0).unwrap() - 20.0).abs() < 1e-12);
        assert!((queries_kpd(0.1, 0.01, 4.0, 2).unwrap() - 14.48).abs() < 1e-12);
        assert!(queries_1pd(0.0, 4.0).is_err());
        assert!(queries_kpd(0.5, 1.5, 4.0, 2).is_err());
        assert!(queries_kpd(0.5, 0.5, 1.0, 2).is_err());
        assert!(queries_kpd(0.5, 0.5, 4.0, 0).is_err());
    }

    #[test]
    fn optimal_k_examples() {
        let o = optimal_k(0.1, 0.01, 4.0).unwrap();
        assert_eq!((o.k, o.m, o.condition), (2, 2, true));
        assert_eq!(brute_force_optimal_k(0.1, 0.01, 4.0, 10).unwrap(), 2);
        let o = optimal_k(0.5, 0.4, 100.0).unwrap();
        assert_eq!(o.k, 1);
        assert!(!o.condition);
        let o = optimal_k(0.3, 0.6, 4.0).unwrap();
        assert!(o.degenerate_base);
        assert_eq!(o.k, 1);
        assert_eq!(brute_force_optimal_k(0.1, 0.01, 4.0, 1).unwrap(), 1);
    }

    #[test]
    fn rows_and_csv() {
        let t = AccuracyTable::from_counts(2, vec![3, 4, 2, 1], 4).unwrap();
        let rows = theory_rows(&t, 2, &[0.0, 0.25], &[1, 2], 8).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].bound, rows[0].one_pd);
        let csv = theory_csv(&rows);
        assert!(csv.starts_with("epsilon,alpha,beta,C,k,bound_value,k_star,"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn moments() {
        let t = AccuracyTable::from_counts(1, vec![2, 0], 2).unwrap();
        assert_eq!(moment_gap(&t, 2), (0.5, 0.25));
        assert_eq!(moment_gap(&t, 1), (0.5, 0.5));
    }

    proptest! {
        #[test]
        fn one_copy_identity(alpha in 1e-4f64..=1.0, beta in 1e-4f64..=1.0, c in 2u32..200) {
            let c = f64::from(c);
            let kpd = queries_kpd(alpha, beta, c, 1).unwrap();
            let one = queries_1pd(alpha, c).unwrap();
            prop_assert!((kpd - one).abs() <= 1e-12 * one);
        }

        #[test]
        fn monotone_in_classes(alpha in 1e-3f64..=1.0, beta in 1e-3f64..=1.0, c in 2u32..100, k in 1u32..6) {
            let c = f64::from(c);
            prop_assert!(queries_kpd(alpha, beta, c + 1.0, k).unwrap() > queries_kpd(alpha, beta, c, k).unwrap());
        }
    }
}
