use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::AccuracyTable;
use crate::{Error, Result};

/// Slack when comparing an angle with a padding target.
const ANGLE_SLACK: f64 = 1e-12;

/// Auto-padding kicks in when the predicted residual falls below this.
pub const AUTO_PAD_RESIDUAL: f64 = 0.9;

/// Angle that auto-padding brings θ under.
pub const AUTO_PAD_TARGET: f64 = FRAC_PI_6;

/// Exact solution-state counts for `k` parallel datasets with `n_aux` padding
/// samples per copy.
///
/// A weight with count `c` owns `c^k` solution states among `(N + n_aux)^k` data
/// states; padding samples are never solutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionStats {
    pub k: u32,
    pub n_aux: usize,
    /// `c^k` for `c` in `0..=N`.
    pub power_by_count: Vec<BigUint>,
    /// `(N + n_aux)^k`, the data states per weight.
    pub per_weight: BigUint,
    /// `|S| = Σ_i c_i^k`.
    pub solutions: BigUint,
    /// `N_tot = 2^{d_w} (N + n_aux)^k`.
    pub total: BigUint,
}

impl SolutionStats {
    /// `s_i = c_i^k`.
    pub fn solutions_of(&self, t: &AccuracyTable, w: usize) -> &BigUint {
        &self.power_by_count[t.count(w) as usize]
    }

    /// `|S| / N_tot` as a float.
    pub fn fraction(&self) -> f64 {
        ratio(&self.solutions, &self.total)
    }
}

/// `a / b` with full f64 precision for integers beyond 2^53.
pub(crate) fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = b.bits().saturating_sub(64);
    let (a, b) = (a >> shift, b >> shift);
    a.to_f64().unwrap_or(f64::INFINITY) / b.to_f64().unwrap_or(f64::INFINITY)
}

pub fn solution_stats(t: &AccuracyTable, k: u32, n_aux: usize) -> Result<SolutionStats> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let power_by_count: Vec<BigUint> = (0..=t.samples()).map(|c| BigUint::from(c).pow(k)).collect();
    let mut solutions = BigUint::zero();
    for (c, &n) in t.histogram().iter().enumerate() {
        if n > 0 {
            solutions += &power_by_count[c] * n;
        }
    }
    let per_weight = BigUint::from(t.samples() + n_aux).pow(k);
    let total = &per_weight << t.weight_width();
    Ok(SolutionStats { k, n_aux, power_by_count, per_weight, solutions, total })
}

/// How an observed solution probability turns into an angle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AngleRule {
    /// `θ = arcsin(√p)`: θ is the amplitude angle of the solution subspace.
    #[default]
    Amplitude,
    /// `θ = arcsin(p)`, applying arcsin to the probability itself.
    Probability,
}

impl AngleRule {
    pub fn angle(self, p: f64) -> f64 {
        match self {
            AngleRule::Amplitude => p.sqrt().asin(),
            AngleRule::Probability => p.asin(),
        }
    }
}

fn check_fraction(p: f64, what: &str) -> Result<()> {
    if p <= 0.0 {
        Err(Error::DegenerateAngle(format!(
            "{what} has no solution states; use more shots or check the model"
        )))
    } else if p >= 1.0 {
        Err(Error::DegenerateAngle(format!(
            "{what} is all solution states; pad with auxiliary samples"
        )))
    } else {
        Ok(())
    }
}

/// `θ = arcsin(√(|S| / N_tot))`.
pub fn theta_exact(solutions: &BigUint, total: &BigUint) -> Result<f64> {
    if solutions.is_zero() || solutions >= total {
        check_fraction(if solutions.is_zero() { 0.0 } else { 1.0 }, "the initial state")?;
    }
    Ok(AngleRule::Amplitude.angle(ratio(solutions, total)))
}

/// Estimates θ from `shots` measurements of the solution indicator, each a 1 with
/// probability `|S| / N_tot`.
pub fn theta_shots<R: Rng + ?Sized>(stats: &SolutionStats, shots: u64, rule: AngleRule, rng: &mut R) -> Result<f64> {
    let p = estimate_fraction(stats, shots, rng)?;
    Ok(rule.angle(p))
}

fn estimate_fraction<R: Rng + ?Sized>(stats: &SolutionStats, shots: u64, rng: &mut R) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("at least one shot is needed".into()));
    }
    let hits = Binomial::new(shots, stats.fraction())
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .sample(rng);
    let p = hits as f64 / shots as f64;
    check_fraction(p, &format!("the {shots}-shot estimate"))?;
    Ok(p)
}

/// `g = round((mπ + π/2 − θ) / 2θ)`, at least 0.
pub fn grover_iterations(theta: f64, branch: u32) -> Result<u64> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::DegenerateAngle(format!("θ = {theta} outside (0, π/2)")));
    }
    let g = ((f64::from(branch) * PI + FRAC_PI_2 - theta) / (2.0 * theta)).round();
    Ok(g.max(0.0) as u64)
}

/// `sin²((2g + 1)θ)`, the probability mass on solution states after `g` iterations.
pub fn residual(theta: f64, g: u64) -> f64 {
    ((2 * g + 1) as f64 * theta).sin().powi(2)
}

/// Smallest `n` with `θ(n) ≤ target` where `fraction(n)` is the solution
/// probability with `n` padding samples, nonincreasing in `n`.
fn smallest_pad(fraction: impl Fn(usize) -> f64, rule: AngleRule, target: f64) -> usize {
    let fits = |n: usize| rule.angle(fraction(n)) <= target + ANGLE_SLACK;
    if fits(0) {
        return 0;
    }
    let mut hi = 1usize;
    while !fits(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Smallest number of auxiliary samples that brings θ to at most `target`.
pub fn pad_auxiliary(t: &AccuracyTable, k: u32, target: f64) -> Result<usize> {
    pad_with_rule(t, k, target, AngleRule::Amplitude)
}

fn pad_with_rule(t: &AccuracyTable, k: u32, target: f64, rule: AngleRule) -> Result<usize> {
    if !(target > 0.0 && target <= FRAC_PI_4 + ANGLE_SLACK) {
        return Err(Error::InvalidArgument(format!("padding target {target} outside (0, π/4]")));
    }
    let stats = solution_stats(t, k, 0)?;
    let scaled = |n: usize| {
        let total = BigUint::from(t.samples() + n).pow(k) << t.weight_width();
        ratio(&stats.solutions, &total)
    };
    Ok(smallest_pad(scaled, rule, target))
}

/// Where θ comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaSource {
    /// From the exact solution count.
    Exact,
    /// From this many shots of the averaging circuit.
    Shots(u64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PadPolicy {
    /// Pad to θ ≤ π/6 when the predicted residual is under 0.9.
    #[default]
    Auto,
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanConfig {
    pub k: u32,
    pub branch: u32,
    pub theta: ThetaSource,
    pub rule: AngleRule,
    pub pad: PadPolicy,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig { k: 1, branch: 0, theta: ThetaSource::Exact, rule: AngleRule::Amplitude, pad: PadPolicy::Auto }
    }
}

/// Everything the Grover update needs.
///
/// `g` is chosen from `theta_estimate`; `residual` is what the true angle `theta`
/// yields after `g` iterations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroverPlan {
    pub k: u32,
    pub n_aux: usize,
    pub theta: f64,
    pub theta_estimate: f64,
    pub branch: u32,
    pub g: u64,
    pub residual: f64,
}

/// Estimates θ, picks `g`, and pads once if the predicted residual is poor.
pub fn plan<R: Rng + ?Sized>(t: &AccuracyTable, cfg: &PlanConfig, rng: &mut R) -> Result<GroverPlan> {
    let n_aux = match cfg.pad {
        PadPolicy::Fixed(n) => n,
        PadPolicy::Auto => 0,
    };
    let (first, (fraction, theta_estimate)) = plan_with(t, cfg, n_aux, rng)?;
    if cfg.pad != PadPolicy::Auto || residual(theta_estimate, first.g) >= AUTO_PAD_RESIDUAL {
        return Ok(first);
    }
    let n_aux = match cfg.theta {
        ThetaSource::Exact => pad_with_rule(t, cfg.k, AUTO_PAD_TARGET, cfg.rule)?,
        // the estimated fraction scales by (N / (N + n))^k
        ThetaSource::Shots(_) => {
            let n = t.samples() as f64;
            smallest_pad(|a| fraction * (n / (n + a as f64)).powi(cfg.k as i32), cfg.rule, AUTO_PAD_TARGET)
        }
    };
    if n_aux == 0 {
        return Ok(first);
    }
    Ok(plan_with(t, cfg, n_aux, rng)?.0)
}

/// Returns the plan and `(estimated fraction, estimated θ)`.
fn plan_with<R: Rng + ?Sized>(
    t: &AccuracyTable,
    cfg: &PlanConfig,
    n_aux: usize,
    rng: &mut R,
) -> Result<(GroverPlan, (f64, f64))> {
    let stats = solution_stats(t, cfg.k, n_aux)?;
    let theta = theta_exact(&stats.solutions, &stats.total)?;
    let fraction = match cfg.theta {
        ThetaSource::Exact => stats.fraction(),
        ThetaSource::Shots(s) => estimate_fraction(&stats, s, rng)?,
    };
    let theta_estimate = cfg.rule.angle(fraction);
    let g = grover_iterations(theta_estimate, cfg.branch)?;
    let plan = GroverPlan {
        k: cfg.k,
        n_aux,
        theta,
        theta_estimate,
        branch: cfg.branch,
        g,
        residual: residual(theta, g),
    };
    Ok((plan, (fraction, theta_estimate)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> AccuracyTable {
        AccuracyTable::from_counts(1, vec![2, 0], 2).unwrap()
    }

    #[test]
    fn toy_stats() {
        let s = solution_stats(&toy(), 1, 0).unwrap();
        assert_eq!(s.solutions, BigUint::from(2u32));
        assert_eq!(s.total, BigUint::from(4u32));
        assert_eq!(s.fraction(), 0.5);
        let padded = solution_stats(&toy(), 1, 2).unwrap();
        assert_eq!(padded.total, BigUint::from(8u32));
        assert!(solution_stats(&toy(), 0, 0).is_err());
    }

    #[test]
    fn powers_are_exact() {
        let t = AccuracyTable::from_counts(2, vec![512, 3, 0, 511], 512).unwrap();
        let s = solution_stats(&t, 8, 0).unwrap();
        assert_eq!(s.solutions_of(&t, 0), &BigUint::from(512u32).pow(8));
        let expect = BigUint::from(512u32).pow(8) + BigUint::from(3u32).pow(8) + BigUint::from(511u32).pow(8);
        assert_eq!(s.solutions, expect);
        assert_eq!(s.total, BigUint::from(512u32).pow(8) * 4u32);
        let t3 = AccuracyTable::from_counts(1, vec![7, 1], 7).unwrap();
        assert_eq!(solution_stats(&t3, 3, 0).unwrap().solutions_of(&t3, 0), &BigUint::from(343u32));
    }

    #[test]
    fn k1_fraction_is_mean_accuracy() {
        let t = AccuracyTable::from_counts(3, vec![0, 1, 2, 3, 4, 5, 6, 7], 9).unwrap();
        let s = solution_stats(&t, 1, 0).unwrap();
        assert!((s.fraction() - t.mean_accuracy()).abs() < 1e-15);
    }

    #[test]
    fn exact_angles() {
        let b = |v: u32| BigUint::from(v);
        assert!((theta_exact(&b(1), &b(2)).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((theta_exact(&b(1), &b(4)).unwrap() - FRAC_PI_6).abs() < 1e-15);
        assert!(matches!(theta_exact(&b(0), &b(4)), Err(Error::DegenerateAngle(_))));
        assert!(matches!(theta_exact(&b(4), &b(4)), Err(Error::DegenerateAngle(_))));
        assert!((theta_exact(&b(1), &b(4)).unwrap() - (0.25f64).sqrt().asin()).abs() < 1e-15);
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(grover_iterations(FRAC_PI_6, 0).unwrap(), 1);
        assert!((residual(FRAC_PI_6, 1) - 1.0).abs() < 1e-15);
        let g = grover_iterations(FRAC_PI_4, 0).unwrap();
        assert!(g <= 1);
        assert!((residual(FRAC_PI_4, g) - 0.5).abs() < 1e-12);
        // four balanced classes
        assert_eq!(grover_iterations(0.25f64.sqrt().asin(), 0).unwrap(), 1);
        assert_eq!(grover_iterations(FRAC_PI_6, 1).unwrap(), 4);
        assert!(grover_iterations(0.0, 0).is_err());
        assert!(grover_iterations(FRAC_PI_2, 0).is_err());
        // tiny angles need ~π/(4θ) iterations
        assert_eq!(grover_iterations((1.0f64 / 1024.0).sqrt().asin(), 0).unwrap(), 25);
    }

    #[test]
    fn padding() {
        assert_eq!(pad_auxiliary(&toy(), 1, FRAC_PI_6).unwrap(), 2);
        let low = AccuracyTable::from_counts(1, vec![1, 0], 4).unwrap();
        assert_eq!(pad_auxiliary(&low, 1, FRAC_PI_6).unwrap(), 0);
        assert!(pad_auxiliary(&toy(), 1, 1.0).is_err());
        // (2 + n)^2 ≥ 4·4 / 2 = 8 → n = 1
        assert_eq!(pad_auxiliary(&toy(), 2, FRAC_PI_6).unwrap(), 1);
    }

    #[test]
    fn toy_plan_pads_to_full_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = plan(&toy(), &PlanConfig::default(), &mut rng).unwrap();
        assert_eq!((p.n_aux, p.g), (2, 1));
        assert!((p.theta - FRAC_PI_6).abs() < 1e-15);
        assert!((p.residual - 1.0).abs() < 1e-15);

        let fixed = PlanConfig { pad: PadPolicy::Fixed(0), ..PlanConfig::default() };
        let p = plan(&toy(), &fixed, &mut rng).unwrap();
        assert_eq!(p.n_aux, 0);
        assert!((p.residual - 0.5).abs() < 1e-12);

        // arcsin(½) = π/6 picks g = 1, which overshoots the true π/4 angle
        let strict = PlanConfig { rule: AngleRule::Probability, ..PlanConfig::default() };
        let p = plan(&toy(), &strict, &mut rng).unwrap();
        assert_eq!((p.n_aux, p.g), (0, 1));
        assert!((p.residual - 0.5).abs() < 1e-12);
    }

    #[test]
    fn shot_estimates() {
        let s = solution_stats(&toy(), 1, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let theta = theta_shots(&s, 1_000_000, AngleRule::Amplitude, &mut rng).unwrap();
        assert!((theta - FRAC_PI_4).abs() < 3e-3);
        let a = theta_shots(&s, 100, AngleRule::Amplitude, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = theta_shots(&s, 100, AngleRule::Amplitude, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        // one shot always lands on 0 or 1
        for seed in 0..20 {
            let r = theta_shots(&s, 1, AngleRule::Amplitude, &mut ChaCha8Rng::seed_from_u64(seed));
            assert!(matches!(r, Err(Error::DegenerateAngle(_))));
        }
        let all = solution_stats(&AccuracyTable::from_counts(1, vec![2, 2], 2).unwrap(), 1, 0).unwrap();
        assert!(theta_shots(&all, 10, AngleRule::Amplitude, &mut rng).is_err());
    }

    #[test]
    fn shot_estimator_is_unbiased() {
        let t = AccuracyTable::from_counts(2, vec![3, 1, 0, 2], 4).unwrap();
        let s = solution_stats(&t, 1, 0).unwrap();
        let p = s.fraction();
        let (shots, reps) = (200u64, 4000);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut sum = 0.0;
        for _ in 0..reps {
            sum += theta_shots(&s, shots, AngleRule::Amplitude, &mut rng).unwrap().sin().powi(2);
        }
        let sd = (p * (1.0 - p) / (shots as f64 * reps as f64)).sqrt();
        assert!((sum / reps as f64 - p).abs() < 5.0 * sd);
    }

    proptest! {
        #[test]
        fn padding_is_minimal_and_monotone(counts in prop::collection::vec(0u32..=20, 4), k in 1u32..4) {
            let t = AccuracyTable::from_counts(2, counts, 20).unwrap();
            prop_assume!(t.max_count() > 0 && t.counts().iter().any(|&c| c < 20));
            let n = pad_auxiliary(&t, k, FRAC_PI_6).unwrap();
            let angle = |n| {
                let s = solution_stats(&t, k, n).unwrap();
                theta_exact(&s.solutions, &s.total).unwrap()
            };
            prop_assert!(angle(n) <= FRAC_PI_6 + ANGLE_SLACK);
            if n > 0 {
                prop_assert!(angle(n - 1) > FRAC_PI_6 + ANGLE_SLACK);
            }
            prop_assert!(angle(n + 1) <= angle(n));
        }
    }
}
