//! Ensemble-level checks. Each runs a few hundred environments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treepolymer::cascade::WeightOracle;
use treepolymer::laplace::{empirical_laplace_rate, laplace_curve, laplace_rate};
use treepolymer::measure::{character_expectation_n, Character, PathSampler};
use treepolymer::numerics::quantile_sorted;
use treepolymer::seed::replicate_seed;
use treepolymer::stats::{median_log_z_slope, run_ensemble, EnsembleConfig};
use treepolymer::{critical_beta, DisorderSpec};

fn lognormal(k: f64) -> DisorderSpec {
    DisorderSpec::lognormal(k * critical_beta()).unwrap()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    quantile_sorted(&xs, 0.5)
}

#[test]
fn critical_partition_function_decays_and_d_turns_positive() {
    let summary = run_ensemble(&EnsembleConfig::new(lognormal(1.0), 20, 200, 1)).unwrap();
    assert!(summary.at(20).log_z.median() < summary.at(10).log_z.median());
    let fractions: Vec<f64> = [8, 12, 16, 20]
        .iter()
        .map(|&k| summary.at(k).positive_d_fraction(200))
        .collect();
    assert!(fractions.windows(2).all(|w| w[0] <= w[1]), "{fractions:?}");
}

#[test]
fn dichotomy_slopes_ordered() {
    let slope = |k: f64| median_log_z_slope(&run_ensemble(&EnsembleConfig::new(lognormal(k), 16, 100, 1)).unwrap());
    let (weak, critical, strong) = (slope(0.5), slope(1.0), slope(1.5));
    assert!(weak > critical && critical > strong, "{weak} {critical} {strong}");
}

#[test]
fn character_expectation_agrees_with_sampled_paths() {
    let oracle = WeightOracle::new(21, lognormal(1.0));
    let n = 6;
    let f = Character::new([1, 3]).unwrap();
    let exact = character_expectation_n(&oracle, n, &f).unwrap();
    let sampler = PathSampler::new(&oracle, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let draws = 100_000;
    let values: Vec<f64> = (0..draws)
        .map(|_| {
            let path = sampler.sample(&mut rng);
            (path.steps[0] * path.steps[2]) as f64
        })
        .collect();
    let mean = values.iter().sum::<f64>() / draws as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    let stderr = (var / draws as f64).sqrt();
    assert!((mean - exact).abs() <= 5.0 * stderr, "{mean} vs {exact} (se {stderr})");
}

#[test]
fn empirical_rate_at_zero_tilt_vanishes() {
    for seed in 0..5 {
        let oracle = WeightOracle::new(seed, lognormal(2.0));
        assert!(empirical_laplace_rate(&oracle, 12, 0.0).unwrap().abs() < 1e-12);
    }
}

fn median_rate_gap(n: usize, seeds: u64, base_seed: u64) -> f64 {
    let target = laplace_rate(2.0 * critical_beta(), 0.5).unwrap();
    let rates: Vec<f64> = (0..seeds)
        .map(|i| {
            let oracle = WeightOracle::new(replicate_seed(base_seed, i), lognormal(2.0));
            empirical_laplace_rate(&oracle, n, 0.5).unwrap()
        })
        .collect();
    median(rates) - target
}

// The median over 50 environments moves by about 0.015 between disjoint
// seed blocks at these depths, which is larger than the trend itself.
#[test]
#[ignore = "not resolvable with 50 environments at n <= 22"]
fn empirical_rate_gap_shrinks_with_depth() {
    let (g14, g22) = (median_rate_gap(14, 50, 1).abs(), median_rate_gap(22, 50, 1).abs());
    assert!(g22 < g14, "gap(14) = {g14}, gap(22) = {g22}");
}

#[test]
fn empirical_rate_median_near_laplace_rate() {
    let gap = median_rate_gap(22, 50, 1);
    assert!(gap.abs() < 0.05, "gap(22) = {gap}");
}

#[test]
fn curves_ordered_in_beta() {
    // Larger beta gives a flatter curve away from the origin.
    let curves: Vec<_> = [1.0, 1.5, 2.0]
        .iter()
        .map(|k| laplace_curve(k * critical_beta(), -2.0, 2.0, 41).unwrap())
        .collect();
    for i in 0..41 {
        if i == 20 {
            continue;
        }
        assert!(curves[0].f[i] > curves[1].f[i] && curves[1].f[i] > curves[2].f[i], "r = {}", curves[0].r[i]);
    }
}
