use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gof::{ks_statistic, lattice_ks_statistic, standard_normal_cdf};
use super::{default_max_depth, run_ensemble, EnsembleConfig, EnsembleSummary};
use crate::cascade::{WeightOracle, DEFAULT_MAX_DEPTH};
use crate::disorder::{DisorderSpec, Regime};
use crate::error::{Error, Result};
use crate::laplace::asymptotic_variance;
use crate::measure::PathSampler;
use crate::numerics::{least_squares_slope, quantile_sorted};
use crate::seed::{replicate_seed, sampling_seed};

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, 0.5)
}

/// Least-squares slope of the median `ln Z_k` against `k = 1..n`.
pub fn median_log_z_slope(summary: &EnsembleSummary) -> f64 {
    let ks: Vec<f64> = summary.depths.iter().map(|d| d.k as f64).collect();
    let medians: Vec<f64> = summary.depths.iter().map(|d| d.log_z.median()).collect();
    if ks.len() < 2 {
        return 0.0;
    }
    least_squares_slope(&ks, &medians)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DichotomyVerdict {
    pub weak: EnsembleConfig,
    pub strong: EnsembleConfig,
    pub weak_median_log_z: Vec<f64>,
    pub strong_median_log_z: Vec<f64>,
    pub weak_slope: f64,
    pub strong_slope: f64,
    /// `weak_slope > strong_slope`.
    pub ordered: bool,
}

pub fn dichotomy_report(weak: &EnsembleSummary, strong: &EnsembleSummary) -> Result<DichotomyVerdict> {
    if weak.config.depth != strong.config.depth || weak.config.replicates != strong.config.replicates {
        return Err(Error::InvalidArgument(
            "dichotomy report needs summaries with equal depth and replicates".into(),
        ));
    }
    let medians = |s: &EnsembleSummary| s.depths.iter().map(|d| d.log_z.median()).collect();
    let weak_slope = median_log_z_slope(weak);
    let strong_slope = median_log_z_slope(strong);
    Ok(DichotomyVerdict {
        weak: weak.config.clone(),
        strong: strong.config.clone(),
        weak_median_log_z: medians(weak),
        strong_median_log_z: medians(strong),
        weak_slope,
        strong_slope,
        ordered: weak_slope > strong_slope,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub k: usize,
    pub valid: usize,
    pub valid_fraction: f64,
    pub median_ratio: f64,
    pub q10: f64,
    pub q90: f64,
    /// `|median(R_k) - c|`.
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SenetaHeydeReport {
    pub config: EnsembleConfig,
    pub target: f64,
    pub rows: Vec<RatioRow>,
}

impl SenetaHeydeReport {
    pub fn from_summary(summary: &EnsembleSummary) -> Result<Self> {
        let spec = summary.config.spec;
        if spec.classify() != Regime::Critical {
            return Err(Error::RegimeMismatch {
                operation: "seneta_heyde_report",
                expected: "critical",
                actual: spec.classify(),
            });
        }
        let target = spec.seneta_heyde_constant()?;
        let replicates = summary.config.replicates;
        let rows = summary
            .depths
            .iter()
            .map(|d| RatioRow {
                k: d.k,
                valid: d.ratio.count,
                valid_fraction: d.positive_d_fraction(replicates),
                median_ratio: d.ratio.median(),
                q10: d.ratio.quantiles[0],
                q90: d.ratio.quantiles[4],
                distance: (d.ratio.median() - target).abs(),
            })
            .collect();
        Ok(Self {
            config: summary.config.clone(),
            target,
            rows,
        })
    }

    pub fn row(&self, k: usize) -> &RatioRow {
        &self.rows[k - 1]
    }

    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "# target={}", self.target)?;
        let mut csv = csv::Writer::from_writer(out);
        csv.write_record(["k", "valid", "valid_fraction", "median_ratio", "q10", "q90", "distance"])?;
        for r in &self.rows {
            csv.write_record(&[
                r.k.to_string(),
                r.valid.to_string(),
                r.valid_fraction.to_string(),
                r.median_ratio.to_string(),
                r.q10.to_string(),
                r.q90.to_string(),
                r.distance.to_string(),
            ])?;
        }
        csv.flush()
    }
}

/// Ratio `sqrt(k) Z_k / D_k` across a critical ensemble.
pub fn seneta_heyde_report(config: &EnsembleConfig) -> Result<SenetaHeydeReport> {
    if config.spec.classify() != Regime::Critical {
        return Err(Error::RegimeMismatch {
            operation: "seneta_heyde_report",
            expected: "critical",
            actual: config.spec.classify(),
        });
    }
    SenetaHeydeReport::from_summary(&run_ensemble(config)?)
}

/// Environments, each probed with independent polymer paths.
///
/// Environment `i` has seed `replicate_seed(base_seed, i)`; its paths are
/// drawn from a ChaCha8 stream keyed by `sampling_seed` of that seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathEnsembleConfig {
    pub spec: DisorderSpec,
    pub depth: usize,
    pub environments: usize,
    pub paths_per_env: usize,
    pub base_seed: u64,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
}

impl PathEnsembleConfig {
    pub fn new(spec: DisorderSpec, depth: usize, environments: usize, paths_per_env: usize, base_seed: u64) -> Self {
        Self {
            spec,
            depth,
            environments,
            paths_per_env,
            base_seed,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }

    pub fn oracle(&self, environment: usize) -> WeightOracle {
        WeightOracle::new(replicate_seed(self.base_seed, environment as u64), self.spec).with_max_depth(self.max_depth)
    }

    fn validate(&self) -> Result<()> {
        if self.environments == 0 {
            return Err(Error::InvalidArgument("need at least one environment".into()));
        }
        if self.paths_per_env < 2 {
            return Err(Error::TooFewSamples {
                required: 2,
                got: self.paths_per_env,
            });
        }
        Ok(())
    }

    /// Sampled endpoints for every environment, in environment order.
    fn endpoints(&self) -> Result<Vec<(PathSampler, Vec<i64>)>> {
        (0..self.environments)
            .into_par_iter()
            .map(|i| {
                let oracle = self.oracle(i);
                let sampler = PathSampler::new(&oracle, self.depth)?;
                let mut rng = ChaCha8Rng::seed_from_u64(sampling_seed(oracle.seed()));
                let endpoints = (0..self.paths_per_env).map(|_| sampler.sample_endpoint(&mut rng)).collect();
                Ok((sampler, endpoints))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltReport {
    pub config: PathEnsembleConfig,
    /// Continuity-corrected distance per environment.
    pub ks: Vec<f64>,
    /// Plain one-sample distance of `(s)_n / sqrt(n)` per environment.
    pub raw_ks: Vec<f64>,
    pub median_ks: f64,
    pub median_raw_ks: f64,
}

impl CltReport {
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "# median_ks={} median_raw_ks={}", self.median_ks, self.median_raw_ks)?;
        let mut csv = csv::Writer::from_writer(out);
        csv.write_record(["environment", "seed", "ks", "raw_ks"])?;
        for (i, (ks, raw)) in self.ks.iter().zip(&self.raw_ks).enumerate() {
            csv.write_record(&[
                i.to_string(),
                self.config.oracle(i).seed().to_string(),
                ks.to_string(),
                raw.to_string(),
            ])?;
        }
        csv.flush()
    }
}

/// Kolmogorov-Smirnov distance of `(s)_n / sqrt(n)` under `prob_n` to the
/// standard normal, per environment.
pub fn clt_report(config: &PathEnsembleConfig) -> Result<CltReport> {
    let regime = config.spec.classify();
    if regime != Regime::Weak {
        return Err(Error::RegimeMismatch {
            operation: "clt_report",
            expected: "weak",
            actual: regime,
        });
    }
    config.validate()?;
    let scale = (config.depth as f64).sqrt();
    let mut ks = Vec::with_capacity(config.environments);
    let mut raw_ks = Vec::with_capacity(config.environments);
    for (_, endpoints) in config.endpoints()? {
        ks.push(lattice_ks_statistic(&endpoints, config.depth)?);
        let scaled: Vec<f64> = endpoints.iter().map(|&x| x as f64 / scale).collect();
        raw_ks.push(ks_statistic(&scaled, standard_normal_cdf)?);
    }
    Ok(CltReport {
        config: config.clone(),
        median_ks: median(&ks),
        median_raw_ks: median(&raw_ks),
        ks,
        raw_ks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceReport {
    pub config: PathEnsembleConfig,
    /// `sigma^2(beta)`; 1 for the disorder-free control.
    pub target: f64,
    /// `Var((s)_n)/n` under `prob_n`, computed from the exact endpoint law.
    pub exact: Vec<f64>,
    /// The same quantity estimated from sampled paths.
    pub sampled: Vec<f64>,
    pub sampled_stderr: Vec<f64>,
    pub median_exact: f64,
    pub median_sampled: f64,
    /// `median_exact - target`.
    pub gap: f64,
}

impl VarianceReport {
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(
            out,
            "# target={} median_exact={} median_sampled={} gap={}",
            self.target, self.median_exact, self.median_sampled, self.gap
        )?;
        let mut csv = csv::Writer::from_writer(out);
        csv.write_record(["environment", "seed", "exact", "sampled", "sampled_stderr"])?;
        for i in 0..self.exact.len() {
            csv.write_record(&[
                i.to_string(),
                self.config.oracle(i).seed().to_string(),
                self.exact[i].to_string(),
                self.sampled[i].to_string(),
                self.sampled_stderr[i].to_string(),
            ])?;
        }
        csv.flush()
    }
}

/// Sample variance of `xs / sqrt(n)` and its delta-method standard error.
fn sample_variance(endpoints: &[i64], n: usize) -> (f64, f64) {
    let m = endpoints.len() as f64;
    let mean = endpoints.iter().map(|&x| x as f64).sum::<f64>() / m;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in endpoints {
        let d = x as f64 - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    let var = m2 / (m - 1.0);
    let stderr = ((m4 / m - (m2 / m).powi(2)) / m).max(0.0).sqrt();
    (var / n as f64, stderr / n as f64)
}

/// Diffusivity diagnostic: `Var((s)_n)/n` per environment against the
/// conjectured `sigma^2(beta)`. Reports the gap; never fails on it.
pub fn variance_report(config: &PathEnsembleConfig) -> Result<VarianceReport> {
    let target = match config.spec {
        DisorderSpec::Deterministic => 1.0,
        DisorderSpec::Lognormal { beta } if config.spec.classify() != Regime::Weak => asymptotic_variance(beta),
        spec => {
            return Err(Error::RegimeMismatch {
                operation: "variance_report",
                expected: "lognormal with beta >= beta_c",
                actual: spec.classify(),
            })
        }
    };
    config.validate()?;
    let n = config.depth;
    let mut exact = Vec::new();
    let mut sampled = Vec::new();
    let mut sampled_stderr = Vec::new();
    for (sampler, endpoints) in config.endpoints()? {
        let law = sampler.endpoint_distribution();
        let (mut m1, mut m2) = (0.0, 0.0);
        for (i, p) in law.iter().enumerate() {
            let x = (2 * i) as f64 - n as f64;
            m1 += p * x;
            m2 += p * x * x;
        }
        exact.push((m2 - m1 * m1) / n as f64);
        let (v, se) = sample_variance(&endpoints, n);
        sampled.push(v);
        sampled_stderr.push(se);
    }
    let median_exact = median(&exact);
    Ok(VarianceReport {
        config: config.clone(),
        target,
        median_sampled: median(&sampled),
        gap: median_exact - target,
        median_exact,
        exact,
        sampled,
        sampled_stderr,
    })
}
