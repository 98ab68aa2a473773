//! Monte Carlo ensembles over independent environments and the reports built
//! on them.
//!
//! Replicate `i` of a configuration with base seed `b` uses the environment
//! seed [`replicate_seed`](crate::seed::replicate_seed)`(b, i)`. Replicates run
//! in parallel, but every aggregate is computed after sorting by replicate
//! index, so results do not depend on scheduling or thread count.

mod gof;
mod reports;

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use gof::{chi_square_test, ks_statistic, lattice_ks_statistic, standard_normal_cdf, ChiSquareResult};
pub use reports::{
    clt_report, dichotomy_report, median_log_z_slope, seneta_heyde_report, variance_report, CltReport,
    DichotomyVerdict, PathEnsembleConfig, RatioRow, SenetaHeydeReport, VarianceReport,
};

use crate::cascade::{martingale_series, MartingaleSeries, WeightOracle, DEFAULT_MAX_DEPTH};
use crate::disorder::DisorderSpec;
use crate::error::{Error, Result};
use crate::numerics::{quantile_sorted, NeumaierSum};
use crate::seed::replicate_seed;

/// Quantile levels reported for every statistic.
pub const QUANTILE_LEVELS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

fn default_max_depth() -> usize {
    DEFAULT_MAX_DEPTH
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub spec: DisorderSpec,
    pub depth: usize,
    pub replicates: usize,
    pub base_seed: u64,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
}

impl EnsembleConfig {
    pub fn new(spec: DisorderSpec, depth: usize, replicates: usize, base_seed: u64) -> Self {
        Self {
            spec,
            depth,
            replicates,
            base_seed,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }

    pub fn seed(&self, replicate: usize) -> u64 {
        replicate_seed(self.base_seed, replicate as u64)
    }

    pub fn oracle(&self, replicate: usize) -> WeightOracle {
        WeightOracle::new(self.seed(replicate), self.spec).with_max_depth(self.max_depth)
    }

    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("ensemble needs at least one replicate".into()));
        }
        if self.depth == 0 {
            return Err(Error::InvalidArgument("ensemble depth must be >= 1".into()));
        }
        Ok(())
    }
}

/// Mean, standard error and quantiles of one statistic across replicates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatSummary {
    pub count: usize,
    pub mean: f64,
    pub stderr: f64,
    /// Values at [`QUANTILE_LEVELS`].
    pub quantiles: [f64; 5],
}

impl StatSummary {
    /// Summary of values given in replicate order.
    pub fn from_values(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return Self {
                count,
                mean: f64::NAN,
                stderr: f64::NAN,
                quantiles: [f64::NAN; 5],
            };
        }
        let mut sum = NeumaierSum::default();
        values.iter().for_each(|&v| sum.add(v));
        let mean = sum.value() / count as f64;
        let stderr = if count > 1 {
            let mut ss = NeumaierSum::default();
            values.iter().for_each(|&v| ss.add((v - mean) * (v - mean)));
            (ss.value() / (count - 1) as f64 / count as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            count,
            mean,
            stderr,
            quantiles: QUANTILE_LEVELS.map(|q| quantile_sorted(&sorted, q)),
        }
    }

    pub fn median(&self) -> f64 {
        self.quantiles[2]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthSummary {
    pub k: usize,
    pub z: StatSummary,
    pub log_z: StatSummary,
    pub d: StatSummary,
    /// `sqrt(k) Z_k / D_k` over replicates with `D_k > 0`.
    pub ratio: StatSummary,
    /// Replicates with `D_k <= 0`, excluded from `ratio`.
    pub invalid_ratio: usize,
}

impl DepthSummary {
    pub fn positive_d_fraction(&self, replicates: usize) -> f64 {
        (replicates - self.invalid_ratio) as f64 / replicates as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub config: EnsembleConfig,
    pub depths: Vec<DepthSummary>,
}

/// Martingale series of every replicate, in replicate order.
pub fn run_series(config: &EnsembleConfig) -> Result<Vec<MartingaleSeries>> {
    config.validate()?;
    (0..config.replicates)
        .into_par_iter()
        .map(|i| martingale_series(&config.oracle(i), config.depth))
        .collect()
}

/// Aggregates `(replicate index, series)` pairs given in any order.
pub fn summarize(config: &EnsembleConfig, mut series: Vec<(usize, MartingaleSeries)>) -> EnsembleSummary {
    series.sort_by_key(|(i, _)| *i);
    let depths = (1..=config.depth)
        .map(|k| {
            let column = |f: &dyn Fn(&MartingaleSeries) -> f64| -> Vec<f64> {
                series.iter().map(|(_, s)| f(s)).collect()
            };
            let ratios: Vec<f64> = series.iter().filter_map(|(_, s)| s.ratio_at(k)).collect();
            DepthSummary {
                k,
                z: StatSummary::from_values(&column(&|s| s.z_at(k))),
                log_z: StatSummary::from_values(&column(&|s| s.log_z[k - 1])),
                d: StatSummary::from_values(&column(&|s| s.d_at(k))),
                invalid_ratio: series.len() - ratios.len(),
                ratio: StatSummary::from_values(&ratios),
            }
        })
        .collect();
    EnsembleSummary {
        config: config.clone(),
        depths,
    }
}

pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleSummary> {
    let series = run_series(config)?;
    Ok(summarize(config, series.into_iter().enumerate().collect()))
}

impl EnsembleSummary {
    pub fn at(&self, k: usize) -> &DepthSummary {
        &self.depths[k - 1]
    }

    /// Per-depth table: one row per `k`, quantiles of `Z`, `ln Z`, `D` and `R`.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        let mut csv = csv::Writer::from_writer(out);
        let mut columns = vec!["k".to_string()];
        for name in ["z", "log_z", "d", "ratio"] {
            columns.push(format!("{name}_mean"));
            columns.push(format!("{name}_stderr"));
            for q in QUANTILE_LEVELS {
                columns.push(format!("{name}_q{:02}", (q * 100.0).round() as u32));
            }
        }
        columns.push("ratio_valid".into());
        columns.push("ratio_invalid".into());
        csv.write_record(&columns)?;
        for row in &self.depths {
            let mut record = vec![row.k.to_string()];
            for stat in [&row.z, &row.log_z, &row.d, &row.ratio] {
                record.push(stat.mean.to_string());
                record.push(stat.stderr.to_string());
                record.extend(stat.quantiles.iter().map(|q| q.to_string()));
            }
            record.push(row.ratio.count.to_string());
            record.push(row.invalid_ratio.to_string());
            csv.write_record(&record)?;
        }
        csv.flush()
    }
}
