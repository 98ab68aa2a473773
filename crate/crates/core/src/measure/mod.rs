//! Polymer measures on the boundary of the tree, represented by their values
//! on the depth-`m` rectangles `Delta_m(v) = {s : s_i = v_i, i <= m}`.
//!
//! Finite volume (`|v| = m`):
//!
//! ```text
//! prob_n(Delta_m(v)) = Z_n^{-1} (prod_{j<=m} X_{v|j} 2^{-m}) Z_{n-m}(v)     m <= n
//! prob_n(Delta_m(v)) = Z_n^{-1} prod_{j<=n} X_{v|j} 2^{-m}                  m >  n
//! ```
//!
//! Infinite volume, with the limit `D_inf` replaced by the depth-`N` value:
//!
//! ```text
//! prob_inf(Delta_m(v)) ~ D_N(v) prod_{j<=m} X_{v|j} / sum_{|u|=m} D_N(u) prod_{j<=m} X_{u|j}
//! ```
//!
//! `D_N(u)` can be negative at finite `N`; such entries are kept as is, and
//! only a nonpositive normalizer is rejected.

mod character;
mod sampler;

use std::f64::consts::LN_2;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use character::{Character, CHARACTER_CAP};
pub use sampler::{sample_path, PathSample, PathSampler, SAMPLER_MAX_DEPTH};

use crate::cascade::{log_partition_function, subtree_sums, Vertex, WeightOracle};
use crate::error::{Error, Result};
use crate::numerics::{log_sum_exp, NeumaierSum, ScaledReal};

/// Which measure a [`RestrictedMeasure`] restricts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    FiniteVolume { n: usize },
    InfiniteVolumeEstimate { big_n: usize },
}

/// Values of a measure on all `2^m` depth-`m` rectangles, in canonical vertex order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictedMeasure {
    pub depth: usize,
    pub probabilities: Vec<f64>,
    pub provenance: Provenance,
    pub seed: u64,
    /// For infinite-volume estimates, the normalizer `sum_u D_N(u) prod X_u 2^-m`.
    pub normalizer: Option<f64>,
}

impl RestrictedMeasure {
    pub fn probability(&self, v: Vertex) -> f64 {
        assert_eq!(v.depth(), self.depth, "vertex depth does not match the measure");
        self.probabilities[v.index() as usize]
    }

    pub fn total(&self) -> f64 {
        let mut sum = NeumaierSum::default();
        self.probabilities.iter().for_each(|&p| sum.add(p));
        sum.value()
    }

    /// The same measure on depth `m - 1` rectangles (sibling pairs summed).
    pub fn coarsen(&self) -> Option<RestrictedMeasure> {
        (self.depth > 0).then(|| RestrictedMeasure {
            depth: self.depth - 1,
            probabilities: self.probabilities.chunks(2).map(|p| p[0] + p[1]).collect(),
            ..self.clone()
        })
    }

    /// `E chi_F` under this measure; `max F` must not exceed the depth.
    pub fn character_expectation(&self, character: &Character) -> Result<f64> {
        if character.max_level() > self.depth {
            return Err(Error::InvalidArgument(format!(
                "character {character} needs rectangles of depth {}, measure has depth {}",
                character.max_level(),
                self.depth
            )));
        }
        let mut sum = NeumaierSum::default();
        for (v, &p) in Vertex::level(self.depth).zip(&self.probabilities) {
            sum.add(character.value(&v) as f64 * p);
        }
        Ok(sum.value())
    }

    /// CSV with a `#` comment header carrying provenance and seed, then
    /// `vertex,probability` rows.
    pub fn write_csv<W: Write>(&self, mut out: W, extra_header: &[String]) -> io::Result<()> {
        for line in extra_header {
            writeln!(out, "# {line}")?;
        }
        match self.provenance {
            Provenance::FiniteVolume { n } => {
                writeln!(out, "# provenance=finite_volume n={n} m={} seed={}", self.depth, self.seed)?
            }
            Provenance::InfiniteVolumeEstimate { big_n } => writeln!(
                out,
                "# provenance=infinite_volume_estimate N={big_n} m={} seed={} normalizer={}",
                self.depth,
                self.seed,
                self.normalizer.unwrap_or(f64::NAN)
            )?,
        }
        let mut csv = csv::Writer::from_writer(out);
        csv.write_record(["vertex", "probability"])?;
        for (v, p) in Vertex::level(self.depth).zip(&self.probabilities) {
            csv.write_record([v.to_string(), p.to_string()])?;
        }
        csv.flush()
    }
}

/// `sum_{j<=m} ln X_{u|j}` for every `|u| = m`, in canonical order.
pub fn level_log_products(oracle: &WeightOracle, m: usize) -> Vec<f64> {
    let mut current = vec![0.0];
    for depth in 1..=m {
        current = (0..1u64 << depth)
            .map(|i| current[(i >> 1) as usize] + oracle.log_weight_code((1u64 << depth) | i))
            .collect();
    }
    current
}

fn check_rectangle_args(n: usize, m: usize, name: &str) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!("{name} needs depths >= 1 (got {n}, m = {m})")));
    }
    Ok(())
}

/// `prob_n(Delta_m(v))` for a single rectangle.
pub fn prob_n_rectangle(oracle: &WeightOracle, n: usize, v: Vertex) -> Result<f64> {
    let m = v.depth();
    check_rectangle_args(n, m, "prob_n")?;
    oracle.check_depth(n.max(m))?;
    let log_zn = log_partition_function(oracle, Vertex::root(), n)?;
    let log_term = if m <= n {
        oracle.log_path_weight(v) - m as f64 * LN_2 + log_partition_function(oracle, v, n - m)?
    } else {
        oracle.log_path_weight(v.prefix(n)) - m as f64 * LN_2
    };
    Ok((log_term - log_zn).exp())
}

/// `prob_n` restricted to all depth-`m` rectangles.
pub fn prob_n_measure(oracle: &WeightOracle, n: usize, m: usize) -> Result<RestrictedMeasure> {
    check_rectangle_args(n, m, "prob_n")?;
    oracle.check_depth(n.max(m))?;
    let log_terms: Vec<f64> = if m <= n {
        let products = level_log_products(oracle, m);
        let sub: Vec<f64> = (0..1u64 << m)
            .into_par_iter()
            .map(|i| log_partition_function(oracle, Vertex::from_index(m, i), n - m))
            .collect::<Result<_>>()?;
        products
            .iter()
            .zip(&sub)
            .map(|(&l, &z)| l - m as f64 * LN_2 + z)
            .collect()
    } else {
        let products = level_log_products(oracle, n);
        let spread = m - n;
        (0..1usize << m)
            .map(|i| products[i >> spread] - m as f64 * LN_2)
            .collect()
    };
    let log_norm = log_sum_exp(&log_terms);
    Ok(RestrictedMeasure {
        depth: m,
        probabilities: log_terms.iter().map(|&t| (t - log_norm).exp()).collect(),
        provenance: Provenance::FiniteVolume { n },
        seed: oracle.seed(),
        normalizer: None,
    })
}

/// Self-normalized weights `D_u e^{L_u} / sum_w D_w e^{L_w}`.
///
/// Returns the weights and `ln`-scale `s` with `sum_w D_w e^{L_w} = S e^{s}`, as `(weights, S, s)`.
pub(crate) fn self_normalize(log_products: &[f64], d: &[ScaledReal]) -> Result<(Vec<f64>, f64, f64)> {
    let scales: Vec<f64> = log_products
        .iter()
        .zip(d)
        .map(|(&l, dn)| {
            if dn.mantissa == 0.0 {
                f64::NEG_INFINITY
            } else {
                dn.log_scale + l
            }
        })
        .collect();
    let top = scales.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Err(Error::NonPositiveNormalizer { value: 0.0 });
    }
    let terms: Vec<f64> = d
        .iter()
        .zip(&scales)
        .map(|(dn, &s)| if s == f64::NEG_INFINITY { 0.0 } else { dn.mantissa * (s - top).exp() })
        .collect();
    let mut total = NeumaierSum::default();
    terms.iter().for_each(|&t| total.add(t));
    let total = total.value();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::NonPositiveNormalizer {
            value: total * top.exp(),
        });
    }
    Ok((terms.iter().map(|t| t / total).collect(), total, top))
}

/// Estimate of `prob_inf` on all depth-`m` rectangles from `D_N`.
pub fn prob_inf_measure(oracle: &WeightOracle, m: usize, big_n: usize) -> Result<RestrictedMeasure> {
    check_rectangle_args(big_n, m, "prob_inf")?;
    oracle.check_depth(m + big_n)?;
    let products = level_log_products(oracle, m);
    let d: Vec<ScaledReal> = (0..1u64 << m)
        .into_par_iter()
        .map(|i| subtree_sums(oracle, Vertex::from_index(m, i), big_n).map(|s| s.d[big_n]))
        .collect::<Result<_>>()?;
    let (probabilities, total, log_scale) = match self_normalize(&products, &d) {
        Ok(v) => v,
        Err(Error::NonPositiveNormalizer { value }) => {
            return Err(Error::NonPositiveNormalizer {
                value: value * (-(m as f64) * LN_2).exp(),
            })
        }
        Err(e) => return Err(e),
    };
    Ok(RestrictedMeasure {
        depth: m,
        probabilities,
        provenance: Provenance::InfiniteVolumeEstimate { big_n },
        seed: oracle.seed(),
        normalizer: Some(total * (log_scale - m as f64 * LN_2).exp()),
    })
}

/// `prob_inf(Delta_m(v))` estimated with `D_N`.
pub fn prob_inf_rectangle(oracle: &WeightOracle, v: Vertex, big_n: usize) -> Result<f64> {
    Ok(prob_inf_measure(oracle, v.depth(), big_n)?.probability(v))
}

/// `E_{prob_n} chi_F`, exact over the `2^{max F}` rectangles.
pub fn character_expectation_n(oracle: &WeightOracle, n: usize, character: &Character) -> Result<f64> {
    let m = character.max_level();
    if m == 0 {
        return Ok(1.0);
    }
    if n <= m {
        return Err(Error::InvalidArgument(format!("need n > max F, got n = {n}, max F = {m}")));
    }
    prob_n_measure(oracle, n, m)?.character_expectation(character)
}

/// `E_{prob_inf} chi_F` with `D_inf` replaced by `D_N`.
pub fn character_expectation_inf(oracle: &WeightOracle, character: &Character, big_n: usize) -> Result<f64> {
    let m = character.max_level();
    if m == 0 {
        return Ok(1.0);
    }
    prob_inf_measure(oracle, m, big_n)?.character_expectation(character)
}
