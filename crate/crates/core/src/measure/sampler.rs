use std::f64::consts::LN_2;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Provenance, RestrictedMeasure};
use crate::cascade::{Vertex, WeightOracle};
use crate::error::{Error, Result};
use crate::numerics::log_add_exp;

/// The sampler stores `2^{n+1}` values; this bounds it to 256 MiB.
pub const SAMPLER_MAX_DEPTH: usize = 24;

/// A polygonal tree path `(s)_k = s_1 + .. + s_k`, `k = 0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathSample {
    pub steps: Vec<i8>,
    pub positions: Vec<i64>,
}

impl PathSample {
    pub fn from_steps(steps: Vec<i8>) -> Self {
        let mut positions = Vec::with_capacity(steps.len() + 1);
        positions.push(0);
        let mut x = 0i64;
        for &s in &steps {
            x += s as i64;
            positions.push(x);
        }
        Self { steps, positions }
    }

    pub fn endpoint(&self) -> i64 {
        *self.positions.last().expect("positions start at 0")
    }
}

/// Exact sampler for `prob_n` by sequential conditioning.
///
/// For every vertex `u` with `1 <= |u| <= n` it tabulates
/// `a(u) = ln(X_u Z_{n-|u|}(u))`; from vertex `v` the walk steps to `v*e`
/// with probability `e^{a(v*e)} / (e^{a(v*+)} + e^{a(v*-)})`.
pub struct PathSampler {
    depth: usize,
    seed: u64,
    table: Vec<f64>,
    log_z: f64,
}

#[inline]
fn offset(depth: usize) -> usize {
    (1usize << depth) - 2
}

impl PathSampler {
    pub fn new(oracle: &WeightOracle, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("path sampler needs n >= 1".into()));
        }
        oracle.check_depth(n)?;
        if n > SAMPLER_MAX_DEPTH {
            return Err(Error::DepthLimit {
                requested: n,
                cap: SAMPLER_MAX_DEPTH,
            });
        }
        let mut table = vec![0.0; offset(n + 1)];
        for depth in (1..=n).rev() {
            let (upper, lower) = table.split_at_mut(offset(depth + 1));
            let level = &mut upper[offset(depth)..];
            let children = (depth < n).then_some(&lower[..]);
            level.par_iter_mut().enumerate().for_each(|(i, a)| {
                let lw = oracle.log_weight_code((1u64 << depth) | i as u64);
                *a = match children {
                    Some(c) => lw + log_add_exp(c[2 * i], c[2 * i + 1]) - LN_2,
                    None => lw,
                };
            });
        }
        let log_z = log_add_exp(table[0], table[1]) - LN_2;
        Ok(Self {
            depth: n,
            seed: oracle.seed(),
            table,
            log_z,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `ln Z_n`.
    pub fn log_partition_function(&self) -> f64 {
        self.log_z
    }

    #[inline]
    fn a(&self, depth: usize, index: usize) -> f64 {
        self.table[offset(depth) + index]
    }

    /// Probability of stepping `+1` from the `index`-th vertex at `depth`.
    #[inline]
    fn plus_probability(&self, depth: usize, index: usize) -> f64 {
        let plus = self.a(depth + 1, 2 * index);
        let minus = self.a(depth + 1, 2 * index + 1);
        1.0 / (1.0 + (minus - plus).exp())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PathSample {
        let mut steps = Vec::with_capacity(self.depth);
        let mut index = 0usize;
        for depth in 0..self.depth {
            let u: f64 = rng.random();
            let plus = u < self.plus_probability(depth, index);
            steps.push(if plus { 1 } else { -1 });
            index = 2 * index + usize::from(!plus);
        }
        PathSample::from_steps(steps)
    }

    /// `(s)_n` only, without allocating.
    pub fn sample_endpoint<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let mut index = 0usize;
        let mut x = 0i64;
        for depth in 0..self.depth {
            let u: f64 = rng.random();
            if u < self.plus_probability(depth, index) {
                index *= 2;
                x += 1;
            } else {
                index = 2 * index + 1;
                x -= 1;
            }
        }
        x
    }

    /// Rectangle probabilities at depth `m`, by chaining the conditional step laws.
    fn level_probabilities(&self, m: usize) -> Vec<f64> {
        let mut probs = vec![1.0];
        for depth in 0..m {
            probs = probs
                .iter()
                .enumerate()
                .flat_map(|(i, &p)| {
                    let (a_plus, a_minus) = (self.a(depth + 1, 2 * i), self.a(depth + 1, 2 * i + 1));
                    [
                        p / (1.0 + (a_minus - a_plus).exp()),
                        p / (1.0 + (a_plus - a_minus).exp()),
                    ]
                })
                .collect();
        }
        probs
    }

    /// `prob_n` on the depth-`m` rectangles, `1 <= m <= n`, read off the table.
    pub fn restricted_measure(&self, m: usize) -> Result<RestrictedMeasure> {
        if m == 0 || m > self.depth {
            return Err(Error::InvalidArgument(format!("m must lie in 1..={}", self.depth)));
        }
        Ok(RestrictedMeasure {
            depth: m,
            probabilities: self.level_probabilities(m),
            provenance: Provenance::FiniteVolume { n: self.depth },
            seed: self.seed,
            normalizer: None,
        })
    }

    /// Exact law of `(s)_n`: entry `i` is the probability of endpoint `2i - n`.
    pub fn endpoint_distribution(&self) -> Vec<f64> {
        let n = self.depth;
        let mut law = vec![0.0; n + 1];
        for (i, p) in self.level_probabilities(n).into_iter().enumerate() {
            let position = Vertex::from_index(n, i as u64).position();
            law[((position + n as i64) / 2) as usize] += p;
        }
        law
    }
}

/// One exact draw from `prob_n`. Builds a [`PathSampler`]; reuse one when
/// drawing many paths from the same environment.
pub fn sample_path<R: Rng + ?Sized>(oracle: &WeightOracle, n: usize, rng: &mut R) -> Result<PathSample> {
    Ok(PathSampler::new(oracle, n)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::{critical_beta, DisorderSpec};
    use crate::measure::prob_n_measure;
    use crate::stats::chi_square_test;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_matches_rectangle_formula() {
        let oracle = WeightOracle::new(31, DisorderSpec::lognormal(critical_beta()).unwrap());
        let sampler = PathSampler::new(&oracle, 10).unwrap();
        for m in [1, 4, 10] {
            let a = sampler.restricted_measure(m).unwrap();
            let b = prob_n_measure(&oracle, 10, m).unwrap();
            for (x, y) in a.probabilities.iter().zip(&b.probabilities) {
                assert!((x - y).abs() <= 1e-12 * y);
            }
        }
        let law = sampler.endpoint_distribution();
        assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_is_simple_random_walk() {
        let oracle = WeightOracle::new(0, DisorderSpec::Deterministic);
        let sampler = PathSampler::new(&oracle, 6).unwrap();
        for d in 0..6 {
            assert_eq!(sampler.plus_probability(d, 0), 0.5);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let plus = (0..n).filter(|_| sampler.sample(&mut rng).steps[0] == 1).count();
        assert!((plus as f64 / n as f64 - 0.5).abs() < 5.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn path_sample_invariants() {
        let oracle = WeightOracle::new(2, DisorderSpec::lognormal(1.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let path = sample_path(&oracle, 12, &mut rng).unwrap();
        assert_eq!(path.positions[0], 0);
        assert_eq!(path.positions.len(), 13);
        for k in 1..=12 {
            assert_eq!((path.positions[k] - path.positions[k - 1]).abs(), 1);
        }
        let sampler = PathSampler::new(&oracle, 12).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(4);
        let mut r2 = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(sampler.sample(&mut r1).endpoint(), sampler.sample_endpoint(&mut r2));
    }

    #[test]
    fn leaf_and_marginal_frequencies_pass_chi_square() {
        let oracle = WeightOracle::new(17, DisorderSpec::lognormal(critical_beta()).unwrap());
        let n = 3;
        let sampler = PathSampler::new(&oracle, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut leaves = vec![0u64; 8];
        let mut first_two = vec![0u64; 4];
        for _ in 0..100_000 {
            let path = sampler.sample(&mut rng);
            let v = Vertex::from_steps(&path.steps).unwrap();
            leaves[v.index() as usize] += 1;
            first_two[v.prefix(2).index() as usize] += 1;
        }
        let exact = prob_n_measure(&oracle, n, 3).unwrap();
        assert!(chi_square_test(&leaves, &exact.probabilities).unwrap().p_value > 0.001);
        let exact = prob_n_measure(&oracle, n, 2).unwrap();
        assert!(chi_square_test(&first_two, &exact.probabilities).unwrap().p_value > 0.001);
    }

    #[test]
    fn depth_guard() {
        let oracle = WeightOracle::new(0, DisorderSpec::Deterministic);
        assert!(PathSampler::new(&oracle, 0).is_err());
        assert!(matches!(PathSampler::new(&oracle, 25), Err(Error::DepthLimit { .. })));
    }
}
