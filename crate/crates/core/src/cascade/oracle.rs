use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::vertex::Vertex;
use crate::disorder::DisorderSpec;
use crate::error::{Error, Result};
use crate::seed::{mix64, GOLDEN_GAMMA};

/// Default traversal depth cap.
pub const DEFAULT_MAX_DEPTH: usize = 26;

/// One cascade environment `{X_v}`, realized lazily from a seed.
///
/// `X_v` is a pure function of `(seed, v)`: the vertex code is hashed with the
/// seed into the state of a SplitMix64 stream, and one variate of the weight
/// law is drawn from that stream. Nothing is stored, so a depth-`n`
/// traversal needs `O(n)` memory and any subtree can be recomputed exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightOracle {
    seed: u64,
    spec: DisorderSpec,
    max_depth: usize,
    key: u64,
    law: LogWeightLaw,
}

/// `ln X` sampler with the per-family constants computed once.
/// Draws are bit-identical to [`DisorderSpec::sample_log_weight`].
#[derive(Clone, Copy, Debug, PartialEq)]
enum LogWeightLaw {
    Lognormal { beta: f64, drift: f64 },
    TwoPoint { p: f64, ln_a: f64, ln_b: f64 },
    Deterministic,
}

impl LogWeightLaw {
    fn new(spec: DisorderSpec) -> Self {
        match spec {
            DisorderSpec::Lognormal { beta } => Self::Lognormal {
                beta,
                drift: 0.5 * beta * beta,
            },
            DisorderSpec::TwoPoint { a, p } => Self::TwoPoint {
                p,
                ln_a: a.ln(),
                ln_b: ((1.0 - p * a) / (1.0 - p)).ln(),
            },
            DisorderSpec::Deterministic => Self::Deterministic,
        }
    }
}

impl WeightOracle {
    pub fn new(seed: u64, spec: DisorderSpec) -> Self {
        Self {
            seed,
            spec,
            max_depth: DEFAULT_MAX_DEPTH,
            key: mix64(seed ^ 0xA076_1D64_78BD_642F),
            law: LogWeightLaw::new(spec),
        }
    }

    /// Overrides the depth cap (at most 62).
    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth.min(Vertex::MAX_DEPTH - 1);
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec(&self) -> &DisorderSpec {
        &self.spec
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub(crate) fn check_depth(&self, requested: usize) -> Result<()> {
        if requested > self.max_depth {
            return Err(Error::DepthLimit {
                requested,
                cap: self.max_depth,
            });
        }
        Ok(())
    }

    /// `ln X_v`.
    pub fn log_weight_at(&self, v: Vertex) -> Result<f64> {
        if v.is_root() {
            return Err(Error::RootVertex);
        }
        Ok(self.log_weight_code(v.code()))
    }

    /// `X_v`.
    pub fn weight_at(&self, v: Vertex) -> Result<f64> {
        self.log_weight_at(v).map(f64::exp)
    }

    /// `sum_{j <= |v|} ln X_{v|j}`.
    pub fn log_path_weight(&self, v: Vertex) -> f64 {
        (1..=v.depth()).map(|j| self.log_weight_code(v.prefix(j).code())).sum()
    }

    #[inline]
    pub(crate) fn log_weight_code(&self, code: u64) -> f64 {
        let mut stream = VertexStream {
            state: mix64(code.wrapping_mul(GOLDEN_GAMMA) ^ self.key),
        };
        match self.law {
            LogWeightLaw::Lognormal { beta, drift } => {
                let z: f64 = stream.sample(StandardNormal);
                beta * z - drift
            }
            LogWeightLaw::TwoPoint { p, ln_a, ln_b } => {
                let u: f64 = stream.random();
                if u < p {
                    ln_a
                } else {
                    ln_b
                }
            }
            LogWeightLaw::Deterministic => 0.0,
        }
    }
}

/// SplitMix64 stream keyed by one vertex.
struct VertexStream {
    state: u64,
}

impl RngCore for VertexStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
