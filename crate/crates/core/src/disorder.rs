//! Mean-one weight laws and the weak/critical/strong disorder classification.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `E[X ln X] - ln 2` for the critical classification.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

/// `beta_c = sqrt(2 ln 2)`, the critical inverse temperature of the lognormal family.
pub fn critical_beta() -> f64 {
    (2.0 * LN_2).sqrt()
}

/// Law of the i.i.d. cascade weight `X`. Every family has `E X = 1` by construction.
///
/// Serialized as `{"kind": "lognormal", "beta": ..}`, `{"kind": "twopoint", "a": .., "p": ..}`
/// or `{"kind": "deterministic"}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawSpec")]
pub enum DisorderSpec {
    /// `X = exp(beta Z - beta^2/2)` with `Z` standard normal.
    Lognormal { beta: f64 },
    /// `X = a` with probability `p`, else `(1 - p a)/(1 - p)`.
    #[serde(rename = "twopoint")]
    TwoPoint { a: f64, p: f64 },
    /// `X = 1`.
    Deterministic,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawSpec {
    Lognormal { beta: f64 },
    #[serde(rename = "twopoint")]
    TwoPoint { a: f64, p: f64 },
    Deterministic,
}

impl TryFrom<RawSpec> for DisorderSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        match raw {
            RawSpec::Lognormal { beta } => DisorderSpec::lognormal(beta),
            RawSpec::TwoPoint { a, p } => DisorderSpec::two_point(a, p),
            RawSpec::Deterministic => Ok(DisorderSpec::Deterministic),
        }
    }
}

/// Disorder regime relative to the branching rate `ln 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Weak,
    Critical,
    Strong,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Weak => "weak",
            Regime::Critical => "critical",
            Regime::Strong => "strong",
        })
    }
}

impl DisorderSpec {
    pub fn lognormal(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidSpec(format!("lognormal beta must be positive, got {beta}")));
        }
        Ok(DisorderSpec::Lognormal { beta })
    }

    pub fn two_point(a: f64, p: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidSpec(format!("two-point a must lie in (0, 1), got {a}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidSpec(format!("two-point p must lie in (0, 1), got {p}")));
        }
        Ok(DisorderSpec::TwoPoint { a, p })
    }

    /// Support points `(value, probability)` of the two-point law.
    fn two_point_support(a: f64, p: f64) -> [(f64, f64); 2] {
        let b = (1.0 - p * a) / (1.0 - p);
        [(a, p), (b, 1.0 - p)]
    }

    /// `E[X ln X]`, the quantity compared against `ln 2`.
    pub fn disorder_parameter(&self) -> f64 {
        match *self {
            DisorderSpec::Lognormal { beta } => 0.5 * beta * beta,
            DisorderSpec::TwoPoint { a, p } => Self::two_point_support(a, p)
                .iter()
                .map(|&(x, q)| q * x * x.ln())
                .sum(),
            DisorderSpec::Deterministic => 0.0,
        }
    }

    pub fn classify(&self) -> Regime {
        let gap = self.disorder_parameter() - LN_2;
        if gap.abs() <= CRITICAL_TOLERANCE {
            Regime::Critical
        } else if gap < 0.0 {
            Regime::Weak
        } else {
            Regime::Strong
        }
    }

    /// `E[X (ln X)^2] - (E[X ln X])^2`. Zero for the deterministic law.
    pub fn sigma_squared(&self) -> f64 {
        match *self {
            DisorderSpec::Lognormal { beta } => beta * beta,
            DisorderSpec::TwoPoint { a, p } => {
                let support = Self::two_point_support(a, p);
                let second: f64 = support.iter().map(|&(x, q)| q * x * x.ln().powi(2)).sum();
                let first = self.disorder_parameter();
                second - first * first
            }
            DisorderSpec::Deterministic => 0.0,
        }
    }

    /// Seneta-Heyde limit `c = sqrt(2 / (pi sigma^2))` of `sqrt(n) Z_n / D_n`.
    pub fn seneta_heyde_constant(&self) -> Result<f64> {
        let s2 = self.sigma_squared();
        if s2 <= 0.0 {
            return Err(Error::DegenerateDisorder);
        }
        Ok((2.0 / (PI * s2)).sqrt())
    }

    /// Draws `ln X`.
    #[inline]
    pub fn sample_log_weight<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DisorderSpec::Lognormal { beta } => {
                let z: f64 = rng.sample(StandardNormal);
                beta * z - 0.5 * beta * beta
            }
            DisorderSpec::TwoPoint { a, p } => {
                let u: f64 = rng.random();
                if u < p {
                    a.ln()
                } else {
                    ((1.0 - p * a) / (1.0 - p)).ln()
                }
            }
            DisorderSpec::Deterministic => 0.0,
        }
    }

    /// Cumulative distribution function of `ln X` (step function for discrete laws).
    pub fn log_weight_cdf(&self, y: f64) -> f64 {
        match *self {
            DisorderSpec::Lognormal { beta } => {
                let z = (y + 0.5 * beta * beta) / beta;
                0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
            }
            DisorderSpec::TwoPoint { a, p } => {
                let [(lo, plo), _] = Self::two_point_support(a, p);
                let hi = (1.0 - p * a) / (1.0 - p);
                if y < lo.ln() {
                    0.0
                } else if y < hi.ln() {
                    plo
                } else {
                    1.0
                }
            }
            DisorderSpec::Deterministic => {
                if y < 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))
    }
}

impl fmt::Display for DisorderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DisorderSpec::Lognormal { beta } => write!(f, "lognormal(beta={beta})"),
            DisorderSpec::TwoPoint { a, p } => write!(f, "twopoint(a={a}, p={p})"),
            DisorderSpec::Deterministic => f.write_str("deterministic"),
        }
    }
}
