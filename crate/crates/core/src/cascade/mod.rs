//! Cascade environments, partition functions and the derivative martingale.
//!
//! For a vertex `v` and depth `k`,
//!
//! ```text
//! Z_k(v) = sum_{|t|=k} prod_{j=1..k} X_{(v*t)|(|v|+j)} 2^{-k}  = sum_t exp(-V_v(t))
//! D_k(v) = sum_{|t|=k} V_v(t) exp(-V_v(t))
//! V_v(t) = k ln 2 - sum_{j=1..k} ln X_{(v*t)|(|v|+j)}
//! ```
//!
//! Both are computed in one streaming traversal with `O(k)` working memory;
//! see the crate docs for why `D` is the boundary-case derivative martingale
//! at critical disorder.

mod oracle;
pub mod traverse;
mod vertex;

use std::f64::consts::LN_2;

use serde::Serialize;

pub use oracle::{WeightOracle, DEFAULT_MAX_DEPTH};
pub use vertex::{Step, Vertex};

use crate::error::{Error, Result};
use crate::numerics::ScaledReal;
use traverse::{traverse, LevelSums};

/// Hard cap on [`enumerate_leaves`].
pub const ENUMERATION_CAP: usize = 16;

/// `ln Z_j(v)` and `D_j(v)` for `j = 0..=k`.
#[derive(Clone, Debug)]
pub struct SubtreeSums {
    pub log_z: Vec<f64>,
    pub d: Vec<ScaledReal>,
}

impl SubtreeSums {
    pub fn levels(&self) -> usize {
        self.log_z.len() - 1
    }

    pub fn z(&self, j: usize) -> f64 {
        self.log_z[j].exp()
    }

    pub fn d(&self, j: usize) -> f64 {
        self.d[j].value()
    }
}

/// One traversal below `v`, producing every level's `Z` and `D`.
pub fn subtree_sums(oracle: &WeightOracle, v: Vertex, k: usize) -> Result<SubtreeSums> {
    let sums = traverse(oracle, v, k, || LevelSums::new(k))?;
    Ok(SubtreeSums {
        log_z: sums.0.iter().map(|s| s.log_z()).collect(),
        d: sums.0.iter().map(|s| s.d_scaled()).collect(),
    })
}

/// `ln Z_k(v)`.
pub fn log_partition_function(oracle: &WeightOracle, v: Vertex, k: usize) -> Result<f64> {
    Ok(subtree_sums(oracle, v, k)?.log_z[k])
}

/// `Z_k(v)`, with `Z_0(v) = 1`.
pub fn partition_function(oracle: &WeightOracle, v: Vertex, k: usize) -> Result<f64> {
    log_partition_function(oracle, v, k).map(f64::exp)
}

/// `D_k(v)`, with `D_0(v) = 0`.
pub fn derivative_martingale(oracle: &WeightOracle, v: Vertex, k: usize) -> Result<f64> {
    Ok(subtree_sums(oracle, v, k)?.d(k))
}

/// Trajectories `Z_1..Z_n`, `D_1..D_n` at the root and the Seneta-Heyde
/// ratios `R_k = sqrt(k) Z_k / D_k` (absent where `D_k <= 0`).
///
/// Entry `k` lives at index `k - 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MartingaleSeries {
    pub depth_max: usize,
    pub log_z: Vec<f64>,
    pub z: Vec<f64>,
    pub d: Vec<f64>,
    pub ratio: Vec<Option<f64>>,
}

impl MartingaleSeries {
    pub fn from_sums(sums: &SubtreeSums) -> Self {
        let n = sums.levels();
        let log_z: Vec<f64> = sums.log_z[1..].to_vec();
        let z: Vec<f64> = log_z.iter().map(|l| l.exp()).collect();
        let d: Vec<f64> = (1..=n).map(|k| sums.d(k)).collect();
        let ratio = (1..=n)
            .map(|k| {
                let dk = d[k - 1];
                (dk > 0.0).then(|| (k as f64).sqrt() * z[k - 1] / dk)
            })
            .collect();
        Self {
            depth_max: n,
            log_z,
            z,
            d,
            ratio,
        }
    }

    pub fn z_at(&self, k: usize) -> f64 {
        self.z[k - 1]
    }

    pub fn d_at(&self, k: usize) -> f64 {
        self.d[k - 1]
    }

    pub fn ratio_at(&self, k: usize) -> Option<f64> {
        self.ratio[k - 1]
    }
}

pub fn martingale_series(oracle: &WeightOracle, n_max: usize) -> Result<MartingaleSeries> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("martingale series needs n_max >= 1".into()));
    }
    Ok(MartingaleSeries::from_sums(&subtree_sums(oracle, Vertex::root(), n_max)?))
}

/// One leaf of the subtree below `v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeafRecord {
    /// Path `t` relative to `v`.
    pub path: Vertex,
    /// `prod_j X_{(v*t)|(|v|+j)}` in linear space.
    pub product: f64,
    /// `V_v(t)`.
    pub brw_position: f64,
}

/// Full enumeration of the `2^k` leaves below `v`, each path recomputed from
/// scratch. Brute-force reference for the streaming traversal.
pub fn enumerate_leaves(oracle: &WeightOracle, v: Vertex, k: usize) -> Result<Vec<LeafRecord>> {
    if k > ENUMERATION_CAP {
        return Err(Error::EnumerationCap(k));
    }
    oracle.check_depth(v.depth() + k)?;
    Vertex::level(k)
        .map(|t| {
            let mut product = 1.0;
            let mut log_sum = 0.0;
            for j in 1..=k {
                let lw = oracle.log_weight_at(v.concat(&t.prefix(j)))?;
                product *= lw.exp();
                log_sum += lw;
            }
            Ok(LeafRecord {
                path: t,
                product,
                brw_position: k as f64 * LN_2 - log_sum,
            })
        })
        .collect()
}
