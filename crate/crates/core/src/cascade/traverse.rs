//! Streaming depth-first traversal of a subtree.
//!
//! Every vertex `u` below the start vertex `v` (including `v` itself at
//! relative level 0) is reported to a [`Collector`] as
//! `(level, log_mass, position)` with
//!
//! - `log_mass = -V_v(u) = sum ln X - level ln 2` over the steps below `v`,
//! - `position` the polygonal displacement accumulated below `v`.
//!
//! Deep traversals are split at relative level [`SPLIT_LEVEL`]: the top part
//! is walked serially, then the `2^SPLIT_LEVEL` subtrees are walked (in
//! parallel when a rayon pool has threads) and merged in canonical vertex
//! order. The split does not depend on the thread count, so results are
//! bit-identical for every pool size.

use std::f64::consts::LN_2;

use rayon::prelude::*;

use super::oracle::WeightOracle;
use super::vertex::Vertex;
use crate::error::Result;
use crate::numerics::{LevelSum, LogSumExp};

pub const SPLIT_LEVEL: usize = 4;

/// Receives the vertices of a traversal. Merging must be associative up to
/// rounding; the traversal always merges in the same order.
pub trait Collector: Send {
    fn record(&mut self, level: usize, log_mass: f64, position: i32);
    fn merge(&mut self, other: Self);
}

#[derive(Clone, Copy)]
struct Frontier {
    code: u64,
    log_mass: f64,
    position: i32,
}

pub fn traverse<C, F>(oracle: &WeightOracle, start: Vertex, levels: usize, make: F) -> Result<C>
where
    C: Collector,
    F: Fn() -> C + Sync,
{
    oracle.check_depth(start.depth() + levels)?;
    let mut collector = make();
    collector.record(0, 0.0, 0);
    let root = Frontier {
        code: start.code(),
        log_mass: 0.0,
        position: 0,
    };
    if levels <= SPLIT_LEVEL + 1 {
        walk(oracle, root, 0, levels, &mut collector, &mut None);
        return Ok(collector);
    }

    let mut frontier = Some(Vec::with_capacity(1 << SPLIT_LEVEL));
    walk(oracle, root, 0, SPLIT_LEVEL, &mut collector, &mut frontier);
    let parts: Vec<C> = frontier
        .unwrap_or_default()
        .into_par_iter()
        .map(|node| {
            let mut part = make();
            walk(oracle, node, SPLIT_LEVEL, levels, &mut part, &mut None);
            part
        })
        .collect();
    for part in parts {
        collector.merge(part);
    }
    Ok(collector)
}

/// Visits the strict descendants of `node` down to relative level `max_level`.
/// When `frontier` is present, vertices at `max_level` are pushed onto it.
fn walk<C: Collector>(
    oracle: &WeightOracle,
    node: Frontier,
    level: usize,
    max_level: usize,
    out: &mut C,
    frontier: &mut Option<Vec<Frontier>>,
) {
    if level >= max_level {
        return;
    }
    let child_level = level + 1;
    for (bit, step) in [(0u64, 1i32), (1u64, -1i32)] {
        let code = (node.code << 1) | bit;
        let child = Frontier {
            code,
            log_mass: node.log_mass + oracle.log_weight_code(code) - LN_2,
            position: node.position + step,
        };
        out.record(child_level, child.log_mass, child.position);
        if child_level < max_level {
            walk(oracle, child, child_level, max_level, out, frontier);
        } else if let Some(f) = frontier.as_mut() {
            f.push(child);
        }
    }
}

/// `Z_j` and `D_j` sums for every relative level `j`.
pub struct LevelSums(pub Vec<LevelSum>);

impl LevelSums {
    pub fn new(levels: usize) -> Self {
        LevelSums(vec![LevelSum::default(); levels + 1])
    }
}

impl Collector for LevelSums {
    #[inline]
    fn record(&mut self, level: usize, log_mass: f64, _position: i32) {
        self.0[level].add(log_mass);
    }

    fn merge(&mut self, other: Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            a.merge(b);
        }
    }
}

/// `ln sum e^{-V}` and `ln sum e^{-V + r x}` at one level.
pub struct TiltedSum {
    level: usize,
    r: f64,
    pub log_z: LogSumExp,
    pub log_tilted: LogSumExp,
}

impl TiltedSum {
    pub fn new(level: usize, r: f64) -> Self {
        Self {
            level,
            r,
            log_z: LogSumExp::default(),
            log_tilted: LogSumExp::default(),
        }
    }
}

impl Collector for TiltedSum {
    #[inline]
    fn record(&mut self, level: usize, log_mass: f64, position: i32) {
        if level == self.level {
            self.log_z.add(log_mass);
            self.log_tilted.add(log_mass + self.r * position as f64);
        }
    }

    fn merge(&mut self, other: Self) {
        self.log_z.merge(&other.log_z);
        self.log_tilted.merge(&other.log_tilted);
    }
}
