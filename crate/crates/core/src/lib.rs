//! Tree polymers on the binary tree.
//!
//! A cascade environment attaches an i.i.d. mean-one positive weight `X_v` to
//! every vertex `v` of the rooted binary tree. From it this crate computes
//!
//! - the partition functions `Z_n(v)` and derivative martingales `D_n(v)` by
//!   streaming depth-first traversal ([`cascade`]),
//! - the finite-volume polymer measures `prob_n`, the infinite-volume
//!   estimate built from `D_N`, character expectations and exact path
//!   sampling ([`measure`]),
//! - the lognormal strong-disorder Laplace rates ([`laplace`]),
//! - Monte Carlo ensembles and the statistical reports built on them
//!   ([`stats`]).
//!
//! # Derivative martingale convention
//!
//! Weights are mapped to a branching random walk by assigning to a vertex `u`
//! at depth `n` the position
//!
//! ```text
//! V(u) = n ln 2 - sum_{j=1..n} ln X_{u|j}
//! ```
//!
//! so that `Z_n = sum_{|u|=n} exp(-V(u))` and the derivative martingale is
//! `D_n = sum_{|u|=n} V(u) exp(-V(u))`. Since `E[sum_{|u|=1} exp(-V(u))] = E X = 1`
//! and `E[sum_{|u|=1} V(u) exp(-V(u))] = ln 2 - E[X ln X]`, the walk is in the
//! boundary case exactly when `E[X ln X] = ln 2`, i.e. at critical disorder.

pub mod cascade;
pub mod disorder;
mod error;
pub mod laplace;
pub mod measure;
pub mod numerics;
pub mod seed;
pub mod stats;

pub use cascade::{MartingaleSeries, Step, Vertex, WeightOracle};
pub use disorder::{critical_beta, DisorderSpec, Regime};
pub use error::{Error, Result};
pub use laplace::LaplaceCurve;
pub use measure::{Character, PathSample, PathSampler, Provenance, RestrictedMeasure};

/// Version string embedded in every output artifact.
pub const TOOL_VERSION: &str = concat!("treepolymer ", env!("CARGO_PKG_VERSION"));

/// Version of the CSV/JSON/SVG output schemas.
pub const SCHEMA_VERSION: u32 = 1;
