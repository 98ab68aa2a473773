use thiserror::Error;

use crate::disorder::Regime;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid disorder spec: {0}")]
    InvalidSpec(String),

    #[error("degenerate disorder: sigma^2 = E[X ln^2 X] - (E[X ln X])^2 is zero")]
    DegenerateDisorder,

    #[error("the root vertex carries no weight")]
    RootVertex,

    #[error("depth {requested} exceeds the configured cap {cap}")]
    DepthLimit { requested: usize, cap: usize },

    #[error("leaf enumeration depth {0} exceeds the hard cap of 16")]
    EnumerationCap(usize),

    #[error("character level {level} exceeds the cap of {cap}")]
    CharacterCap { level: usize, cap: usize },

    #[error(
        "infinite-volume normalizer sum_u D_N(u) prod X_u 2^-m = {value:e} is not positive; \
         N is too small for this environment"
    )]
    NonPositiveNormalizer { value: f64 },

    #[error("beta = {beta} is below the critical value {critical}; the implicit equation needs strong disorder")]
    InvalidBeta { beta: f64, critical: f64 },

    #[error("root finder did not converge (beta = {beta}, r = {r}, residual = {residual:e})")]
    NoConvergence { beta: f64, r: f64, residual: f64 },

    #[error("regime mismatch: {operation} requires {expected} disorder, spec is {actual}")]
    RegimeMismatch {
        operation: &'static str,
        expected: &'static str,
        actual: Regime,
    },

    #[error("at least {required} samples required, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
