//! Laplace rates `F(r) = lim (1/n) ln E_{prob_n} e^{r (s)_n}` for lognormal
//! disorder `X = exp(beta Z - beta^2/2)`.
//!
//! Under strong disorder (`beta >= beta_c`) the rate is
//!
//! ```text
//! F(r) = r tanh(r h) + beta^2 h - beta beta_c
//! ```
//!
//! where `h = h(r) > 0` solves
//!
//! ```text
//! g(h) = beta^2 h^2 + 2 r h tanh(r h) - 2 ln cosh(r h) - beta_c^2 = 0.
//! ```
//!
//! `g(0) = -beta_c^2 < 0` and `g'(h) = 2h (beta^2 + r^2 sech^2(r h)) > 0` for
//! `h > 0`, so the positive root is unique and bracketing always succeeds.
//! Under weak disorder the rate is `ln cosh r`.

mod plot;

use std::f64::consts::LN_2;

use serde::Serialize;

pub use plot::render_svg;

use crate::cascade::traverse::{traverse, TiltedSum};
use crate::cascade::{Vertex, WeightOracle};
use crate::disorder::critical_beta;
use crate::error::{Error, Result};
use crate::numerics::log_cosh;

/// Maximum residual `|g(h)|` accepted from [`solve_h`].
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;

const MAX_ITERATIONS: usize = 200;

fn check_beta(beta: f64) -> Result<()> {
    let critical = critical_beta();
    if !(beta >= critical) || !beta.is_finite() {
        return Err(Error::InvalidBeta { beta, critical });
    }
    Ok(())
}

/// `g(h)` and `g'(h)`.
fn residual(beta: f64, r: f64, h: f64) -> (f64, f64) {
    let bc2 = 2.0 * LN_2;
    let x = r * h;
    let t = x.tanh();
    let g = beta * beta * h * h + 2.0 * x * t - 2.0 * log_cosh(x) - bc2;
    let sech2 = 1.0 - t * t;
    let dg = 2.0 * h * (beta * beta + r * r * sech2);
    (g, dg)
}

/// Positive root of the implicit equation.
pub fn solve_h(beta: f64, r: f64) -> Result<f64> {
    solve_h_from(beta, r, None)
}

/// [`solve_h`] with an optional starting guess used to tighten the bracket.
pub fn solve_h_from(beta: f64, r: f64, guess: Option<f64>) -> Result<f64> {
    check_beta(beta)?;
    if !r.is_finite() {
        return Err(Error::InvalidArgument(format!("r must be finite, got {r}")));
    }
    if r == 0.0 {
        return Ok(critical_beta() / beta);
    }

    let (mut lo, mut hi) = match guess.filter(|g| g.is_finite() && *g > 0.0) {
        Some(g) if residual(beta, r, 0.5 * g).0 < 0.0 && residual(beta, r, 2.0 * g).0 > 0.0 => {
            (0.5 * g, 2.0 * g)
        }
        _ => {
            let mut hi = (2.0 * critical_beta() / beta).max(1.0);
            let mut expansions = 0;
            while residual(beta, r, hi).0 <= 0.0 {
                hi *= 2.0;
                expansions += 1;
                if expansions > 1000 {
                    return Err(Error::NoConvergence {
                        beta,
                        r,
                        residual: f64::NAN,
                    });
                }
            }
            (0.0, hi)
        }
    };

    // Newton steps safeguarded by bisection.
    let mut h = 0.5 * (lo + hi);
    for _ in 0..MAX_ITERATIONS {
        let (g, dg) = residual(beta, r, h);
        if g == 0.0 {
            return Ok(h);
        }
        if g < 0.0 {
            lo = h;
        } else {
            hi = h;
        }
        let newton = h - g / dg;
        let next = if newton > lo && newton < hi && dg > 0.0 {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == h || hi - lo <= f64::EPSILON * h {
            break;
        }
        h = next;
    }
    let (g, _) = residual(beta, r, h);
    if g.abs() > RESIDUAL_TOLERANCE {
        return Err(Error::NoConvergence { beta, r, residual: g });
    }
    Ok(h)
}

fn rate_at(beta: f64, r: f64, h: f64) -> f64 {
    r * (r * h).tanh() + beta * beta * h - beta * critical_beta()
}

/// Strong-disorder Laplace rate `F(r)`.
pub fn laplace_rate(beta: f64, r: f64) -> Result<f64> {
    let h = solve_h(beta, r)?;
    Ok(rate_at(beta, r, h))
}

/// Weak-disorder (and disorder-free) rate `ln cosh r`.
pub fn weak_disorder_rate(r: f64) -> f64 {
    log_cosh(r)
}

/// Conjectured diffusive variance: 1 below `beta_c`, `(2 beta beta_c - beta_c^2)/beta^2` above.
pub fn asymptotic_variance(beta: f64) -> f64 {
    let bc = critical_beta();
    if beta < bc {
        1.0
    } else {
        (2.0 * beta * bc - bc * bc) / (beta * beta)
    }
}

/// `h(r)` and `F(r)` on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaplaceCurve {
    pub beta: f64,
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    pub f: Vec<f64>,
    /// Grid indices where the solver failed; their `h` and `F` are NaN.
    pub failures: Vec<usize>,
}

/// Uniform grid of `steps` points from `r_min` to `r_max`. Symmetric ranges
/// give exactly symmetric grids.
pub fn uniform_grid(r_min: f64, r_max: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if r_min == -r_max {
                r_max * (2.0 * i as f64 - last) / last
            } else {
                (r_min * (last - i as f64) + r_max * i as f64) / last
            }
        })
        .collect()
}

/// Solves along the grid, warm-starting each point from its neighbour.
pub fn laplace_curve(beta: f64, r_min: f64, r_max: f64, steps: usize) -> Result<LaplaceCurve> {
    check_beta(beta)?;
    if steps < 2 || !(r_min < r_max) {
        return Err(Error::InvalidArgument(format!(
            "need steps >= 2 and r_min < r_max (got {steps}, [{r_min}, {r_max}])"
        )));
    }
    let r = uniform_grid(r_min, r_max, steps);
    let mut h = Vec::with_capacity(steps);
    let mut f = Vec::with_capacity(steps);
    let mut failures = Vec::new();
    let mut guess = None;
    for (i, &ri) in r.iter().enumerate() {
        match solve_h_from(beta, ri, guess) {
            Ok(hi) => {
                h.push(hi);
                f.push(rate_at(beta, ri, hi));
                guess = Some(hi);
            }
            Err(_) => {
                h.push(f64::NAN);
                f.push(f64::NAN);
                failures.push(i);
            }
        }
    }
    Ok(LaplaceCurve {
        beta,
        r,
        h,
        f,
        failures,
    })
}

impl LaplaceCurve {
    pub fn write_csv<W: std::io::Write>(&self, mut out: W, header: &[String]) -> std::io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "# beta={}", self.beta)?;
        let mut csv = csv::Writer::from_writer(out);
        csv.write_record(["r", "h", "F", "ln_cosh_r"])?;
        for i in 0..self.r.len() {
            csv.write_record([
                self.r[i].to_string(),
                self.h[i].to_string(),
                self.f[i].to_string(),
                weak_disorder_rate(self.r[i]).to_string(),
            ])?;
        }
        csv.flush()
    }
}

/// `(1/n) ln E_{prob_n} e^{r (s)_n}` for one environment, computed exactly by
/// a tilted traversal.
pub fn empirical_laplace_rate(oracle: &WeightOracle, n: usize, r: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("empirical Laplace rate needs n >= 1".into()));
    }
    let sums = traverse(oracle, Vertex::root(), n, || TiltedSum::new(n, r))?;
    Ok((sums.log_tilted.value() - sums.log_z.value()) / n as f64)
}
