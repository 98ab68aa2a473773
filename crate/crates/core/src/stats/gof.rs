//! Goodness-of-fit statistics.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// One-sample Kolmogorov-Smirnov distance `sup_x |F_N(x) - F(x)|`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Kolmogorov-Smirnov distance between the law of `(s)_n / sqrt(n)` and the
/// standard normal, with the empirical CDF evaluated at the midpoints
/// between lattice sites (continuity correction).
///
/// `(s)_n` lives on `{-n, -n+2, .., n}`, so the plain statistic is bounded
/// below by half the largest atom (about `0.4/sqrt(n)`) no matter how close
/// the law is to Gaussian. Comparing `P((s)_n <= k)` with `Phi((k+1)/sqrt(n))`
/// removes that floor.
pub fn lattice_ks_statistic(endpoints: &[i64], n: usize) -> Result<f64> {
    if endpoints.len() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            got: endpoints.len(),
        });
    }
    let mut counts = vec![0u64; n + 1];
    for &x in endpoints {
        let slot = (x + n as i64) / 2;
        if x.abs() > n as i64 || (x + n as i64) % 2 != 0 {
            return Err(Error::InvalidArgument(format!("endpoint {x} is not a lattice site for n = {n}")));
        }
        counts[slot as usize] += 1;
    }
    let total = endpoints.len() as f64;
    let scale = (n as f64).sqrt();
    let mut cumulative = 0u64;
    let mut d = 0.0f64;
    for (i, &c) in counts.iter().enumerate() {
        cumulative += c;
        let k = 2 * i as i64 - n as i64;
        let midpoint = (k + 1) as f64 / scale;
        d = d.max((cumulative as f64 / total - standard_normal_cdf(midpoint)).abs());
    }
    // Below the lowest site the empirical CDF is 0.
    d = d.max(standard_normal_cdf((-(n as f64) - 1.0) / scale));
    Ok(d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Number of cells with expected count below 5 that were pooled.
    pub pooled_cells: usize,
}

/// Pearson chi-square goodness of fit of `observed` counts against cell
/// probabilities. Cells with expected count below 5 are pooled into one cell.
pub fn chi_square_test(observed: &[u64], probabilities: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != probabilities.len() || observed.len() < 2 {
        return Err(Error::InvalidArgument(
            "chi-square needs matching observed/probability vectors of length >= 2".into(),
        ));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::TooFewSamples { required: 1, got: 0 });
    }
    let total = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pooled_obs, mut pooled_exp, mut pooled) = (0.0, 0.0, 0);
    for (&o, &p) in observed.iter().zip(probabilities) {
        let e = p * total;
        if e < 5.0 {
            pooled_obs += o as f64;
            pooled_exp += e;
            pooled += 1;
        } else {
            cells.push((o as f64, e));
        }
    }
    if pooled > 0 {
        if pooled_exp >= 5.0 || cells.is_empty() {
            cells.push((pooled_obs, pooled_exp));
        } else {
            let smallest = cells
                .iter_mut()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty");
            smallest.0 += pooled_obs;
            smallest.1 += pooled_exp;
        }
    }
    if cells.len() < 2 {
        return Err(Error::InvalidArgument("chi-square needs at least two cells after pooling".into()));
    }
    let statistic: f64 = cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    Ok(ChiSquareResult {
        statistic,
        degrees_of_freedom: dof,
        p_value: dist.sf(statistic),
        pooled_cells: pooled,
    })
}
