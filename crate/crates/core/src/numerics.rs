//! Log-space accumulation and small numerical helpers.

use std::f64::consts::LN_2;

/// `ln(e^a + e^b)` without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln sum_i e^{x_i}`; empty input gives `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    let mut sum = NeumaierSum::default();
    for &v in values {
        sum.add((v - max).exp());
    }
    max + sum.value().ln()
}

/// `ln cosh x`, stable for large `|x|`.
#[inline]
pub fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn scale(&mut self, factor: f64) {
        self.sum *= factor;
        self.comp *= factor;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// A real number stored as `mantissa * e^{log_scale}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledReal {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl ScaledReal {
    pub fn value(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa * self.log_scale.exp()
        }
    }
}

/// Per-level accumulator for `Z = sum e^{-V}` and `D = sum V e^{-V}`.
///
/// Terms are carried relative to a running shift (the largest `-V` seen so
/// far), so neither sum over- or underflows regardless of depth. `D` mixes
/// signs and is summed with compensation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSum {
    shift: f64,
    z: NeumaierSum,
    d: NeumaierSum,
}

impl Default for LevelSum {
    fn default() -> Self {
        Self {
            shift: f64::NEG_INFINITY,
            z: NeumaierSum::default(),
            d: NeumaierSum::default(),
        }
    }
}

impl LevelSum {
    /// Adds the vertex with `log_mass = -V`.
    #[inline]
    pub fn add(&mut self, log_mass: f64) {
        if log_mass > self.shift {
            self.rescale(log_mass);
        }
        let w = (log_mass - self.shift).exp();
        self.z.add(w);
        self.d.add(-log_mass * w);
    }

    #[inline]
    fn rescale(&mut self, new_shift: f64) {
        if self.shift != f64::NEG_INFINITY {
            let factor = (self.shift - new_shift).exp();
            self.z.scale(factor);
            self.d.scale(factor);
        }
        self.shift = new_shift;
    }

    pub fn merge(&mut self, other: &LevelSum) {
        if other.shift == f64::NEG_INFINITY {
            return;
        }
        let mut other = *other;
        if other.shift > self.shift {
            self.rescale(other.shift);
        } else if other.shift < self.shift {
            other.rescale(self.shift);
        }
        self.z.merge(&other.z);
        self.d.merge(&other.d);
    }

    /// `ln sum e^{-V}`.
    pub fn log_z(&self) -> f64 {
        self.shift + self.z.value().ln()
    }

    /// `sum V e^{-V}` in scaled form.
    pub fn d_scaled(&self) -> ScaledReal {
        ScaledReal {
            mantissa: self.d.value(),
            log_scale: self.shift,
        }
    }
}

/// Streaming `ln sum e^{x_i}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogSumExp {
    shift: f64,
    sum: NeumaierSum,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            shift: f64::NEG_INFINITY,
            sum: NeumaierSum::default(),
        }
    }
}

impl LogSumExp {
    #[inline]
    pub fn add(&mut self, x: f64) {
        if x > self.shift {
            if self.shift != f64::NEG_INFINITY {
                self.sum.scale((self.shift - x).exp());
            }
            self.shift = x;
        }
        self.sum.add((x - self.shift).exp());
    }

    pub fn merge(&mut self, other: &LogSumExp) {
        if other.shift == f64::NEG_INFINITY {
            return;
        }
        let mut other = *other;
        if other.shift > self.shift {
            if self.shift != f64::NEG_INFINITY {
                self.sum.scale((self.shift - other.shift).exp());
            }
            self.shift = other.shift;
        } else if other.shift < self.shift {
            other.sum.scale((other.shift - self.shift).exp());
        }
        self.sum.merge(&other.sum);
    }

    pub fn value(&self) -> f64 {
        self.shift + self.sum.value().ln()
    }
}

/// Richardson-extrapolated central-difference derivatives at `x`.
///
/// Uses steps `h`, `h/2`, `h/4`, eliminating the `h^2` and `h^4` error terms.
/// Returns `(f'(x), f''(x))`.
pub fn richardson_derivatives<F>(f: F, x: f64, h: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let f0 = f(x);
    let steps = [h, h / 2.0, h / 4.0];
    let mut d1 = [0.0; 3];
    let mut d2 = [0.0; 3];
    for (i, &s) in steps.iter().enumerate() {
        let fp = f(x + s);
        let fm = f(x - s);
        d1[i] = (fp - fm) / (2.0 * s);
        d2[i] = (fp - 2.0 * f0 + fm) / (s * s);
    }
    let extrapolate = |d: [f64; 3]| {
        let r1 = (4.0 * d[1] - d[0]) / 3.0;
        let r2 = (4.0 * d[2] - d[1]) / 3.0;
        (16.0 * r2 - r1) / 15.0
    };
    (extrapolate(d1), extrapolate(d2))
}

/// Linear-interpolation quantile (type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            let frac = pos - lo as f64;
            sorted[lo] + frac * (sorted[hi] - sorted[lo])
        }
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}
