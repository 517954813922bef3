//! Degree extraction `f_0(x) = qx + h(x)` for solenoidal maps sampled on the baseleaf.

use alloc::format;
use alloc::vec::Vec;
use num_traits::Float;

use crate::{Chain, Error, Frequency, Result, TAU};

/// Real samples `values[k] = f_0(start + k·step)`.
#[derive(Debug, Clone)]
pub struct BaseleafSamples {
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl BaseleafSamples {
    /// Samples `f` on `periods` copies of the top-level period `2π n_J`, with
    /// `per_period` points per period.
    pub fn from_fn(f: impl Fn(f64) -> f64, chain: &Chain, periods: usize, per_period: usize) -> Self {
        let step = TAU * chain.top() as f64 / per_period as f64;
        let values = (0..periods * per_period + 1).map(|k| f(k as f64 * step)).collect();
        Self { start: 0.0, step, values }
    }

    pub fn x(&self, k: usize) -> f64 {
        self.start + self.step * k as f64
    }
}

#[derive(Debug, Clone)]
pub struct DegreeDecomposition {
    pub degree: Frequency,
    /// `h(x_k) = f_0(x_k) - q x_k` on the sample grid.
    pub remainder: Vec<f64>,
    /// `max_k |h(x_k + 2π n_J) - h(x_k)|`, the residual drift.
    pub drift: f64,
}

/// Finds the chain rational `k/n` whose de-trended remainder is periodic at
/// the top level.
///
/// The slope estimate is `(f(x + 2πn_J) - f(x)) / (2πn_J)`, which is exact for
/// remainders in `Per_{n_J}`. Among the nearest rationals with denominator a
/// chain level, the one with the smallest remainder sup-norm wins. `tol`
/// bounds the admissible drift of the remainder relative to `1 + sup|h|`.
pub fn extract_degree(samples: &BaseleafSamples, chain: &Chain, tol: f64) -> Result<DegreeDecomposition> {
    let period = TAU * chain.top() as f64;
    let shift = period / samples.step;
    let s = Float::round(shift) as usize;
    if (shift - s as f64).abs() > 1e-9 * shift.max(1.0) || s == 0 {
        return Err(Error::InvalidInput("sample step must divide 2π n_J".into()));
    }
    if samples.values.len() < 2 * s + 1 {
        return Err(Error::InvalidInput(format!(
            "need at least two top-level periods ({} samples), got {}",
            2 * s + 1,
            samples.values.len()
        )));
    }
    let v = &samples.values;
    let count = v.len() - s;
    let estimate = (0..count).map(|k| (v[k + s] - v[k]) / period).sum::<f64>() / count as f64;

    let mut best: Option<(Frequency, f64)> = None;
    for &n in chain.levels() {
        let k = Float::round(estimate * n as f64);
        if k.abs() > 9.0e15 {
            return Err(Error::NotSolenoidal("slope too large".into()));
        }
        let cand = Frequency::new(k as i64, n);
        let spread = remainder_spread(samples, cand);
        let better = match best {
            None => true,
            Some((b, bs)) => spread < bs * (1.0 - 1e-12) || (spread <= bs * (1.0 + 1e-12) && cand.den() < b.den()),
        };
        if better {
            best = Some((cand, spread));
        }
    }
    let (degree, _) = best.expect("chains are nonempty");
    let q = degree.to_f64();
    let remainder: Vec<f64> = (0..v.len()).map(|k| v[k] - q * samples.x(k)).collect();
    let drift = (0..count).map(|k| (remainder[k + s] - remainder[k]).abs()).fold(0.0, f64::max);
    let scale = 1.0 + remainder.iter().map(|h| h.abs()).fold(0.0, f64::max);
    if drift > tol * scale {
        return Err(Error::NotSolenoidal(format!(
            "best slope {degree} leaves drift {drift:e} over one top-level period"
        )));
    }
    Ok(DegreeDecomposition { degree, remainder, drift })
}

fn remainder_spread(samples: &BaseleafSamples, q: Frequency) -> f64 {
    let q = q.to_f64();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (k, &y) in samples.values.iter().enumerate() {
        let r = y - q * samples.x(k);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    hi - lo
}
