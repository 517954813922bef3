//! A vertically continuous Beltrami coefficient that is not renormalizable.
//!
//! With `s_n = x/n!` and `g_n = e^{-y²/n!²}`, the truncation
//! `w(z) = z + (1/2e) Σ_{n≤N} sin(s_n) g_n` solves `w_z̄ = μ w_z` for
//!
//! ```text
//! μ = (1/2e) Σ [cos s_n - (2iy/n!) sin s_n] g_n / (2 n!)
//!     / (1 + (1/2e) Σ [cos s_n + (2iy/n!) sin s_n] g_n / (2 n!)).
//! ```

use alloc::vec::Vec;
use num_traits::Float;

use crate::admission::{admit_from_parts, AdmissionReport};
use crate::renorm::{ren_norm_sampled, PeriodicField, RenNormReport, SupGrid};
use crate::series::SupBracket;
use crate::{Chain, Complex64, Error, Result};

const E: f64 = core::f64::consts::E;

/// The `N`-term truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    factorials: Vec<f64>,
    period: u64,
}

impl Counterexample {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("truncation N must be at least 1".into()));
        }
        let chain = Chain::factorial(n)?;
        Ok(Counterexample { factorials: chain.levels().iter().map(|&k| k as f64).collect(), period: chain.top() })
    }

    pub fn terms(&self) -> usize {
        self.factorials.len()
    }

    /// The chain `(1!, 2!, ..., N!)`.
    pub fn chain(&self) -> Chain {
        Chain::factorial(self.terms()).expect("validated in new")
    }

    /// The quotient formula for `μ`.
    pub fn mu(&self, z: Complex64) -> Complex64 {
        let (x, y) = (z.re, z.im);
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for &f in &self.factorials {
            let (s, c) = Float::sin_cos(x / f);
            let g = Float::exp(-(y / f) * (y / f)) / (2.0 * f);
            let t = 2.0 * y / f * s;
            num += Complex64::new(c, -t) * g;
            den += Complex64::new(c, t) * g;
        }
        let k = 1.0 / (2.0 * E);
        num * k / (1.0 + den * k)
    }

    /// `(w_z̄, w_z)` from the partial derivatives of [`Self::solution`].
    pub fn derivatives(&self, z: Complex64) -> (Complex64, Complex64) {
        let (x, y) = (z.re, z.im);
        let k = 1.0 / (2.0 * E);
        let mut wx = Complex64::new(1.0, 0.0);
        let mut wy = Complex64::new(0.0, 1.0);
        for &f in &self.factorials {
            let (s, c) = Float::sin_cos(x / f);
            let g = Float::exp(-(y / f) * (y / f));
            wx += k * c / f * g;
            wy += k * s * (-2.0 * y / (f * f)) * g;
        }
        let i = Complex64::i();
        ((wx + i * wy) * 0.5, (wx - i * wy) * 0.5)
    }

    pub fn solution(&self, z: Complex64) -> Complex64 {
        let s: f64 = self
            .factorials
            .iter()
            .map(|&f| Float::sin(z.re / f) * Float::exp(-(z.im / f) * (z.im / f)))
            .sum();
        z + s / (2.0 * E)
    }

    /// `|w_z̄ - μ w_z|`, with `w_z`, `w_z̄` from central differences of
    /// [`Self::solution`] at step `h`.
    pub fn beltrami_residual_fd(&self, z: Complex64, h: f64) -> f64 {
        let wx = (self.solution(z + h) - self.solution(z - h)) / (2.0 * h);
        let wy = (self.solution(z + Complex64::new(0.0, h)) - self.solution(z - Complex64::new(0.0, h))) / (2.0 * h);
        let i = Complex64::i();
        let wz = (wx - i * wy) * 0.5;
        let wzb = (wx + i * wy) * 0.5;
        (wzb - self.mu(z) * wz).norm()
    }

    /// `s/(1 - s)` with `s = (1/2e) Σ_{n≤N} 1/n!`; below `(e-1)/(e+1)`.
    pub fn sup_upper_bound(&self) -> f64 {
        let s = self.factorials.iter().map(|f| 1.0 / f).sum::<f64>() / (2.0 * E);
        s / (1.0 - s)
    }

    /// Grid max of `|μ|`: `x_per_turn` points per `2π` over `[0, 2πN!)`.
    pub fn sup_grid_estimate(&self, x_per_turn: usize, ys: &[f64]) -> f64 {
        let m = x_per_turn * self.period as usize;
        let span = crate::TAU * self.period as f64;
        let mut best = 0.0f64;
        for &y in ys {
            for k in 0..m {
                best = best.max(self.mu(Complex64::new(span * k as f64 / m as f64, y)).norm());
            }
        }
        best
    }

    /// Heights `0, ±k!·{1/4, 1/2, 1, 3/2}` for every `k ≤ N`.
    pub fn default_heights(&self) -> Vec<f64> {
        let mut ys = alloc::vec![0.0];
        for &f in &self.factorials {
            for t in [0.25, 0.5, 1.0, 1.5] {
                ys.push(t * f);
                ys.push(-t * f);
            }
        }
        ys
    }

    pub fn default_sup_grid(&self) -> SupGrid {
        SupGrid { x_per_turn: 16, ys: self.default_heights() }
    }

    /// Renormalized norm on `(j!)` with every `I_n` an exact fiber average of
    /// the `2πN!`-periodic quotient.
    pub fn ren_norm(&self, grid: &SupGrid) -> Result<RenNormReport> {
        ren_norm_sampled(self, &self.chain(), grid)
    }

    pub fn admission(&self) -> Result<AdmissionReport> {
        let grid = self.default_sup_grid();
        let lower = self.sup_grid_estimate(grid.x_per_turn, &grid.ys);
        let sup = SupBracket { lower, upper: self.sup_upper_bound() };
        Ok(admit_from_parts(sup, self.ren_norm(&grid)?, false, true))
    }
}

impl PeriodicField for Counterexample {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.mu(Complex64::new(x, y))
    }

    fn period_level(&self) -> u64 {
        self.period
    }
}
