//! Uniform square grids of complex samples on `[-R, R]²`.

use alloc::vec::Vec;
use num_traits::Float;

use crate::{Complex64, Error, Result};

/// Samples at the cell centers `-R + (i + ½)h`, `h = 2R/N`, row-major in `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    half_width: f64,
    n: usize,
    support_radius: f64,
    values: Vec<Complex64>,
}

impl GridField {
    /// `N` must be a power of two and `support_radius < R`. Values outside the
    /// support radius are set to zero.
    pub fn new(half_width: f64, n: usize, support_radius: f64, values: Vec<Complex64>) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(alloc::format!("grid size {n} must be a power of two >= 2")));
        }
        if !(0.0..half_width).contains(&support_radius) {
            return Err(Error::InvalidInput(alloc::format!(
                "support radius {support_radius} must lie strictly inside half width {half_width}"
            )));
        }
        if values.len() != n * n {
            return Err(Error::InvalidInput(alloc::format!("expected {} values, got {}", n * n, values.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite grid value".into()));
        }
        let mut g = GridField { half_width, n, support_radius, values };
        g.clip_to_support();
        Ok(g)
    }

    pub fn zeros(half_width: f64, n: usize, support_radius: f64) -> Result<Self> {
        Self::new(half_width, n, support_radius, alloc::vec![Complex64::new(0.0, 0.0); n * n])
    }

    pub fn from_fn(half_width: f64, n: usize, support_radius: f64, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        let h = 2.0 * half_width / n as f64;
        let values = (0..n * n)
            .map(|i| {
                let z = Complex64::new(-half_width + ((i % n) as f64 + 0.5) * h, -half_width + ((i / n) as f64 + 0.5) * h);
                if z.norm() > support_radius {
                    Complex64::new(0.0, 0.0)
                } else {
                    f(z)
                }
            })
            .collect();
        Self::new(half_width, n, support_radius, values)
    }

    /// `k·χ_{|z|<r}` with each cell weighted by its covered area fraction
    /// (16×16 subsamples on boundary cells).
    pub fn disk_indicator(half_width: f64, n: usize, r: f64, k: Complex64) -> Result<Self> {
        let h = 2.0 * half_width / n as f64;
        let sub = 16;
        let coverage = |c: Complex64| -> f64 {
            let d = c.norm();
            if d + h * 0.71 < r {
                return 1.0;
            }
            if d - h * 0.71 > r {
                return 0.0;
            }
            let mut hits = 0;
            for a in 0..sub {
                for b in 0..sub {
                    let x = c.re + ((a as f64 + 0.5) / sub as f64 - 0.5) * h;
                    let y = c.im + ((b as f64 + 0.5) / sub as f64 - 0.5) * h;
                    if x * x + y * y < r * r {
                        hits += 1;
                    }
                }
            }
            hits as f64 / (sub * sub) as f64
        };
        Self::from_fn(half_width, n, r + h, |z| k * coverage(z))
    }

    fn clip_to_support(&mut self) {
        let (n, r) = (self.n, self.support_radius);
        for i in 0..n * n {
            if self.point(i).norm() > r {
                self.values[i] = Complex64::new(0.0, 0.0);
            }
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Center of the cell with row-major index `i`.
    pub fn point(&self, i: usize) -> Complex64 {
        let h = self.step();
        Complex64::new(
            -self.half_width + ((i % self.n) as f64 + 0.5) * h,
            -self.half_width + ((i / self.n) as f64 + 0.5) * h,
        )
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.n * self.n).map(move |i| self.point(i))
    }

    /// Same geometry, new values.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Self::new(self.half_width, self.n, self.support_radius, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Discrete `L²` norm `(Σ |v|² h²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        l2(&self.values) * self.step()
    }

    /// Bilinear interpolation of `values` at `z`; `None` outside the hull of
    /// the cell centers.
    pub fn interpolate(&self, z: Complex64) -> Option<Complex64> {
        bilinear(&self.values, self.n, self.half_width, z)
    }
}

pub(crate) fn l2(v: &[Complex64]) -> f64 {
    Float::sqrt(v.iter().map(|c| c.norm_sqr()).sum::<f64>())
}

/// Bilinear interpolation on the cell-center lattice of a `[-R, R]²` grid.
pub(crate) fn bilinear(values: &[Complex64], n: usize, half_width: f64, z: Complex64) -> Option<Complex64> {
    let h = 2.0 * half_width / n as f64;
    let u = (z.re + half_width) / h - 0.5;
    let v = (z.im + half_width) / h - 0.5;
    let top = (n - 1) as f64;
    if !(u >= 0.0 && v >= 0.0 && u <= top && v <= top) {
        return None;
    }
    let i = (Float::floor(u) as usize).min(n - 2);
    let j = (Float::floor(v) as usize).min(n - 2);
    let (fu, fv) = (u - i as f64, v - j as f64);
    let at = |a: usize, b: usize| values[b * n + a];
    Some(
        at(i, j) * ((1.0 - fu) * (1.0 - fv))
            + at(i + 1, j) * (fu * (1.0 - fv))
            + at(i, j + 1) * ((1.0 - fu) * fv)
            + at(i + 1, j + 1) * (fu * fv),
    )
}
