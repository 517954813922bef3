//! Planar Beltrami solver at one level.
//!
//! The normal solution of `f_z̄ = μ f_z` is `f = z + P h` with `h = f_z̄` the
//! fixed point of `h = μ(1 + S h)`, where `S` is the Beurling transform and
//! `P h(ζ) = C h(ζ) - C h(0)`, `C h(ζ) = (1/π) ∬ h(z) / (ζ - z) dx dy`.

use alloc::vec::Vec;
use num_traits::Float;

use crate::fft::{signed_index, Fft2};
use crate::grid::{l2, GridField};
use crate::{Complex64, Error, Result, PI};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol: 1e-8, max_iter: 200 }
    }
}

/// Spectral Beurling transform on the periodized `N × N` grid.
#[derive(Debug, Clone)]
pub struct Beurling {
    fft: Fft2,
    multiplier: Vec<Complex64>,
}

impl Beurling {
    pub fn new(n: usize) -> Result<Self> {
        let fft = Fft2::new(n)?;
        let multiplier = (0..n * n)
            .map(|i| {
                let xi = Complex64::new(signed_index(i % n, n), signed_index(i / n, n));
                if i == 0 {
                    ZERO
                } else {
                    xi.conj() / xi
                }
            })
            .collect();
        Ok(Beurling { fft, multiplier })
    }

    pub fn apply(&self, h: &[Complex64]) -> Vec<Complex64> {
        let mut d = h.to_vec();
        self.fft.forward(&mut d);
        d.iter_mut().zip(&self.multiplier).for_each(|(v, m)| *v *= m);
        self.fft.inverse(&mut d);
        d
    }
}

pub fn beurling_transform(h: &GridField) -> Result<GridField> {
    let out = Beurling::new(h.n())?.apply(h.values());
    GridField::new(h.half_width(), h.n(), h.half_width() * (1.0 - 1e-12), out)
}

/// `C h` at every cell center, as a zero-padded FFT convolution with the
/// cell-integrated kernel.
#[derive(Debug, Clone)]
pub struct CauchyKernel {
    n: usize,
    half_width: f64,
    fft: Fft2,
    kernel_hat: Vec<Complex64>,
}

impl CauchyKernel {
    /// Offsets with `max(|m|, |n|) ≤ NEAR` are integrated on 16×16 subcells.
    const NEAR: i64 = 3;

    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        let m = 2 * n;
        let fft = Fft2::new(m)?;
        let h = 2.0 * half_width / n as f64;
        let mut k = alloc::vec![ZERO; m * m];
        let span = n as i64 - 1;
        for dy in -span..=span {
            for dx in -span..=span {
                let idx = (dy.rem_euclid(m as i64) as usize) * m + dx.rem_euclid(m as i64) as usize;
                k[idx] = cell_weight(h, dx, dy, Self::NEAR);
            }
        }
        fft.forward(&mut k);
        Ok(CauchyKernel { n, half_width, fft, kernel_hat: k })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, h: &[Complex64]) -> Vec<Complex64> {
        let (n, m) = (self.n, 2 * self.n);
        let mut d = alloc::vec![ZERO; m * m];
        for y in 0..n {
            d[y * m..y * m + n].copy_from_slice(&h[y * n..(y + 1) * n]);
        }
        self.fft.forward(&mut d);
        d.iter_mut().zip(&self.kernel_hat).for_each(|(v, k)| *v *= k);
        self.fft.inverse(&mut d);
        let mut out = Vec::with_capacity(n * n);
        for y in 0..n {
            out.extend_from_slice(&d[y * m..y * m + n]);
        }
        out
    }
}

/// `(1/π) ∬_{cell at 0} dA(w) / (d - w)` for `d = h(dx + i dy)`.
fn cell_weight(h: f64, dx: i64, dy: i64, near: i64) -> Complex64 {
    if dx == 0 && dy == 0 {
        return ZERO;
    }
    let d = Complex64::new(dx as f64 * h, dy as f64 * h);
    if dx.abs() > near || dy.abs() > near {
        return Complex64::new(h * h / PI, 0.0) / d;
    }
    let sub = 16;
    let s = h / sub as f64;
    let mut acc = ZERO;
    for a in 0..sub {
        for b in 0..sub {
            let w = Complex64::new(((a as f64 + 0.5) / sub as f64 - 0.5) * h, ((b as f64 + 0.5) / sub as f64 - 0.5) * h);
            acc += (d - w).inv();
        }
    }
    acc * (s * s / PI)
}

/// Nonzero cells of a field with their centers.
fn support_cells(h: &GridField) -> Vec<(Complex64, Complex64)> {
    h.values().iter().enumerate().filter(|(_, v)| **v != ZERO).map(|(i, v)| (h.point(i), *v)).collect()
}

/// `C h(ζ)` by direct quadrature: midpoint rule on far cells, 8×8 subcells on
/// cells within three steps, and the exact equal-area disk integral on the
/// subcell that contains `ζ`.
fn cauchy_direct(cells: &[(Complex64, Complex64)], h: f64, zeta: Complex64) -> Complex64 {
    let sub = 8;
    let s = h / sub as f64;
    let rho2 = s * s / PI;
    let mut acc = ZERO;
    for &(c, v) in cells {
        let d = zeta - c;
        if d.re.abs() > 3.0 * h || d.im.abs() > 3.0 * h {
            acc += v * (h * h / PI) / d;
            continue;
        }
        let mut w = ZERO;
        for a in 0..sub {
            for b in 0..sub {
                let sc = c + Complex64::new(((a as f64 + 0.5) / sub as f64 - 0.5) * h, ((b as f64 + 0.5) / sub as f64 - 0.5) * h);
                let e = zeta - sc;
                if e.re.abs() <= s / 2.0 && e.im.abs() <= s / 2.0 {
                    w += if e.norm_sqr() < rho2 { e.conj() } else { Complex64::new(rho2, 0.0) / e };
                } else {
                    w += (s * s / PI) / e;
                }
            }
        }
        acc += v * w;
    }
    acc
}

pub fn cauchy_transform(h: &GridField, targets: &[Complex64]) -> Vec<Complex64> {
    let cells = support_cells(h);
    targets.iter().map(|&z| cauchy_direct(&cells, h.step(), z)).collect()
}

/// `P h(ζ) = C h(ζ) - C h(0)` at each target.
pub fn cauchy_transform_p(h: &GridField, targets: &[Complex64]) -> Vec<Complex64> {
    let cells = support_cells(h);
    let c0 = cauchy_direct(&cells, h.step(), ZERO);
    targets.iter().map(|&z| cauchy_direct(&cells, h.step(), z) - c0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `f(0) = 0`, `f_z - 1` decaying.
    Normal,
    /// Fixes 0, 1 and ∞.
    Fix01Inf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Relative `l²` size of the last fixed-point update.
    pub update: f64,
    /// `‖f_z̄ - μ f_z‖₂ / ‖f_z‖₂` on the grid.
    pub residual: f64,
}

/// A solution of the Beltrami equation sampled on a grid.
#[derive(Debug, Clone)]
pub struct PlanarQCMap {
    /// `f_z̄` of the normal solution (before rescaling), with the geometry of `μ`.
    h: GridField,
    cells: Vec<(Complex64, Complex64)>,
    c0: Complex64,
    /// Post-composition `w ↦ w / scale`.
    scale: Complex64,
    values: Vec<Complex64>,
    fz: Vec<Complex64>,
    normalization: Normalization,
    stats: SolveStats,
}

impl PlanarQCMap {
    pub fn geometry(&self) -> (f64, usize, f64) {
        (self.h.half_width(), self.h.n(), self.h.support_radius())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_field(&self) -> Result<GridField> {
        GridField::new(self.h.half_width(), self.h.n(), self.h.half_width() * (1.0 - 1e-12), self.values.clone())
    }

    pub fn fz(&self) -> &[Complex64] {
        &self.fz
    }

    pub fn fzbar(&self) -> Vec<Complex64> {
        self.h.values().iter().map(|v| v / self.scale).collect()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    /// `f(ζ)` by direct quadrature of `P f_z̄`; valid anywhere in the plane.
    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        (zeta + cauchy_direct(&self.cells, self.h.step(), zeta) - self.c0) / self.scale
    }

    /// `f(ζ)` by bilinear interpolation of `f - z` between cell centers.
    pub fn interpolate(&self, zeta: Complex64) -> Option<Complex64> {
        let n = self.h.n();
        let r = self.h.half_width();
        let hstep = self.h.step();
        let u = (zeta.re + r) / hstep - 0.5;
        let v = (zeta.im + r) / hstep - 0.5;
        let top = (n - 1) as f64;
        if !(u >= 0.0 && v >= 0.0 && u <= top && v <= top) {
            return None;
        }
        let i = (Float::floor(u) as usize).min(n - 2);
        let j = (Float::floor(v) as usize).min(n - 2);
        let (fu, fv) = (u - i as f64, v - j as f64);
        let at = |a: usize, b: usize| {
            let k = b * n + a;
            self.values[k] - self.h.point(k)
        };
        let rem = at(i, j) * ((1.0 - fu) * (1.0 - fv))
            + at(i + 1, j) * (fu * (1.0 - fv))
            + at(i, j + 1) * ((1.0 - fu) * fv)
            + at(i + 1, j + 1) * (fu * fv);
        Some(zeta + rem)
    }

    /// Fraction of support cells with `|f_z|² - |f_z̄|² > 0`.
    pub fn jacobian_positive_fraction(&self) -> f64 {
        let r = self.h.support_radius();
        let mut total = 0usize;
        let mut good = 0usize;
        for (i, (fz, h)) in self.fz.iter().zip(self.h.values()).enumerate() {
            if self.h.point(i).norm() <= r {
                total += 1;
                if fz.norm_sqr() > (h / self.scale).norm_sqr() {
                    good += 1;
                }
            }
        }
        if total == 0 {
            1.0
        } else {
            good as f64 / total as f64
        }
    }
}

/// Reusable transforms for one `(R, N)` geometry.
#[derive(Debug, Clone)]
pub struct PlaneSolver {
    beurling: Beurling,
    cauchy: CauchyKernel,
}

impl PlaneSolver {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        Ok(PlaneSolver { beurling: Beurling::new(n)?, cauchy: CauchyKernel::new(half_width, n)? })
    }

    pub fn beurling(&self) -> &Beurling {
        &self.beurling
    }

    pub fn cauchy(&self) -> &CauchyKernel {
        &self.cauchy
    }

    pub fn solve(&self, mu: &GridField, cfg: &SolverConfig) -> Result<PlanarQCMap> {
        if mu.n() != self.cauchy.n || mu.half_width() != self.cauchy.half_width {
            return Err(Error::InvalidInput("grid geometry does not match the solver".into()));
        }
        let k = mu.max_abs();
        if k >= 1.0 {
            return Err(Error::NotAdmissible(alloc::format!("max |mu| = {k} >= 1")));
        }
        let m = mu.values();
        let one = Complex64::new(1.0, 0.0);
        let mut h = m.to_vec();
        let mut iterations = 0;
        let mut update = 0.0;
        if k > 0.0 {
            loop {
                let s = self.beurling.apply(&h);
                let next: Vec<Complex64> = m.iter().zip(&s).map(|(mu, s)| mu * (one + s)).collect();
                let diff: Vec<Complex64> = next.iter().zip(&h).map(|(a, b)| a - b).collect();
                update = l2(&diff) / l2(&next).max(f64::MIN_POSITIVE);
                h = next;
                iterations += 1;
                if update < cfg.tol {
                    break;
                }
                if iterations >= cfg.max_iter {
                    return Err(Error::NonConvergence { iterations, update });
                }
            }
        }
        let sh = self.beurling.apply(&h);
        let fz: Vec<Complex64> = sh.iter().map(|s| one + s).collect();
        let defect: Vec<Complex64> = h.iter().zip(m).zip(&fz).map(|((h, mu), fz)| h - mu * fz).collect();
        let residual = l2(&defect) / l2(&fz);
        let hfield = mu.with_values(h)?;
        let cells = support_cells(&hfield);
        let c0 = cauchy_direct(&cells, hfield.step(), ZERO);
        let ch = self.cauchy.apply(hfield.values());
        let values = ch.iter().enumerate().map(|(i, c)| hfield.point(i) + c - c0).collect();
        Ok(PlanarQCMap {
            h: hfield,
            cells,
            c0,
            scale: one,
            values,
            fz,
            normalization: Normalization::Normal,
            stats: SolveStats { iterations, update, residual },
        })
    }
}

/// Normal solution for a compactly supported `μ` with `max |μ| < 1`.
pub fn solve_normal(mu: &GridField, cfg: &SolverConfig) -> Result<PlanarQCMap> {
    PlaneSolver::new(mu.half_width(), mu.n())?.solve(mu, cfg)
}

/// Post-composes with `w ↦ w / f(1)`, `f(1)` taken by quadrature.
pub fn normalize_fix01inf(f: &PlanarQCMap) -> Result<PlanarQCMap> {
    let f1 = f.eval(Complex64::new(1.0, 0.0));
    if f1.norm() < 1e-9 {
        return Err(Error::Degenerate(alloc::format!("|f(1)| = {} below 1e-9", f1.norm())));
    }
    let mut g = f.clone();
    g.scale = f.scale * f1;
    g.values.iter_mut().for_each(|v| *v /= f1);
    g.fz.iter_mut().for_each(|v| *v /= f1);
    g.normalization = Normalization::Fix01Inf;
    Ok(g)
}

/// `ḟ[η](ζ) = -(1/π) ∬ η(z) ζ(ζ-1) / (z(z-1)(z-ζ)) dx dy`, evaluated as
/// `C η(ζ) + (ζ - 1) C η(0) - ζ C η(1)`.
pub fn infinitesimal_deformation(eta: &GridField, targets: &[Complex64]) -> Result<Vec<Complex64>> {
    let r = eta.half_width();
    if let Some(z) = targets.iter().find(|z| z.re.abs() > r || z.im.abs() > r) {
        return Err(Error::OutsideWindow(alloc::format!("target {z} outside [-{r}, {r}]^2")));
    }
    let cells = support_cells(eta);
    let h = eta.step();
    let c0 = cauchy_direct(&cells, h, ZERO);
    let c1 = cauchy_direct(&cells, h, Complex64::new(1.0, 0.0));
    let one = Complex64::new(1.0, 0.0);
    Ok(targets
        .iter()
        .map(|&z| {
            if z == ZERO || z == one {
                return ZERO;
            }
            cauchy_direct(&cells, h, z) + (z - one) * c0 - z * c1
        })
        .collect())
}

/// Relative `l²` Beltrami residual with central differences of the sampled
/// map on interior cells.
pub fn finite_difference_residual(f: &PlanarQCMap, mu: &GridField) -> f64 {
    let n = mu.n();
    let h = mu.step();
    let v = f.values();
    let mut num = 0.0;
    let mut den = 0.0;
    for y in 1..n - 1 {
        for x in 1..n - 1 {
            let i = y * n + x;
            let fx = (v[i + 1] - v[i - 1]) / (2.0 * h);
            let fy = (v[i + n] - v[i - n]) / (2.0 * h);
            let fz = (fx - Complex64::i() * fy) * 0.5;
            let fzb = (fx + Complex64::i() * fy) * 0.5;
            num += (fzb - mu.values()[i] * fz).norm_sqr();
            den += fz.norm_sqr();
        }
    }
    Float::sqrt(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderFit {
    pub a_est: f64,
    /// `None` when `μ = 0`.
    pub p_est: Option<f64>,
    pub b_est: f64,
}

/// Fits `|f(ζ) - ζ| ≈ A ‖μ‖_∞ |ζ|^{1-2/p}` on eight rays over radii in
/// `[0.1, 0.75 R]`; `B` bounds `|ζ - f(ζ)| / (‖μ‖_∞ |f(ζ)|^{1-2/p})`.
pub fn holder_diagnostics(f: &PlanarQCMap, mu_sup: f64) -> HolderFit {
    if mu_sup == 0.0 {
        return HolderFit { a_est: 0.0, p_est: None, b_est: 0.0 };
    }
    let r = f.h.half_width();
    let (r0, r1) = (0.1, 0.75 * r);
    let mut samples = Vec::new();
    for k in 0..8 {
        let dir = Complex64::from_polar(1.0, PI / 4.0 * k as f64 + 0.1);
        for j in 0..24 {
            let rad = r0 * Float::powf(r1 / r0, j as f64 / 23.0);
            let z = dir * rad;
            if let Some(w) = f.interpolate(z) {
                let d = (w - z).norm() / mu_sup;
                if d > 0.0 {
                    samples.push((rad, w.norm(), d));
                }
            }
        }
    }
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| Float::ln(s.0)).sum::<f64>() / n;
    let my = samples.iter().map(|s| Float::ln(s.2)).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|s| (Float::ln(s.0) - mx) * (Float::ln(s.2) - my)).sum();
    let sxx: f64 = samples.iter().map(|s| (Float::ln(s.0) - mx) * (Float::ln(s.0) - mx)).sum();
    let slope = sxy / sxx;
    let e = slope.clamp(0.0, 1.0);
    let a_est = samples.iter().map(|s| s.2 / Float::powf(s.0, e)).fold(0.0, f64::max);
    let b_est = samples.iter().map(|s| s.2 / Float::powf(s.1, e)).fold(0.0, f64::max);
    let p_est = if slope < 1.0 { Some(2.0 / (1.0 - slope)) } else { None };
    HolderFit { a_est, p_est, b_est }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic pseudo-random values in `[-1, 1]`.
    fn noise(i: usize) -> f64 {
        let x = Float::sin(i as f64 * 12.9898 + 78.233) * 43758.5453;
        2.0 * (x - Float::floor(x)) - 1.0
    }

    #[test]
    fn beurling_examples() {
        let n = 32;
        let b = Beurling::new(n).unwrap();
        assert!(b.apply(&alloc::vec![ZERO; n * n]).iter().all(|v| *v == ZERO));
        let mode: Vec<Complex64> =
            (0..n * n).map(|i| Complex64::from_polar(1.0, crate::TAU * 3.0 * (i % n) as f64 / n as f64)).collect();
        for (a, b) in b.apply(&mode).iter().zip(&mode) {
            assert!((a - b).norm() < 1e-12);
        }
        let mut r: Vec<Complex64> = (0..n * n).map(|i| c(noise(i), noise(i + 7919))).collect();
        let mean = r.iter().sum::<Complex64>() / (n * n) as f64;
        r.iter_mut().for_each(|v| *v -= mean);
        assert!((l2(&b.apply(&r)) - l2(&r)).abs() < 1e-10 * l2(&r));
    }

    #[test]
    fn grid_convolution_matches_direct_quadrature() {
        let g = GridField::from_fn(2.0, 64, 1.0, |z| c(Float::exp(-4.0 * z.norm_sqr()), 0.3 * z.re)).unwrap();
        let conv = CauchyKernel::new(2.0, 64).unwrap().apply(g.values());
        let cells = support_cells(&g);
        for i in [0usize, 777, 2080, 4095] {
            let d = cauchy_direct(&cells, g.step(), g.point(i));
            assert!((conv[i] - d).norm() < 1e-5, "{i}: {} vs {}", conv[i], d);
        }
    }

    #[test]
    fn p_vanishes_at_origin() {
        let g = GridField::disk_indicator(2.0, 64, 1.0, c(1.0, 0.0)).unwrap();
        assert!(cauchy_transform_p(&g, &[ZERO])[0].norm() < 1e-14);
        let z = GridField::zeros(2.0, 64, 1.0).unwrap();
        assert_eq!(cauchy_transform_p(&z, &[c(0.3, 0.2)])[0], ZERO);
    }

    #[test]
    fn zero_coefficient_gives_identity() {
        let mu = GridField::zeros(4.0, 64, 1.0).unwrap();
        let f = solve_normal(&mu, &SolverConfig::default()).unwrap();
        assert_eq!(f.stats().iterations, 0);
        for (i, v) in f.values().iter().enumerate() {
            assert_eq!(*v, mu.point(i));
        }
        let g = normalize_fix01inf(&f).unwrap();
        assert_eq!(g.eval(c(0.7, -0.2)), c(0.7, -0.2));
    }

    #[test]
    fn disk_solve_residual_jacobian_and_symmetry() {
        let cfg = SolverConfig::default();
        let mu = GridField::disk_indicator(4.0, 128, 1.0, c(0.3, 0.0)).unwrap();
        let f = solve_normal(&mu, &cfg).unwrap();
        assert!(f.stats().residual <= 10.0 * cfg.tol);
        assert!(f.jacobian_positive_fraction() >= 0.99);
        let n = mu.n();
        let bump = |z: Complex64| c(0.2 * z.re, 0.25) * Float::exp(-2.0 * z.norm_sqr());
        let m1 = GridField::from_fn(4.0, n, 2.0, bump).unwrap();
        let m2 = GridField::from_fn(4.0, n, 2.0, |z| bump(z.conj()).conj()).unwrap();
        let (f1, f2) = (solve_normal(&m1, &cfg).unwrap(), solve_normal(&m2, &cfg).unwrap());
        for y in 0..n {
            for x in 0..n {
                let a = f1.values()[y * n + x];
                let b = f2.values()[(n - 1 - y) * n + x];
                assert!((a - b.conj()).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn normalization_fixes_one() {
        let mu = GridField::disk_indicator(4.0, 128, 1.0, c(0.3, 0.0)).unwrap();
        let f = normalize_fix01inf(&solve_normal(&mu, &SolverConfig::default()).unwrap()).unwrap();
        assert!((f.eval(c(1.0, 0.0)) - 1.0).norm() < 1e-12);
        assert!(f.eval(ZERO).norm() < 1e-14);
        assert_eq!(f.normalization(), Normalization::Fix01Inf);
    }

    #[test]
    fn deformation_of_disk_indicator() {
        let eta = GridField::disk_indicator(4.0, 256, 1.0, c(1.0, 0.0)).unwrap();
        let v = infinitesimal_deformation(&eta, &[ZERO, c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert_eq!((v[0], v[1]), (ZERO, ZERO));
        // First order in h: the piecewise-constant disk edge passes through 1.
        assert!((v[2] - c(-1.5, 0.0)).norm() < 3e-3, "{}", v[2]);
        assert!(infinitesimal_deformation(&eta, &[c(5.0, 0.0)]).is_err());
    }

    #[test]
    fn smooth_solution_has_small_finite_difference_residual() {
        let mu = GridField::from_fn(4.0, 128, 2.0, |z| c(0.3, 0.1) * Float::exp(-3.0 * z.norm_sqr())).unwrap();
        let f = solve_normal(&mu, &SolverConfig::default()).unwrap();
        let r = finite_difference_residual(&f, &mu);
        assert!(r < 1e-3, "{r}");
    }
}
