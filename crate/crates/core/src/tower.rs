//! The tower of level solutions and its limit on the solenoid.
//!
//! Level `n` sees the leaf through `w = e^{iz/n}`. A `(-1, 1)`-differential
//! `η dz̄/dz` pulled back from `μ_n dw̄/dw` picks up the phase
//! `conj(w')/w' = -e^{-2ix/n}`, so `μ_n(w) = -η(x, y) e^{2ix/n}` with
//! `x = n arg w`, `y = -n ln|w|`.

use alloc::vec::Vec;
use num_traits::Float;

use crate::admission::AdmissionReport;
use crate::grid::GridField;
use crate::leaf::LeafCoefficient;
use crate::plane::{normalize_fix01inf, PlanarQCMap, PlaneSolver, SolverConfig};
use crate::{Chain, Complex64, Error, ProfiniteInt, Result, SolenoidPoint, TAU};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TowerConfig {
    pub half_width: f64,
    pub grid: usize,
    pub solver: SolverConfig,
    /// Level `L` used to compare lifts; defaults to `n_1`.
    pub reference_level: Option<u64>,
}

impl Default for TowerConfig {
    fn default() -> Self {
        TowerConfig { half_width: 4.0, grid: 512, solver: SolverConfig::default(), reference_level: None }
    }
}

/// A leafwise coefficient on a chain together with its admission verdict.
#[derive(Debug, Clone)]
pub struct AdelicBeltrami {
    coefficient: LeafCoefficient,
    chain: Chain,
    admission: AdmissionReport,
}

impl AdelicBeltrami {
    /// Fails with [`Error::NotAdmissible`] unless the sup bracket lies below 1
    /// and the coefficient is admitted on `chain`.
    pub fn new(coefficient: LeafCoefficient, chain: Chain) -> Result<Self> {
        let admission = coefficient.admit(&chain);
        if !admission.is_admitted() || admission.sup.upper >= 1.0 {
            return Err(Error::NotAdmissible(admission.summary()));
        }
        Ok(AdelicBeltrami { coefficient, chain, admission })
    }

    pub fn coefficient(&self) -> &LeafCoefficient {
        &self.coefficient
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn admission(&self) -> &AdmissionReport {
        &self.admission
    }
}

/// `μ_n(w)` for the filtered coefficient `eta_n = I_n η`.
pub fn level_coefficient_value(eta_n: &LeafCoefficient, n: u64, w: Complex64) -> Complex64 {
    let r = w.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let nf = n as f64;
    let x = nf * w.arg();
    let y = -nf * Float::ln(r);
    let phase = (w / r) * (w / r);
    -eta_n.eval(x, y) * phase
}

/// `μ_{n_j}` sampled on the level plane `[-R, R]²`.
pub fn level_coefficient(mu: &AdelicBeltrami, j: usize, half_width: f64, grid: usize) -> Result<GridField> {
    let n = *mu.chain.levels().get(j).ok_or(Error::DepthMismatch { expected: mu.chain.depth(), found: j + 1 })?;
    let eta = mu.coefficient.filter(n);
    let Some((lo, _)) = eta.y_band() else {
        return GridField::zeros(half_width, grid, 0.0);
    };
    let h = 2.0 * half_width / grid as f64;
    let outer = Float::exp(-lo / n as f64);
    if outer + 2.0 * h >= half_width {
        return Err(Error::WindowTooSmall { required_half_width: outer + 4.0 * h });
    }
    GridField::from_fn(half_width, grid, outer + h, |w| level_coefficient_value(&eta, n, w))
}

/// `g(z) = -in log f(e^{iz/n})`, continued from `g(0) = -in log f(1)` along
/// the real axis and then vertically.
#[derive(Debug, Clone, Copy)]
pub struct Lift<'a> {
    n: u64,
    map: &'a PlanarQCMap,
    /// Unwrapped `arg f(e^{ix/n})` on `x = k·Δ`, `k = 0..=M`.
    table: &'a [f64],
}

/// Unwrapped argument of `f` along the unit circle.
fn circle_table(n: u64, map: &PlanarQCMap) -> Result<Vec<f64>> {
    let (r, grid, _) = map.geometry();
    let h = 2.0 * r / grid as f64;
    let m = Float::ceil(4.0 * crate::PI / h) as usize;
    let mut table = Vec::with_capacity(m + 1);
    let f0 = map.eval(Complex64::new(1.0, 0.0));
    let mut theta = f0.arg();
    let mut prev = f0;
    table.push(theta);
    for k in 1..=m {
        let w = Complex64::from_polar(1.0, TAU * k as f64 / m as f64);
        let f = map.interpolate(w).ok_or_else(|| Error::OutsideWindow("unit circle outside the grid".into()))?;
        theta += step_arg(prev, f)?;
        prev = f;
        table.push(theta);
    }
    let winding = (theta - table[0]) / TAU;
    if (winding - 1.0).abs() > 0.25 {
        return Err(Error::BranchAmbiguity(alloc::format!("level {n} map winds {winding:.3} times around 0")));
    }
    Ok(table)
}

fn step_arg(prev: Complex64, next: Complex64) -> Result<f64> {
    if next.norm() == 0.0 {
        return Err(Error::BranchAmbiguity("path image passes through 0".into()));
    }
    let d = (next / prev).arg();
    if d.abs() > crate::PI / 2.0 {
        return Err(Error::BranchAmbiguity(alloc::format!("argument jump {d} along the path")));
    }
    Ok(d)
}

impl<'a> Lift<'a> {
    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn map(&self) -> &'a PlanarQCMap {
        self.map
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let nf = self.n as f64;
        let period = TAU * nf;
        let turns = Float::floor(z.re / period);
        let xr = z.re - turns * period;
        let m = self.table.len() - 1;
        let dx = period / m as f64;
        let k = (Float::floor(xr / dx) as usize).min(m - 1);
        let (r, grid, _) = self.map.geometry();
        let h = 2.0 * r / grid as f64;
        let at = |x: f64, y: f64| {
            let w = Complex64::from_polar(Float::exp(-y / nf), x / nf);
            self.map.interpolate(w).ok_or_else(|| Error::OutsideWindow(alloc::format!("leaf point {x}+{y}i")))
        };
        let mut theta = self.table[k];
        let mut prev = at(k as f64 * dx, 0.0)?;
        let f = at(xr, 0.0)?;
        theta += step_arg(prev, f)?;
        prev = f;
        let wmax = Float::exp(-z.im / nf).max(1.0);
        let steps = Float::ceil(z.im.abs() * wmax / (nf * h / 2.0)) as usize;
        for s in 1..=steps {
            let f = at(xr, z.im * s as f64 / steps as f64)?;
            theta += step_arg(prev, f)?;
            prev = f;
        }
        let w_end = Complex64::from_polar(Float::exp(-z.im / nf), xr / nf);
        let fq = self.map.eval(w_end);
        theta += (fq / prev).arg();
        let g = Complex64::new(nf * theta, -nf * Float::ln(fq.norm()));
        Ok(g + turns * period)
    }
}

#[derive(Debug, Clone)]
pub struct TowerLevel {
    pub n: u64,
    /// Index of the level whose planar solution serves this one. Levels whose
    /// filtered coefficient equals the previous one reuse its solution.
    pub solved_at: usize,
    pub coefficient: Option<GridField>,
    pub map: Option<PlanarQCMap>,
    table: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceDiagnostics {
    pub reference_level: u64,
    /// `d_i = max |π_L f̂_{n_{i+1}} - π_L f̂_{n_i}|` over the probes.
    pub diffs: Vec<f64>,
    /// `(1/L) n_{i+1} ‖I_{n_{i+1}} μ - I_{n_i} μ‖_∞ M_L`.
    pub bound_terms: Vec<f64>,
    pub m_l_est: f64,
    /// Median of `d_i / bound_i`; `None` when every bound term vanishes.
    pub a_prime_est: Option<f64>,
    /// Indices with `d_i > 10 A' bound_i`.
    pub violations: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub images: Vec<SolenoidPoint>,
    /// `max | |π_L(image)| - 1 |`.
    pub modulus_defect: f64,
    /// Images on each leaf are ordered like their preimages.
    pub orientation_preserving: bool,
}

#[derive(Debug, Clone)]
pub struct Tower {
    mu: AdelicBeltrami,
    config: TowerConfig,
    levels: Vec<TowerLevel>,
}

impl Tower {
    /// Solves and normalizes every level of the chain.
    pub fn solve(mu: AdelicBeltrami, config: TowerConfig) -> Result<Self> {
        let solver = PlaneSolver::new(config.half_width, config.grid)?;
        let mut levels: Vec<TowerLevel> = Vec::new();
        for (j, &n) in mu.chain.levels().iter().enumerate() {
            if j > 0 && mu.coefficient.filter(n) == mu.coefficient.filter(levels[j - 1].n) {
                let src = levels[j - 1].solved_at;
                levels.push(TowerLevel { n, solved_at: src, coefficient: None, map: None, table: Vec::new() });
                continue;
            }
            let coefficient = level_coefficient(&mu, j, config.half_width, config.grid)?;
            let map = normalize_fix01inf(&solver.solve(&coefficient, &config.solver)?)?;
            let table = circle_table(n, &map)?;
            levels.push(TowerLevel { n, solved_at: j, coefficient: Some(coefficient), map: Some(map), table });
        }
        Ok(Tower { mu, config, levels })
    }

    pub fn beltrami(&self) -> &AdelicBeltrami {
        &self.mu
    }

    pub fn config(&self) -> &TowerConfig {
        &self.config
    }

    pub fn levels(&self) -> &[TowerLevel] {
        &self.levels
    }

    pub fn reference_level(&self) -> u64 {
        self.config.reference_level.unwrap_or(self.mu.chain.levels()[0])
    }

    /// The lift of level `j` in baseleaf coordinates.
    pub fn lift(&self, j: usize) -> Result<Lift<'_>> {
        let lvl = self.levels.get(j).ok_or(Error::DepthMismatch { expected: self.levels.len(), found: j + 1 })?;
        let src = &self.levels[lvl.solved_at];
        Ok(Lift { n: src.n, map: src.map.as_ref().expect("solved level"), table: &src.table })
    }

    /// Image of `p` under the level-`i` approximation, renormalized so that
    /// the unit is fixed.
    pub fn evaluate(&self, p: &SolenoidPoint, i: usize) -> Result<SolenoidPoint> {
        let lift = self.lift(i)?;
        let n = self.levels[i].n;
        let r = p.a().residue_mod(n)?;
        let shift = TAU * r as f64;
        let u = lift.eval(Complex64::new(0.0, 0.0))?;
        let g = lift.eval(p.z() + shift)?;
        Ok(SolenoidPoint::exp(p.a().clone(), g - shift - u))
    }

    /// Default probes: 64 points on three lines inside the y-band and 32 on
    /// `y = 0`, spread over one period of the deepest level.
    pub fn probes(&self) -> Vec<Complex64> {
        let (lo, hi) = self.mu.coefficient.y_band().unwrap_or((-0.5, 0.5));
        let span = TAU * self.mu.chain.top() as f64;
        let mut out = Vec::with_capacity(224);
        for t in [0.25, 0.5, 0.75] {
            let y = lo + (hi - lo) * t;
            out.extend((0..64).map(|k| Complex64::new(span * (k as f64 + 0.5) / 64.0, y)));
        }
        out.extend((0..32).map(|k| Complex64::new(span * (k as f64 + 0.25) / 32.0, 0.0)));
        out
    }

    pub fn diagnostics(&self) -> Result<ConvergenceDiagnostics> {
        self.diagnostics_on(&self.probes())
    }

    pub fn diagnostics_on(&self, probes: &[Complex64]) -> Result<ConvergenceDiagnostics> {
        let l = self.reference_level() as f64;
        let mut images: Vec<Vec<Complex64>> = Vec::with_capacity(self.levels.len());
        for j in 0..self.levels.len() {
            if j > 0 && self.levels[j].solved_at == self.levels[j - 1].solved_at {
                let prev = images[j - 1].clone();
                images.push(prev);
                continue;
            }
            let lift = self.lift(j)?;
            let u = lift.eval(Complex64::new(0.0, 0.0))?;
            images.push(probes.iter().map(|&z| lift.eval(z).map(|g| g - u)).collect::<Result<Vec<_>>>()?);
        }
        let proj = |g: Complex64| (Complex64::i() * g / l).exp();
        let m_l_est = images.iter().flatten().map(|&g| proj(g).norm()).fold(1.0, f64::max);
        let diffs: Vec<f64> = images
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).map(|(&a, &b)| (proj(b) - proj(a)).norm()).fold(0.0, f64::max))
            .collect();
        let terms = self.mu.coefficient.ren_norm(&self.mu.chain).terms;
        let bound_terms: Vec<f64> = terms.iter().map(|t| t / l * m_l_est).collect();
        let mut ratios: Vec<f64> =
            diffs.iter().zip(&bound_terms).filter(|(_, &b)| b > 0.0).map(|(d, b)| d / b).collect();
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        let a_prime_est = if ratios.is_empty() { None } else { Some(ratios[ratios.len() / 2]) };
        let violations = match a_prime_est {
            Some(a) => diffs
                .iter()
                .zip(&bound_terms)
                .enumerate()
                .filter(|(_, (&d, &b))| d > 10.0 * a * b && d > 1e-9)
                .map(|(i, _)| i)
                .collect(),
            None => Vec::new(),
        };
        Ok(ConvergenceDiagnostics { reference_level: self.reference_level(), diffs, bound_terms, m_l_est, a_prime_est, violations })
    }

    /// Images of boundary points (`Im z = 0`) under the level-`i` approximation.
    pub fn boundary_trace(&self, points: &[SolenoidPoint], i: usize) -> Result<BoundaryTrace> {
        if !self.mu.coefficient.is_mirror_symmetric(1e-12) {
            return Err(Error::InvalidInput("boundary trace needs a mirror-symmetric coefficient".into()));
        }
        if let Some(p) = points.iter().find(|p| p.z().im.abs() > 1e-12) {
            return Err(Error::OutsideWindow(alloc::format!("{} is not a boundary point", p.z())));
        }
        let l = self.reference_level() as f64;
        let images = points.iter().map(|p| self.evaluate(p, i)).collect::<Result<Vec<_>>>()?;
        let modulus_defect = images.iter().map(|q| (Float::exp(-q.z().im / l) - 1.0).abs()).fold(0.0, f64::max);
        let span = TAU * self.mu.chain.top() as f64;
        let angle = |p: &SolenoidPoint| TAU * p.a().top_residue() as f64 + p.z().re;
        let mut pairs: Vec<(f64, f64)> = points.iter().zip(&images).map(|(p, q)| (angle(p), angle(q))).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
        let orientation_preserving = pairs.windows(2).all(|w| {
            let d = (w[1].1 - w[0].1).rem_euclid(span);
            d > 0.0 && d < span / 2.0
        });
        Ok(BoundaryTrace { images, modulus_defect, orientation_preserving })
    }
}

/// Boundary points `exp(0, 2π n_J k/m)` for `k = 0..m`.
pub fn boundary_samples(chain: &Chain, m: usize) -> Vec<SolenoidPoint> {
    let span = TAU * chain.top() as f64;
    (0..m)
        .map(|k| SolenoidPoint::exp(ProfiniteInt::zero(chain), Complex64::new(span * k as f64 / m as f64, 0.0)))
        .collect()
}
