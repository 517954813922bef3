//! Pontryagin series `Σ a_q e^{iqx}` with exact rational frequencies.
//!
//! Evaluation sums terms in order of decreasing `|a_q|`, ties broken by
//! increasing frequency, so results are reproducible across platforms.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_traits::Float;

use crate::frequency::lcm_u64;
use crate::{Chain, Complex64, Error, Frequency, Result, SolenoidPoint, PI, TAU};

#[derive(Debug, Clone, PartialEq)]
pub struct PontryaginSeries {
    terms: BTreeMap<Frequency, Complex64>,
    reality: bool,
}

/// Certified enclosure `lower ≤ sup|f| ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupBracket {
    pub lower: f64,
    pub upper: f64,
}

/// Both sides of the limit-periodicity modulus at shift `2πN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusReport {
    /// `max |f(x + 2πN) - f(x)|` over the supplied grid.
    pub grid_sup: f64,
    /// `Σ |a_q| |e^{2πiqN} - 1|`.
    pub upper: f64,
}

/// Terms in evaluation order, with frequencies as floats.
#[derive(Debug, Clone)]
pub struct SeriesEval {
    terms: Vec<(f64, Complex64)>,
}

impl SeriesEval {
    pub fn at(&self, z: Complex64) -> Complex64 {
        let iz = Complex64::i() * z;
        self.terms.iter().fold(Complex64::new(0.0, 0.0), |acc, &(q, a)| acc + a * (iz * q).exp())
    }

    pub fn at_real(&self, x: f64) -> Complex64 {
        self.terms.iter().fold(Complex64::new(0.0, 0.0), |acc, &(q, a)| {
            let (s, c) = Float::sin_cos(q * x);
            acc + a * Complex64::new(c, s)
        })
    }
}

impl Default for PontryaginSeries {
    fn default() -> Self {
        Self::zero()
    }
}

fn is_conj(a: Complex64, b: Complex64) -> bool {
    a.re == b.re && a.im == -b.im
}

impl PontryaginSeries {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new(), reality: true }
    }

    pub fn constant(c: Complex64) -> Self {
        let mut s = Self { terms: BTreeMap::new(), reality: c.im == 0.0 };
        if c != Complex64::new(0.0, 0.0) {
            s.terms.insert(Frequency::ZERO, c);
        }
        s
    }

    pub fn monomial(q: Frequency, c: Complex64) -> Self {
        let mut s = Self { terms: BTreeMap::new(), reality: c == Complex64::new(0.0, 0.0) };
        if !s.reality {
            s.terms.insert(q, c);
            s.reality = q.is_zero() && c.im == 0.0;
        }
        s
    }

    /// `amp·cos(qx)` as a real series.
    pub fn cos_mode(q: Frequency, amp: f64) -> Self {
        if q.is_zero() {
            return Self::constant(Complex64::new(amp, 0.0));
        }
        let h = Complex64::new(amp / 2.0, 0.0);
        Self::from_terms([(q, h), (-q, h)], true).expect("symmetric by construction")
    }

    /// `amp·sin(qx)` as a real series.
    pub fn sin_mode(q: Frequency, amp: f64) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        let h = Complex64::new(0.0, -amp / 2.0);
        Self::from_terms([(q, h), (-q, h.conj())], true).expect("symmetric by construction")
    }

    /// Sums duplicate frequencies, drops exact zeros, and validates the
    /// reality symmetry when `reality` is set.
    pub fn from_terms<I>(terms: I, reality: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (Frequency, Complex64)>,
    {
        let mut map: BTreeMap<Frequency, Complex64> = BTreeMap::new();
        for (q, a) in terms {
            *map.entry(q).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        map.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        let s = Self { terms: map, reality: false };
        if reality && !s.is_real_symmetric() {
            return Err(Error::RealityViolation);
        }
        Ok(Self { reality, ..s })
    }

    /// Exact check of `a_{-q} = conj(a_q)` for every stored term.
    pub fn is_real_symmetric(&self) -> bool {
        self.terms.iter().all(|(q, a)| match self.terms.get(&-*q) {
            Some(b) => is_conj(*a, *b),
            None => false,
        })
    }

    pub fn reality(&self) -> bool {
        self.reality
    }

    /// Sets the flag after checking the symmetry exactly.
    pub fn with_reality(mut self, reality: bool) -> Result<Self> {
        if reality && !self.is_real_symmetric() {
            return Err(Error::RealityViolation);
        }
        self.reality = reality;
        Ok(self)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Frequency, Complex64)> + '_ {
        self.terms.iter().map(|(q, a)| (*q, *a))
    }

    pub fn coefficient(&self, q: Frequency) -> Complex64 {
        self.terms.get(&q).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_frequency(&self) -> f64 {
        self.terms.keys().map(|q| q.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Least common multiple of the denominators (1 for the empty series).
    pub fn lcm_den(&self) -> Option<u64> {
        self.terms.keys().try_fold(1u64, |l, q| lcm_u64(l, q.den()))
    }

    /// True when every denominator divides `n`.
    pub fn is_periodic_at(&self, n: u64) -> bool {
        self.terms.keys().all(|q| q.in_level(n))
    }

    pub fn evaluator(&self) -> SeriesEval {
        let mut terms: Vec<(Frequency, Complex64)> = self.terms().collect();
        terms.sort_by(|x, y| {
            y.1.norm()
                .partial_cmp(&x.1.norm())
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(x.0.cmp(&y.0))
        });
        SeriesEval { terms: terms.into_iter().map(|(q, a)| (q.to_f64(), a)).collect() }
    }

    pub fn eval_baseleaf(&self, z: Complex64) -> Complex64 {
        self.evaluator().at(z)
    }

    /// `Σ a_q e^{iqz} e^{2πi q a}` where `e^{2πiqa}` is read off exactly from
    /// the residue of `a` modulo `den(q)`.
    pub fn eval_solenoid(&self, p: &SolenoidPoint) -> Result<Complex64> {
        let top = p.chain().top();
        let mut terms = Vec::with_capacity(self.len());
        for (q, a) in self.terms() {
            let r = p.a().residue_mod(q.den()).map_err(|_| Error::DenominatorOutsideChain { den: q.den(), top })?;
            let k = (q.num().rem_euclid(q.den() as i64) as u128 * r as u128) % q.den() as u128;
            let phase = Complex64::from_polar(1.0, TAU * k as f64 / q.den() as f64);
            terms.push((q, a * phase));
        }
        let s = Self { terms: terms.into_iter().collect(), reality: false };
        Ok(s.eval_baseleaf(p.z()))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (q, a) in &o.terms {
            *terms.entry(*q).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        terms.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        Self { terms, reality: self.reality && o.reality }
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(q, a)| (*q, -a)).collect(), reality: self.reality }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut terms: BTreeMap<_, _> = self.terms.iter().map(|(q, a)| (*q, a * c)).collect();
        terms.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        Self { terms, reality: self.reality && c.im == 0.0 }
    }

    /// Frequency convolution.
    ///
    /// # Panics
    /// If a frequency sum overflows 64-bit rationals.
    pub fn mul(&self, o: &Self) -> Self {
        let mut terms: BTreeMap<Frequency, Complex64> = BTreeMap::new();
        for (q, a) in &self.terms {
            for (r, b) in &o.terms {
                let s = q.checked_add(*r).expect("frequency overflow in product");
                *terms.entry(s).or_insert(Complex64::new(0.0, 0.0)) += a * b;
            }
        }
        terms.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        let reality = self.reality && o.reality;
        if reality {
            // Partial sums for q and -q run in different orders; restore the
            // exact symmetry from the positive half.
            let pos: Vec<(Frequency, Complex64)> =
                terms.iter().filter(|(q, _)| q.signum() > 0).map(|(q, a)| (*q, *a)).collect();
            for (q, a) in pos {
                terms.insert(-q, a.conj());
            }
            if let Some(a0) = terms.get_mut(&Frequency::ZERO) {
                a0.im = 0.0;
            }
            terms.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        }
        Self { terms, reality }
    }

    /// `a_q ↦ iq a_q`.
    pub fn derivative_x(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(q, _)| !q.is_zero())
            .map(|(q, a)| (*q, Complex64::new(-a.im, a.re) * q.to_f64()))
            .filter(|(_, a)| *a != Complex64::new(0.0, 0.0))
            .collect();
        Self { terms, reality: self.reality }
    }

    pub fn derivative_x_n(&self, m: u32) -> Self {
        (0..m).fold(self.clone(), |s, _| s.derivative_x())
    }

    /// Keeps the terms with `q·n ∈ Z`.
    pub fn filter(&self, n: u64) -> Self {
        let terms = self.terms.iter().filter(|(q, _)| q.in_level(n)).map(|(q, a)| (*q, *a)).collect();
        Self { terms, reality: self.reality }
    }

    pub fn coeff_l1(&self) -> f64 {
        self.terms.values().map(|a| a.norm()).sum()
    }

    /// Parseval: `sqrt(Σ |a_q|²)`.
    pub fn l2_norm(&self) -> f64 {
        Float::sqrt(self.terms.values().map(|a| a.norm_sqr()).sum::<f64>())
    }

    /// Length of one common period, `2π·lcm(den)`, as a float.
    pub fn period(&self) -> f64 {
        match self.lcm_den() {
            Some(l) => TAU * l as f64,
            None => TAU * self.terms.keys().map(|q| q.den() as f64).fold(1.0, f64::max),
        }
    }

    /// `(max over `samples` equispaced points of one period, coeff_l1)`.
    pub fn sup_norm_estimate(&self, samples: usize) -> SupBracket {
        let upper = self.coeff_l1();
        if self.is_empty() {
            return SupBracket { lower: 0.0, upper: 0.0 };
        }
        let ev = self.evaluator();
        let period = self.period();
        let m = samples.max(1);
        let lower = (0..m).map(|k| ev.at_real(period * k as f64 / m as f64).norm()).fold(0.0, f64::max);
        SupBracket { lower: lower.min(upper), upper }
    }

    /// A tight enclosure of the sup on the real line.
    ///
    /// The grid resolves the highest frequency `ω` with step `h`; Bernstein's
    /// inequality `|f'| ≤ ω sup|f|` gives `sup|f| ≤ G / (1 - hω/2)` for the grid
    /// maximum `G`. The lower end is the grid maximum refined by golden-section
    /// search around the best grid points.
    pub fn sup_bracket_tight(&self, min_samples: usize) -> SupBracket {
        let l1 = self.coeff_l1();
        if self.is_empty() {
            return SupBracket { lower: 0.0, upper: 0.0 };
        }
        let omega = self.max_abs_frequency();
        let period = self.period();
        if omega == 0.0 {
            return SupBracket { lower: l1, upper: l1 };
        }
        if self.len() == 1 {
            return SupBracket { lower: l1, upper: l1 };
        }
        let oscillations = omega * period / TAU;
        let m = min_samples.max(Float::ceil(16.0 * oscillations) as usize).max(8);
        let h = period / m as f64;
        let ev = self.evaluator();
        let vals: Vec<f64> = (0..m).map(|k| ev.at_real(h * k as f64).norm()).collect();
        let grid_max = vals.iter().copied().fold(0.0, f64::max);

        let mut peaks: Vec<usize> =
            (0..m).filter(|&k| vals[k] >= vals[(k + m - 1) % m] && vals[k] >= vals[(k + 1) % m]).collect();
        peaks.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap_or(core::cmp::Ordering::Equal));
        peaks.truncate(8);
        let mut lower = grid_max;
        for k in peaks {
            let (mut a, mut b) = (h * k as f64 - h, h * k as f64 + h);
            let g = 0.5 * (Float::sqrt(5.0) - 1.0);
            let mut c = b - g * (b - a);
            let mut d = a + g * (b - a);
            let (mut fc, mut fd) = (ev.at_real(c).norm(), ev.at_real(d).norm());
            for _ in 0..60 {
                if fc > fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - g * (b - a);
                    fc = ev.at_real(c).norm();
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + g * (b - a);
                    fd = ev.at_real(d).norm();
                }
            }
            lower = lower.max(fc).max(fd);
        }
        let bernstein = if h * omega < 2.0 { grid_max / (1.0 - 0.5 * h * omega) } else { f64::INFINITY };
        let upper = l1.min(bernstein);
        SupBracket { lower: lower.min(upper), upper }
    }

    /// Modulus of limit-periodicity at shift `2πN`, on a grid and as a term-wise bound.
    pub fn limit_periodic_modulus(&self, n: u64, grid: &[f64]) -> ModulusReport {
        let shift = TAU * n as f64;
        let ev = self.evaluator();
        let grid_sup = grid.iter().map(|&x| (ev.at_real(x + shift) - ev.at_real(x)).norm()).fold(0.0, f64::max);
        ModulusReport { grid_sup, upper: self.shift_defect_l1(n) }
    }

    /// `Σ |a_q| |e^{2πiqN} - 1|`, with the phase reduced exactly modulo 1.
    pub fn shift_defect_l1(&self, n: u64) -> f64 {
        self.terms
            .iter()
            .map(|(q, a)| {
                let k = (q.num() as i128 * n as i128).rem_euclid(q.den() as i128);
                if k == 0 {
                    0.0
                } else {
                    a.norm() * 2.0 * Float::sin(PI * k as f64 / q.den() as f64).abs()
                }
            })
            .sum()
    }

    /// The filters `I_{n_j} f` for every level of the chain.
    pub fn periodic_approximants(&self, chain: &Chain) -> Vec<Self> {
        chain.levels().iter().map(|&n| self.filter(n)).collect()
    }

    /// `|a_0| + (π/√3)‖f'‖_2`, the right side of the L1 bound as stated for
    /// functions on the solenoid.
    pub fn l1_sobolev_rhs(&self) -> f64 {
        self.coefficient(Frequency::ZERO).norm() + PI / Float::sqrt(3.0) * self.derivative_x().l2_norm()
    }

    /// `|a_0| + (π/√3)·n·‖f'‖_2` with `n = lcm(den)`: the bound obtained from
    /// the integer-frequency case after rescaling `x ↦ nx`.
    pub fn l1_sobolev_rhs_rescaled(&self) -> f64 {
        let n = self.lcm_den().map(|l| l as f64).unwrap_or(f64::INFINITY);
        self.coefficient(Frequency::ZERO).norm() + PI / Float::sqrt(3.0) * n * self.derivative_x().l2_norm()
    }
}
