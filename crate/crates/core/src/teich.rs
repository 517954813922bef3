//! Circle-solenoid diffeomorphisms, their quasiconformal extensions and the
//! Nag–Verjovsky coefficient.

use alloc::vec::Vec;
use num_traits::Float;

use crate::leaf::{LeafCoefficient, LeafTerm};
use crate::renorm::{ren_norm, PeriodicField};
use crate::{Chain, Complex64, Error, Frequency, PontryaginSeries, Result, PI};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `f_0(x) = x + h(x)` with `h` real, chain-supported and `h(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolenoidDiffeo {
    h: PontryaginSeries,
    chain: Chain,
}

impl SolenoidDiffeo {
    pub fn identity(chain: &Chain) -> Self {
        SolenoidDiffeo { h: PontryaginSeries::zero().with_reality(true).expect("zero is real"), chain: chain.clone() }
    }

    /// Checks reality, chain support, `h(0) = 0` and `1 + h' > 0` (certified by
    /// `coeff_l1(h') < 1` or, failing that, on a fine grid).
    pub fn new(h: PontryaginSeries, chain: Chain) -> Result<Self> {
        if !h.is_real_symmetric() {
            return Err(Error::RealityViolation);
        }
        let h = h.with_reality(true)?;
        if let Some((q, _)) = h.terms().find(|(q, _)| !q.in_level(chain.top())) {
            return Err(Error::DenominatorOutsideChain { den: q.den(), top: chain.top() });
        }
        let at0: Complex64 = h.terms().map(|(_, a)| a).sum();
        if at0.norm() > crate::ALGEBRAIC_TOL {
            return Err(Error::InvalidInput(alloc::format!("h(0) = {at0} does not vanish")));
        }
        let dh = h.derivative_x();
        if dh.coeff_l1() >= 1.0 {
            let ev = dh.evaluator();
            let period = dh.period();
            let m = (64.0 * dh.max_abs_frequency() * period / crate::TAU).max(4096.0) as usize;
            if (0..m).any(|k| 1.0 + ev.at_real(period * k as f64 / m as f64).re <= 0.0) {
                return Err(Error::InvalidInput("1 + h' is not positive".into()));
            }
        }
        Ok(SolenoidDiffeo { h, chain })
    }

    pub fn h(&self) -> &PontryaginSeries {
        &self.h
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    /// `f_0(x)`, summing `a_0 + Σ_{q>0} 2 Re(a_q e^{iqx})` onto `x`.
    pub fn eval(&self, x: f64) -> f64 {
        real_pairs(&self.h).fold(x, |acc, (q, a)| {
            let t = a * Complex64::from_polar(1.0, q * x);
            if q == 0.0 {
                acc + t.re
            } else {
                acc + 2.0 * t.re
            }
        })
    }
}

/// `‖d^m/dx^m (h_f - h_g)‖_P`, renormalized along the common chain.
pub fn cm_distance(f: &SolenoidDiffeo, g: &SolenoidDiffeo, m: u32) -> Result<f64> {
    if f.chain != g.chain {
        return Err(Error::InvalidChain("diffeomorphisms live on different chains".into()));
    }
    let d = f.h.sub(&g.h).derivative_x_n(m);
    Ok(ren_norm(&d, &f.chain).total)
}

/// Taylor coefficients `c_k` of `l` for `k ≤ 17`.
fn l_taylor() -> [f64; 18] {
    let mut c = [0.0; 18];
    let mut fact = 1.0;
    for k in 1..=18usize {
        fact *= k as f64;
        // c_{2j} = (-1)^j/(2j+1)!, c_{2j-1} = (-1)^j/(2j)!
        if k % 2 == 1 {
            let j = (k - 1) / 2;
            c[k - 1] = if j % 2 == 0 { 1.0 / fact } else { -1.0 / fact };
        } else {
            let j = k / 2;
            c[k - 1] = if j % 2 == 0 { 1.0 / fact } else { -1.0 / fact };
        }
    }
    c
}

/// `l(x) = sin x / x - (1 - cos x) / x`, by its Taylor series for `|x| < 0.5`.
pub fn l_eval(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let c = l_taylor();
        return c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck);
    }
    (Float::sin(x) - 1.0 + Float::cos(x)) / x
}

pub fn l_prime(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let c = l_taylor();
        return (1..c.len()).rev().fold(0.0, |acc, k| acc * x + k as f64 * c[k]);
    }
    let (s, co) = Float::sin_cos(x);
    (x * co - s - x * s + 1.0 - co) / (x * x)
}

/// Modes with `q ≥ 0` of a real series; the rest are their conjugates.
fn real_pairs(h: &PontryaginSeries) -> impl Iterator<Item = (f64, Complex64)> + '_ {
    h.terms().filter(|(q, _)| q.signum() >= 0).map(|(q, a)| (q.to_f64(), a))
}

/// `w(z) = z + Σ a_q e^{iqx} l(qy)`, with each pair `±q` combined so that the
/// trace at `y = 0` is exactly `f_0`.
pub fn ab_extension(f: &SolenoidDiffeo, z: Complex64) -> Complex64 {
    real_pairs(&f.h).fold(z, |acc, (q, a)| {
        let t = a * Complex64::from_polar(1.0, q * z.re);
        if q == 0.0 {
            return acc + t.re;
        }
        let (lp, lm) = (l_eval(q * z.im), l_eval(-q * z.im));
        acc + Complex64::new(t.re * (lp + lm), t.im * (lp - lm))
    })
}

/// `z + ½∫_0^1 [(1+i) h(x+ty) + (1-i) h(x-ty)] dt` by adaptive Simpson.
/// Applied to `h` alone; on `f_0` itself the integral returns `x + iy/2` for
/// the identity.
pub fn ab_extension_integral(f: &SolenoidDiffeo, z: Complex64, tol: f64) -> Complex64 {
    let ev = f.h.evaluator();
    let (x, y) = (z.re, z.im);
    let g = |t: f64| {
        (Complex64::new(1.0, 1.0) * ev.at_real(x + t * y) + Complex64::new(1.0, -1.0) * ev.at_real(x - t * y)) * 0.5
    };
    z + adaptive_simpson(&g, 0.0, 1.0, tol)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    fn rec(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, [fa, fm, fb]: [Complex64; 3], whole: Complex64, tol: f64, depth: u32) -> Complex64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
        let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, [fa, flm, fm], left, tol / 2.0, depth - 1) + rec(f, m, b, [fm, frm, fb], right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    rec(f, a, b, [fa, fm, fb], whole, tol, 40)
}

/// `ν*(μ_f)` as a quotient of two mode sums, or only its numerator for the
/// linearization at the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct NvCoefficient {
    modes: Vec<(f64, Complex64)>,
    period_level: u64,
    linear: bool,
    /// `Σ |q a_q|`; the denominator stays within this distance of 1.
    pub certificate: f64,
    /// `(π/√3) d / (1 - (π/√3) d)` with `d = d(id, f)_{C²}`; infinite when the
    /// denominator is not positive.
    pub bound: f64,
}

impl NvCoefficient {
    fn sums(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        let mut num = ZERO;
        let mut den = ZERO;
        for &(q, a) in &self.modes {
            let base = Complex64::new(0.0, q) * a * Complex64::from_polar(1.0, q * x);
            let (l, lp) = (l_eval(q * y), l_prime(q * y));
            num += base * (0.5 * (l + lp));
            den += base * (0.5 * (l - lp));
        }
        (num, den)
    }

    pub fn numerator(&self, x: f64, y: f64) -> Complex64 {
        self.sums(x, y).0
    }

    /// `1 + Σ iq a_q e^{iqx} (l(qy) - l'(qy))/2`.
    pub fn denominator(&self, x: f64, y: f64) -> Complex64 {
        1.0 + self.sums(x, y).1
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let (num, den) = self.sums(x, y);
        if self.linear {
            num
        } else {
            num / (1.0 + den)
        }
    }

    pub fn is_linear(&self) -> bool {
        self.linear
    }

    /// Max of `|μ|` over `x` samples per `2π` of one period and the given heights.
    pub fn sup_grid(&self, x_per_turn: usize, ys: &[f64]) -> f64 {
        let m = x_per_turn * self.period_level as usize;
        let span = crate::TAU * self.period_level as f64;
        ys.iter()
            .flat_map(|&y| (0..m).map(move |k| (span * k as f64 / m as f64, y)))
            .map(|(x, y)| self.eval(x, y).norm())
            .fold(0.0, f64::max)
    }
}

impl PeriodicField for NvCoefficient {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        NvCoefficient::eval(self, x, y)
    }

    fn period_level(&self) -> u64 {
        self.period_level
    }
}

fn modes(h: &PontryaginSeries) -> Vec<(f64, Complex64)> {
    h.terms().map(|(q, a)| (q.to_f64(), a)).collect()
}

/// Beltrami coefficient of the extension of `f`; rejected unless
/// `Σ |q a_q| < 1`, which keeps the denominator away from 0 for every `y`.
pub fn nag_verjovsky_mu(f: &SolenoidDiffeo) -> Result<NvCoefficient> {
    let certificate = f.h.derivative_x().coeff_l1();
    if certificate >= 1.0 {
        return Err(Error::NotAdmissible(alloc::format!("denominator certificate {certificate} >= 1")));
    }
    let d = cm_distance(f, &SolenoidDiffeo::identity(&f.chain), 2)?;
    let k = PI / Float::sqrt(3.0) * d;
    let bound = if k < 1.0 { k / (1.0 - k) } else { f64::INFINITY };
    Ok(NvCoefficient { modes: modes(&f.h), period_level: f.h.lcm_den().unwrap_or(1), linear: false, certificate, bound })
}

/// The linearization `Σ iq a_q e^{iqx} (l(qy) + l'(qy))/2` at the identity.
pub fn d_id_phi(v: &PontryaginSeries) -> Result<NvCoefficient> {
    if !v.is_real_symmetric() {
        return Err(Error::RealityViolation);
    }
    if v.coefficient(Frequency::ZERO) != ZERO {
        return Err(Error::NonzeroMean);
    }
    let certificate = v.derivative_x().coeff_l1();
    Ok(NvCoefficient { modes: modes(v), period_level: v.lcm_den().unwrap_or(1), linear: true, certificate, bound: f64::INFINITY })
}

/// `Ĵ: a_q ↦ -i sg(q) a_q` on zero-mean series.
pub fn almost_complex_j(v: &PontryaginSeries) -> Result<PontryaginSeries> {
    if v.coefficient(Frequency::ZERO) != ZERO {
        return Err(Error::NonzeroMean);
    }
    let terms = v.terms().map(|(q, a)| {
        let b = if q.signum() > 0 { Complex64::new(a.im, -a.re) } else { Complex64::new(-a.im, a.re) };
        (q, b)
    });
    PontryaginSeries::from_terms(terms, false)?.with_reality(v.reality())
}

/// `η̃(x, y) = conj η(x, -y)`: the reflection `w ↦ 1/w̄` in leaf coordinates.
pub fn reflect(eta: &LeafCoefficient) -> LeafCoefficient {
    let terms = eta
        .terms()
        .iter()
        .map(|t| LeafTerm { q: -t.q, c: t.c.conj(), profile: t.profile.reflected() })
        .collect();
    LeafCoefficient::new(terms).expect("reflection keeps terms valid")
}

/// `η + η̃`: for `η` supported in `y ≥ 0` this is the extension of `η` to the
/// whole leaf that is invariant under the reflection.
pub fn mirror_extend(eta: &LeafCoefficient) -> LeafCoefficient {
    let mut terms = eta.terms().to_vec();
    terms.extend_from_slice(reflect(eta).terms());
    LeafCoefficient::new(terms).expect("valid terms")
}
