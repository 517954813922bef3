//! Leafwise Beltrami coefficients `η(x, y) = Σ c_k P_k(y) e^{i q_k x}` with
//! compactly supported height profiles.

use alloc::vec::Vec;
use num_traits::Float;

use crate::admission::{admit_from_parts, AdmissionReport};
use crate::renorm::{ren_norm, ren_norm_sampled, PeriodicField, RenNormReport, SupGrid};
use crate::series::SupBracket;
use crate::{Chain, Complex64, Error, Frequency, PontryaginSeries, Result};

/// Height profiles, all with maximum 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `exp(1 - 1/(1 - t²))`, `t = (y - m)/r`, on `[lo, hi]`.
    Bump { lo: f64, hi: f64 },
    /// Indicator of `[lo, hi)`.
    Box { lo: f64, hi: f64 },
    /// `exp(-((y - center)/width)²)`, cut to zero beyond eight widths.
    Gaussian { center: f64, width: f64 },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Profile::Bump { lo, hi } | Profile::Box { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Profile::Gaussian { center, width } => center.is_finite() && width.is_finite() && width > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(alloc::format!("invalid profile {self:?}")))
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Profile::Bump { lo, hi } | Profile::Box { lo, hi } => (lo, hi),
            Profile::Gaussian { center, width } => (center - 8.0 * width, center + 8.0 * width),
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            Profile::Bump { lo, hi } => {
                let t = (2.0 * y - lo - hi) / (hi - lo);
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    Float::exp(1.0 - 1.0 / (1.0 - t * t))
                }
            }
            Profile::Box { lo, hi } => {
                if y >= lo && y < hi {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Gaussian { center, width } => {
                let t = (y - center) / width;
                if t.abs() > 8.0 {
                    0.0
                } else {
                    Float::exp(-t * t)
                }
            }
        }
    }

    /// The profile of `y ↦ P(-y)`.
    pub fn reflected(&self) -> Self {
        match *self {
            Profile::Bump { lo, hi } => Profile::Bump { lo: -hi, hi: -lo },
            // Half-open intervals flip to (−hi, −lo]; the boundary point has measure zero.
            Profile::Box { lo, hi } => Profile::Box { lo: -hi, hi: -lo },
            Profile::Gaussian { center, width } => Profile::Gaussian { center: -center, width },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafTerm {
    pub q: Frequency,
    pub c: Complex64,
    pub profile: Profile,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LeafCoefficient {
    terms: Vec<LeafTerm>,
}

impl LeafCoefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(terms: Vec<LeafTerm>) -> Result<Self> {
        for t in &terms {
            t.profile.validate()?;
            if !t.c.re.is_finite() || !t.c.im.is_finite() {
                return Err(Error::InvalidInput("non-finite coefficient".into()));
            }
        }
        Ok(LeafCoefficient { terms: terms.into_iter().filter(|t| t.c != Complex64::new(0.0, 0.0)).collect() })
    }

    /// Every mode of `s` with the same profile.
    pub fn from_series(s: &PontryaginSeries, profile: Profile) -> Result<Self> {
        Self::new(s.terms().map(|(q, c)| LeafTerm { q, c, profile }).collect())
    }

    pub fn terms(&self) -> &[LeafTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.terms.iter().fold(Complex64::new(0.0, 0.0), |acc, t| {
            let p = t.profile.eval(y);
            if p == 0.0 {
                acc
            } else {
                let (s, c) = Float::sin_cos(t.q.to_f64() * x);
                acc + t.c * Complex64::new(c, s) * p
            }
        })
    }

    /// Smallest interval containing every profile support; `None` when zero.
    pub fn y_band(&self) -> Option<(f64, f64)> {
        self.terms.iter().map(|t| t.profile.support()).fold(None, |acc, (lo, hi)| match acc {
            None => Some((lo, hi)),
            Some((a, b)) => Some((a.min(lo), b.max(hi))),
        })
    }

    /// `I_n η`.
    pub fn filter(&self, n: u64) -> Self {
        LeafCoefficient { terms: self.terms.iter().filter(|t| t.q.in_level(n)).copied().collect() }
    }

    /// Least common denominator of the frequencies (1 when zero).
    pub fn lcm_den(&self) -> Option<u64> {
        self.terms.iter().try_fold(1u64, |acc, t| crate::frequency::lcm_u64(acc, t.q.den()))
    }

    /// Series with coefficients `Σ_k |c_k|` per frequency: every sup of a mode
    /// block of `η` is at most the `coeff_l1` of the same block here.
    pub fn envelope_series(&self) -> PontryaginSeries {
        let terms = self.terms.iter().map(|t| (t.q, Complex64::new(t.c.norm(), 0.0)));
        let mut acc = PontryaginSeries::zero();
        for (q, c) in terms {
            acc = acc.add(&PontryaginSeries::monomial(q, c));
        }
        acc
    }

    fn sample_grid(&self) -> SupGrid {
        let (lo, hi) = self.y_band().unwrap_or((0.0, 0.0));
        SupGrid { x_per_turn: 32, ys: (0..=32).map(|k| lo + (hi - lo) * k as f64 / 32.0).collect() }
    }

    /// Grid lower bound and `Σ |c_k|` upper bound of `sup |η|`.
    pub fn sup_bracket(&self) -> SupBracket {
        let upper: f64 = self.terms.iter().map(|t| t.c.norm()).sum();
        let grid = self.sample_grid();
        let p = self.lcm_den().unwrap_or(1).min(1 << 12);
        let count = grid.x_per_turn * p as usize;
        let mut lower = 0.0f64;
        for &y in &grid.ys {
            for k in 0..count {
                let x = crate::TAU * p as f64 * k as f64 / count as f64;
                lower = lower.max(self.eval(x, y).norm());
            }
        }
        SupBracket { lower: lower.min(upper), upper }
    }

    /// Upper ends from [`Self::envelope_series`], lower ends from exact fiber
    /// averages on a sample grid.
    pub fn ren_norm(&self, chain: &Chain) -> RenNormReport {
        let mut report = ren_norm(&self.envelope_series(), chain);
        if self.lcm_den().is_some_and(|p| p <= 1 << 12) {
            if let Ok(s) = ren_norm_sampled(self, chain, &self.sample_grid()) {
                report.head_lower = s.head.min(report.head);
                report.terms_lower = s.terms.iter().zip(&report.terms).map(|(l, u)| l.min(*u)).collect();
            }
        }
        report
    }

    pub fn admit(&self, chain: &Chain) -> AdmissionReport {
        admit_from_parts(self.sup_bracket(), self.ren_norm(chain), false, true)
    }

    /// `η(x, -y) = conj η(x, y)` on a sample grid, to `tol`.
    pub fn is_mirror_symmetric(&self, tol: f64) -> bool {
        let grid = self.sample_grid();
        let p = self.lcm_den().unwrap_or(1).min(64);
        let count = 16 * p as usize;
        grid.ys.iter().all(|&y| {
            (0..count).all(|k| {
                let x = crate::TAU * p as f64 * k as f64 / count as f64;
                (self.eval(x, -y) - self.eval(x, y).conj()).norm() <= tol
            })
        })
    }
}

impl PeriodicField for LeafCoefficient {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        LeafCoefficient::eval(self, x, y)
    }

    fn period_level(&self) -> u64 {
        self.lcm_den().unwrap_or(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles() {
        let b = Profile::Bump { lo: -1.0, hi: 1.0 };
        assert_eq!(b.eval(0.0), 1.0);
        assert_eq!(b.eval(1.0), 0.0);
        assert!((b.eval(0.5) - Float::exp(1.0 - 1.0 / 0.75)).abs() < 1e-15);
        assert_eq!(Profile::Box { lo: 0.0, hi: 1.0 }.eval(1.0), 0.0);
        let g = Profile::Gaussian { center: 0.5, width: 0.1 };
        assert_eq!(g.eval(0.5), 1.0);
        assert_eq!(g.eval(1.4), 0.0);
        assert_eq!(g.reflected().eval(-0.6), g.eval(0.6));
        assert!(Profile::Bump { lo: 1.0, hi: 0.0 }.validate().is_err());
    }

    #[test]
    fn filter_and_band() {
        let prof = Profile::Bump { lo: -0.5, hi: 0.5 };
        let eta = LeafCoefficient::new(alloc::vec![
            LeafTerm { q: Frequency::new(1, 2), c: Complex64::new(0.2, 0.0), profile: prof },
            LeafTerm { q: Frequency::new(1, 4), c: Complex64::new(0.1, 0.0), profile: Profile::Box { lo: -1.0, hi: 0.0 } },
        ])
        .unwrap();
        assert_eq!(eta.filter(2).terms().len(), 1);
        assert_eq!(eta.y_band(), Some((-1.0, 0.5)));
        assert_eq!(eta.lcm_den(), Some(4));
        let b = eta.sup_bracket();
        assert!(b.lower <= b.upper && (b.upper - 0.3).abs() < 1e-15 && b.lower > 0.2);
        assert!(!eta.is_mirror_symmetric(1e-12));
    }

    #[test]
    fn ren_norm_brackets_are_ordered() {
        let prof = Profile::Bump { lo: -0.5, hi: 0.5 };
        let eta = LeafCoefficient::new(alloc::vec![
            LeafTerm { q: Frequency::new(1, 2), c: Complex64::new(0.2, 0.0), profile: prof },
            LeafTerm { q: Frequency::new(3, 4), c: Complex64::new(0.0, 0.1), profile: prof },
        ])
        .unwrap();
        let r = eta.ren_norm(&Chain::p_adic(2, 4).unwrap());
        assert_eq!(r.terms, alloc::vec![0.4, 0.4, 0.0]);
        for (lo, hi) in r.terms_lower.iter().zip(&r.terms) {
            assert!(lo <= hi);
        }
        assert!((r.terms_lower[0] - 0.4).abs() < 1e-12);
        assert!(eta.admit(&Chain::p_adic(2, 4).unwrap()).is_admitted());
    }
}
