//! Admission of Beltrami differentials: `‖μ‖_∞ < 1` plus a finite
//! renormalized norm.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::renorm::{ren_norm, RenNormReport, TailFlag};
use crate::series::SupBracket;
use crate::{Chain, PontryaginSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Admitted,
    Rejected,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rejection {
    /// The sup bracket lies at or above 1.
    SupNorm { lower: f64 },
    /// `‖μ‖_∞ < 1` but the renormalized series diverges.
    NonRenormalizable,
    /// Reality flag set on a series that is not conjugate symmetric.
    RealityViolated,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::SupNorm { lower } => write!(f, "sup norm at least {lower} >= 1"),
            Rejection::NonRenormalizable => f.write_str("vertical-continuous yet non-renormalizable"),
            Rejection::RealityViolated => f.write_str("reality flag set on a non-symmetric series"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// The sup bracket straddles 1; admitted on the lower end.
    SupBracketStraddlesOne(SupBracket),
    /// The renormalized tail could not be classified.
    TailInconclusive,
    /// Mass outside the deepest level, not seen by the truncated norm.
    BeyondDepth(f64),
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::SupBracketStraddlesOne(b) => write!(f, "sup bracket [{}, {}] straddles 1", b.lower, b.upper),
            Warning::TailInconclusive => f.write_str("renormalized tail inconclusive"),
            Warning::BeyondDepth(m) => write!(f, "coefficient mass {m} beyond the truncation depth"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissionReport {
    pub verdict: Verdict,
    pub sup: SupBracket,
    pub ren: RenNormReport,
    pub reality: bool,
    pub rejections: Vec<Rejection>,
    pub warnings: Vec<Warning>,
}

impl AdmissionReport {
    pub fn is_admitted(&self) -> bool {
        self.verdict == Verdict::Admitted
    }

    /// One-line summary of the verdict and its reasons.
    pub fn summary(&self) -> String {
        use core::fmt::Write;
        let mut s = String::from(match self.verdict {
            Verdict::Admitted => "admitted",
            Verdict::Rejected => "rejected",
        });
        for r in &self.rejections {
            let _ = write!(s, "; {r}");
        }
        for w in &self.warnings {
            let _ = write!(s, "; warning: {w}");
        }
        s
    }
}

/// Admission of a series on `chain`, with the tight sup bracket.
pub fn admit_beltrami(mu: &PontryaginSeries, chain: &Chain) -> AdmissionReport {
    let reality_ok = !mu.reality() || mu.is_real_symmetric();
    admit_from_parts(mu.sup_bracket_tight(256), ren_norm(mu, chain), mu.reality(), reality_ok)
}

/// Admission from precomputed pieces, for sampled fields.
pub fn admit_from_parts(sup: SupBracket, ren: RenNormReport, reality: bool, reality_ok: bool) -> AdmissionReport {
    let mut rejections = Vec::new();
    let mut warnings = Vec::new();
    if sup.lower >= 1.0 {
        rejections.push(Rejection::SupNorm { lower: sup.lower });
    } else if sup.upper >= 1.0 {
        warnings.push(Warning::SupBracketStraddlesOne(sup));
    }
    match ren.tail_flag {
        TailFlag::Diverging if rejections.is_empty() => rejections.push(Rejection::NonRenormalizable),
        TailFlag::Inconclusive => warnings.push(Warning::TailInconclusive),
        _ => {}
    }
    if ren.beyond_depth_l1 > 0.0 {
        warnings.push(Warning::BeyondDepth(ren.beyond_depth_l1));
    }
    if !reality_ok {
        rejections.push(Rejection::RealityViolated);
    }
    let verdict = if rejections.is_empty() { Verdict::Admitted } else { Verdict::Rejected };
    AdmissionReport { verdict, sup, ren, reality, rejections, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Complex64, Frequency};

    #[test]
    fn zero_is_admitted() {
        let r = admit_beltrami(&PontryaginSeries::zero(), &Chain::p_adic(2, 4).unwrap());
        assert!(r.is_admitted());
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn constant_two_is_rejected() {
        let r = admit_beltrami(&PontryaginSeries::constant(Complex64::new(2.0, 0.0)), &Chain::p_adic(2, 4).unwrap());
        assert_eq!(r.verdict, Verdict::Rejected);
        assert_eq!(r.rejections, alloc::vec![Rejection::SupNorm { lower: 2.0 }]);
    }

    #[test]
    fn small_fractional_series_is_admitted() {
        let mu = PontryaginSeries::cos_mode(Frequency::new(1, 4), 0.3).add(&PontryaginSeries::sin_mode(Frequency::new(1, 2), 0.1));
        let r = admit_beltrami(&mu, &Chain::p_adic(2, 4).unwrap());
        assert!(r.is_admitted(), "{}", r.summary());
        assert!(r.reality);
    }

    #[test]
    fn diverging_tail_is_non_renormalizable() {
        let sup = SupBracket { lower: 0.3, upper: 0.4 };
        let ren = crate::renorm::ren_norm(&PontryaginSeries::zero(), &Chain::p_adic(2, 3).unwrap());
        let ren = RenNormReport { terms: alloc::vec![0.1, 0.1, 0.1], tail_flag: TailFlag::Diverging, ..ren };
        let r = admit_from_parts(sup, ren, false, true);
        assert_eq!(r.rejections, alloc::vec![Rejection::NonRenormalizable]);
        assert!(r.summary().contains("vertical-continuous yet non-renormalizable"));
    }
}
