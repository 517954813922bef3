//! Renormalization operators `I_n`, renormalized norms and vertical diagnostics.

use alloc::vec::Vec;
use num_traits::Float;

use crate::series::SupBracket;
use crate::{Chain, ChainKind, Complex64, Error, PontryaginSeries, ProfiniteInt, Result, TAU};

/// Grid points per period used for the lower ends of sup brackets.
pub const DEFAULT_SUP_SAMPLES: usize = 512;

/// `I_n f`: the terms with `q·n ∈ Z`.
pub fn filter(f: &PontryaginSeries, n: u64) -> PontryaginSeries {
    f.filter(n)
}

/// Terms of `I_{n_j} f - I_{n_{j-1}} f` (for `j = 0`, of `I_{n_1} f`).
pub fn level_block(f: &PontryaginSeries, chain: &Chain, j: usize) -> PontryaginSeries {
    let levels = chain.levels();
    let block = f.filter(levels[j]);
    if j == 0 {
        return block;
    }
    let prev = levels[j - 1];
    let terms = block.terms().filter(|(q, _)| !q.in_level(prev));
    PontryaginSeries::from_terms(terms, false)
        .expect("unflagged")
        .with_reality(block.reality())
        .expect("symmetric subsets of symmetric series stay symmetric")
}

/// `(n/m) Σ_{k<m/n} f(x + 2πnk)`: the Haar average over the fiber of `π_n`
/// for a `2πm`-periodic `f`.
pub fn fiber_average<F>(f: F, m: u64, n: u64, grid: &[Complex64]) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Complex64,
{
    if n == 0 || m % n != 0 {
        return Err(Error::NotDivisible { n, m });
    }
    let count = m / n;
    Ok(grid
        .iter()
        .map(|&x| {
            let s = (0..count).fold(Complex64::new(0.0, 0.0), |acc, k| acc + f(x + TAU * (n * k) as f64));
            s / count as f64
        })
        .collect())
}

/// Evidence about the tail of the renormalized series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailFlag {
    Converged,
    Inconclusive,
    Diverging,
}

impl TailFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            TailFlag::Converged => "converged",
            TailFlag::Inconclusive => "inconclusive",
            TailFlag::Diverging => "diverging",
        }
    }

    /// Classifies the terms `t_j`.
    ///
    /// * converged: the series terminates (trailing zero) or a geometric fit on
    ///   the last five terms has ratio below 0.9;
    /// * diverging: the last three terms are non-decreasing;
    /// * inconclusive otherwise.
    pub fn classify(terms: &[f64]) -> Self {
        if terms.last().map_or(true, |&t| t == 0.0) {
            return TailFlag::Converged;
        }
        if terms.len() >= 3 {
            let l = &terms[terms.len() - 3..];
            if l[1] >= l[0] && l[2] >= l[1] {
                return TailFlag::Diverging;
            }
        }
        let tail: Vec<(f64, f64)> = terms
            .iter()
            .enumerate()
            .skip(terms.len().saturating_sub(5))
            .filter(|(_, &t)| t > 0.0)
            .map(|(i, &t)| (i as f64, Float::ln(t)))
            .collect();
        if tail.len() >= 2 {
            let n = tail.len() as f64;
            let mx = tail.iter().map(|p| p.0).sum::<f64>() / n;
            let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
            let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = tail.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
            if Float::exp(sxy / sxx) < 0.9 {
                return TailFlag::Converged;
            }
        }
        TailFlag::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenNormReport {
    /// `n_1 ‖I_{n_1} μ‖_∞`.
    pub head: f64,
    /// `t_j = n_{j+1} ‖I_{n_{j+1}} μ - I_{n_j} μ‖_∞`, `j = 1..J-1`.
    pub terms: Vec<f64>,
    pub total: f64,
    pub depth: usize,
    pub tail_flag: TailFlag,
    /// Grid lower bounds of `head` and `terms`.
    pub head_lower: f64,
    pub terms_lower: Vec<f64>,
    /// True when `head` and `terms` are certified upper bounds (series input);
    /// false when they are grid values of a sampled field.
    pub certified: bool,
    /// `coeff_l1` of the part of `μ` outside `Per_{n_J}` (series input only).
    pub beyond_depth_l1: f64,
}

fn assemble(head: f64, terms: Vec<f64>, head_lower: f64, terms_lower: Vec<f64>, certified: bool, beyond: f64) -> RenNormReport {
    let total = terms.iter().fold(head, |acc, t| acc + t);
    RenNormReport {
        head,
        depth: terms.len() + 1,
        tail_flag: TailFlag::classify(&terms),
        terms,
        total,
        head_lower,
        terms_lower,
        certified,
        beyond_depth_l1: beyond,
    }
}

/// Renormalized norm of a series; sups are bracketed by
/// [`PontryaginSeries::sup_norm_estimate`] and the report carries the upper ends.
pub fn ren_norm(mu: &PontryaginSeries, chain: &Chain) -> RenNormReport {
    ren_norm_with_samples(mu, chain, DEFAULT_SUP_SAMPLES)
}

pub fn ren_norm_with_samples(mu: &PontryaginSeries, chain: &Chain, samples: usize) -> RenNormReport {
    let levels = chain.levels();
    let brackets: Vec<SupBracket> =
        (0..chain.depth()).map(|j| level_block(mu, chain, j).sup_norm_estimate(samples)).collect();
    let head = levels[0] as f64 * brackets[0].upper;
    let head_lower = levels[0] as f64 * brackets[0].lower;
    let terms = (1..chain.depth()).map(|j| levels[j] as f64 * brackets[j].upper).collect();
    let terms_lower = (1..chain.depth()).map(|j| levels[j] as f64 * brackets[j].lower).collect();
    let beyond = mu.terms().filter(|(q, _)| !q.in_level(chain.top())).map(|(_, a)| a.norm()).sum();
    assemble(head, terms, head_lower, terms_lower, true, beyond)
}

/// A leafwise field `(x, y) ↦ μ(x + iy)` that is exactly `2πP`-periodic in `x`.
pub trait PeriodicField {
    fn eval(&self, x: f64, y: f64) -> Complex64;
    /// The level `P`.
    fn period_level(&self) -> u64;
}

/// Sampling of a sampled renormalized norm: `x_per_turn` points per `2π` in
/// `x`, and the listed heights `ys`.
#[derive(Debug, Clone)]
pub struct SupGrid {
    pub x_per_turn: usize,
    pub ys: Vec<f64>,
}

fn fiber_mean<F: PeriodicField + ?Sized>(f: &F, n: u64, x: f64, y: f64) -> Complex64 {
    let p = f.period_level();
    if n % p == 0 {
        return f.eval(x, y);
    }
    let count = p / n;
    let s = (0..count).fold(Complex64::new(0.0, 0.0), |acc, k| acc + f.eval(x + TAU * (n * k) as f64, y));
    s / count as f64
}

/// Renormalized norm of a sampled periodic field, with every `I_{n_j}` taken
/// as an exact fiber average. Sups are grid maxima (uncertified).
pub fn ren_norm_sampled<F: PeriodicField + ?Sized>(f: &F, chain: &Chain, grid: &SupGrid) -> Result<RenNormReport> {
    let p = f.period_level();
    for &n in chain.levels() {
        if p % n != 0 && n % p != 0 {
            return Err(Error::NotDivisible { n, m: p });
        }
    }
    let levels = chain.levels();
    let sup_over = |n_span: u64, g: &dyn Fn(f64, f64) -> Complex64| -> f64 {
        let span = n_span.min(p);
        let count = grid.x_per_turn * span as usize;
        let mut m = 0.0f64;
        for &y in &grid.ys {
            for k in 0..count {
                let x = TAU * span as f64 * k as f64 / count as f64;
                m = m.max(g(x, y).norm());
            }
        }
        m
    };
    let n1 = levels[0];
    let head = n1 as f64 * sup_over(n1, &|x, y| fiber_mean(f, n1, x, y));
    let terms: Vec<f64> = levels
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            b as f64 * sup_over(b, &|x, y| fiber_mean(f, b, x, y) - fiber_mean(f, a, x, y))
        })
        .collect();
    Ok(assemble(head, terms.clone(), head, terms, false, 0.0))
}

/// Enclosure of a renormalized norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
}

/// Relative widening applied to brackets to cover rounding in their sums.
pub const ROUNDING_REL: f64 = 1e-12;

/// Renormalized norm with tight sup brackets on every level block, widened
/// by [`ROUNDING_REL`].
pub fn ren_norm_bracket(mu: &PontryaginSeries, chain: &Chain) -> NormBracket {
    let mut lower = 0.0;
    let mut upper = 0.0;
    for (j, &n) in chain.levels().iter().enumerate() {
        let b = level_block(mu, chain, j).sup_bracket_tight(256);
        lower += n as f64 * b.lower;
        upper += n as f64 * b.upper;
    }
    NormBracket { lower: lower * (1.0 - ROUNDING_REL), upper: upper * (1.0 + ROUNDING_REL) }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubmultReport {
    /// `‖fg‖_P`.
    pub product: NormBracket,
    /// `‖f‖_P ‖g‖_P`.
    pub bound: NormBracket,
    /// Both sides with `coeff_l1` in place of every sup.
    pub product_l1: f64,
    pub bound_l1: f64,
    /// No certified violation: `product.lower ≤ bound.upper`.
    pub holds: bool,
}

/// Both sides of `‖fg‖_P ≤ ‖f‖_P ‖g‖_P` on a p-adic chain.
pub fn submultiplicativity_check(f: &PontryaginSeries, g: &PontryaginSeries, chain: &Chain) -> Result<SubmultReport> {
    if !matches!(chain.kind(), ChainKind::PAdic(_)) {
        return Err(Error::InvalidChain("submultiplicativity is checked on p-adic chains".into()));
    }
    let fg = f.mul(g);
    let (nf, ng, nfg) = (ren_norm_bracket(f, chain), ren_norm_bracket(g, chain), ren_norm_bracket(&fg, chain));
    let bound = NormBracket {
        lower: nf.lower * ng.lower * (1.0 - ROUNDING_REL),
        upper: nf.upper * ng.upper * (1.0 + ROUNDING_REL),
    };
    let product_l1 = ren_norm(&fg, chain).total;
    let bound_l1 = ren_norm(f, chain).total * ren_norm(g, chain).total;
    Ok(SubmultReport { product: nfg, bound, product_l1, bound_l1, holds: nfg.lower <= bound.upper })
}

/// `‖μ - I_{n_j} μ‖_∞` for every level.
pub fn vertical_modulus(mu: &PontryaginSeries, chain: &Chain) -> Vec<SupBracket> {
    chain
        .levels()
        .iter()
        .map(|&n| mu.sub(&mu.filter(n)).sup_norm_estimate(DEFAULT_SUP_SAMPLES))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerticalDerivative {
    /// Upper bounds `n_j Σ |a_q| |e^{2πiqn_j} - 1|` of `n_j ‖μ∘m_{n_j} - μ‖_∞`.
    pub values: Vec<f64>,
    /// `2 Σ_{i≥j} t_i`, over a chain extended until it covers `μ`
    /// (infinite when the chain cannot be extended).
    pub bounds: Vec<f64>,
}

/// Difference quotients along the fiber direction, `μ∘m_{n_j}(x) = μ(x + 2πn_j)`.
pub fn vertical_derivative_along(mu: &PontryaginSeries, chain: &Chain) -> VerticalDerivative {
    let values: Vec<f64> = chain.levels().iter().map(|&n| n as f64 * mu.shift_defect_l1(n)).collect();
    let full = mu.lcm_den().and_then(|l| chain.extend_to_cover(l, 64).ok());
    let bounds = match full {
        Some(full) => {
            let t = ren_norm_with_samples(mu, &full, 1).terms;
            (0..chain.depth()).map(|j| 2.0 * t[j.min(t.len())..].iter().sum::<f64>()).collect()
        }
        None => alloc::vec![f64::INFINITY; chain.depth()],
    };
    VerticalDerivative { values, bounds }
}

/// `‖x‖_p` of a truncated p-adic integer on the chain `(1, p, p², ...)`.
/// Residues that vanish at the top level are treated as 0.
pub fn padic_norm(x: &ProfiniteInt) -> Result<f64> {
    let p = match x.chain().kind() {
        ChainKind::PAdic(p) => p,
        _ => return Err(Error::InvalidChain("p-adic chain required".into())),
    };
    let d = x.divisibility_depth();
    if d == x.chain().depth() {
        return Ok(0.0);
    }
    Ok(Float::powi(p as f64, -(d as i32 - 1)))
}

/// Quotients `(‖x + p^j‖_p - ‖x‖_p) / ‖p^j‖_p` for `j = 1..J-2`; they settle
/// at 1 for `x = 0` and at 0 otherwise.
pub fn padic_norm_difference_quotients(x: &ProfiniteInt) -> Result<Vec<f64>> {
    let p = match x.chain().kind() {
        ChainKind::PAdic(p) => p,
        _ => return Err(Error::InvalidChain("p-adic chain required".into())),
    };
    let nx = padic_norm(x)?;
    let depth = x.chain().depth();
    (1..depth.saturating_sub(1))
        .map(|j| {
            let step = ProfiniteInt::from_integer(Float::powi(p as f64, j as i32) as i64, x.chain());
            let shifted = x.add(&step)?;
            Ok((padic_norm(&shifted)? - nx) / padic_norm(&step)?)
        })
        .collect()
}
