//! Seeded generators and small oracles shared by the integration tests.

#![allow(dead_code)]

use adelic_qc::grid::GridField;
use adelic_qc::leaf::{LeafCoefficient, LeafTerm, Profile};
use adelic_qc::plane::infinitesimal_deformation;
use adelic_qc::teich::mirror_extend;
use adelic_qc::tower::{level_coefficient, AdelicBeltrami};
use adelic_qc::{Chain, Complex64, Frequency, PontryaginSeries};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A p-adic chain with `p ∈ {2, 3}` and depth `1..=6`.
pub fn random_chain(rng: &mut ChaCha8Rng) -> Chain {
    let p = if rng.gen_bool(0.5) { 2 } else { 3 };
    Chain::p_adic(p, rng.gen_range(1..=6)).unwrap()
}

/// `1..=max_terms` terms with denominators among the chain levels,
/// `|num| ≤ 3 den` and coefficients in the unit square.
pub fn random_series(rng: &mut ChaCha8Rng, chain: &Chain, max_terms: usize) -> PontryaginSeries {
    let levels = chain.levels();
    let k = rng.gen_range(1..=max_terms);
    let terms: Vec<(Frequency, Complex64)> = (0..k)
        .map(|_| {
            let den = levels[rng.gen_range(0..levels.len())];
            let bound = 3 * den as i64;
            let num = rng.gen_range(-bound..=bound);
            (Frequency::new(num, den), c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        })
        .collect();
    PontryaginSeries::from_terms(terms, false).unwrap()
}

/// Real series: every drawn term gets its conjugate partner.
pub fn random_real_series(rng: &mut ChaCha8Rng, chain: &Chain, max_terms: usize) -> PontryaginSeries {
    let s = random_series(rng, chain, max_terms);
    let mirrored: Vec<(Frequency, Complex64)> =
        s.terms().flat_map(|(q, a)| [(q, a * 0.5), (-q, a.conj() * 0.5)]).collect();
    PontryaginSeries::from_terms(mirrored, true).unwrap()
}

/// Real, mean-zero series with two conjugate pairs new at every level `n`
/// (numerators prime to `n / n_prev`), `|a_q| ∈ [amp/2, amp] · n^{-3}`.
pub fn random_decaying_series(rng: &mut ChaCha8Rng, chain: &Chain, amp: f64) -> PontryaginSeries {
    let mut terms = Vec::new();
    let mut prev = 0u64;
    for &n in chain.levels() {
        for _ in 0..2 {
            let num = loop {
                let k = rng.gen_range(-(2 * n as i64)..=2 * n as i64);
                if k != 0 && (prev == 0 || k % (n / prev) as i64 != 0) {
                    break k;
                }
            };
            let a = Complex64::from_polar(rng.gen_range(0.5..1.0), rng.gen_range(0.0..TAU)) * (amp / (n as f64).powi(3));
            let q = Frequency::new(num, n);
            terms.push((q, a));
            terms.push((-q, a.conj()));
        }
        prev = n;
    }
    PontryaginSeries::from_terms(terms, true).unwrap()
}

/// Proptest strategy for series on `chain`.
pub fn series_strategy(chain: Chain, max_terms: usize) -> impl Strategy<Value = PontryaginSeries> {
    let levels = chain.levels().to_vec();
    prop::collection::vec((0..levels.len(), -1000i64..1000, -1.0f64..1.0, -1.0f64..1.0), 1..=max_terms).prop_map(
        move |raw| {
            let terms = raw.into_iter().map(|(j, k, re, im)| {
                let den = levels[j];
                (Frequency::new(k % (3 * den as i64 + 1), den), c(re, im))
            });
            PontryaginSeries::from_terms(terms, false).unwrap()
        },
    )
}

/// Proptest strategy for a p-adic chain and a series on it.
pub fn chain_and_series(max_terms: usize) -> impl Strategy<Value = (Chain, PontryaginSeries)> {
    (prop_oneof![Just(2u64), Just(3u64)], 1usize..=6)
        .prop_flat_map(move |(p, d)| {
            let chain = Chain::p_adic(p, d).unwrap();
            (Just(chain.clone()), series_strategy(chain, max_terms))
        })
}

/// Tangential part `v(θ)` of `ḟ(e^{iθ}) = i e^{iθ} v(θ)` for the mirror
/// extension of `eta` solved on the level-1 plane, plus the largest normal
/// component seen.
pub fn boundary_field(eta: &LeafCoefficient, thetas: &[f64]) -> (Vec<f64>, f64) {
    let mu = AdelicBeltrami::new(mirror_extend(eta), Chain::p_adic(2, 1).unwrap()).unwrap();
    let g: GridField = level_coefficient(&mu, 0, 4.0, 512).unwrap();
    let pts: Vec<Complex64> = thetas.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let fd = infinitesimal_deformation(&g, &pts).unwrap();
    let tangent: Vec<Complex64> = fd.iter().zip(&pts).map(|(d, w)| d / (Complex64::i() * w)).collect();
    let normal = tangent.iter().map(|t| t.im.abs()).fold(0.0, f64::max);
    (tangent.iter().map(|t| t.re).collect(), normal)
}

/// Interior one-sided coefficient whose modes are visible on the unit circle.
pub fn hilbert_fixture() -> LeafCoefficient {
    let prof = Profile::Bump { lo: 0.3, hi: 1.2 };
    LeafCoefficient::new(vec![
        LeafTerm { q: Frequency::integer(-2), c: c(0.1, 0.05), profile: prof },
        LeafTerm { q: Frequency::integer(-3), c: c(0.05, 0.0), profile: prof },
        LeafTerm { q: Frequency::integer(-5), c: c(0.025, -0.05), profile: prof },
        LeafTerm { q: Frequency::integer(0), c: c(0.05, 0.025), profile: prof },
    ])
    .unwrap()
}

/// Trigonometric interpolant of equispaced real samples on `[0, 2π)`,
/// without its mean and Nyquist mode.
pub fn dft_series(samples: &[f64]) -> PontryaginSeries {
    let m = samples.len();
    let terms = (1..(m / 2) as i64).flat_map(|k| {
        let a: Complex64 = samples
            .iter()
            .enumerate()
            .map(|(j, &v)| v * Complex64::from_polar(1.0, -(k as f64) * TAU * j as f64 / m as f64))
            .sum::<Complex64>()
            / m as f64;
        [(Frequency::integer(k), a), (Frequency::integer(-k), a.conj())]
    });
    PontryaginSeries::from_terms(terms, true).unwrap()
}

/// Comparison of `v[iη]` against `Ĵ v[η]` on 16 off-grid boundary probes,
/// both with their rotation constant removed. Returns the max error relative
/// to the max of `|Ĵ v[η]|`.
pub fn hilbert_defect(eta: &LeafCoefficient) -> f64 {
    let grid: Vec<f64> = (0..64).map(|k| TAU * k as f64 / 64.0).collect();
    let probes: Vec<f64> = (0..16).map(|k| TAU * (k as f64 + 0.37) / 16.0).collect();
    let ieta = LeafCoefficient::new(eta.terms().iter().map(|t| LeafTerm { c: t.c * Complex64::i(), ..*t }).collect())
        .unwrap();
    let (v, _) = boundary_field(eta, &grid);
    let jv = adelic_qc::teich::almost_complex_j(&dft_series(&v)).unwrap();
    let (vi_grid, _) = boundary_field(&ieta, &grid);
    let mean = vi_grid.iter().sum::<f64>() / 64.0;
    let (vi, _) = boundary_field(&ieta, &probes);
    let ev = jv.evaluator();
    let scale = probes.iter().map(|&t| ev.at_real(t).re.abs()).fold(0.0, f64::max);
    probes.iter().zip(&vi).map(|(&t, &w)| (w - mean - ev.at_real(t).re).abs()).fold(0.0, f64::max) / scale
}

/// `−(1/π) ∬_D ζ(ζ-1)/(z(z-1)(z-ζ))` over the unit disk by the polar
/// midpoint rule on an `m × m` grid in `(r, θ)`.
pub fn disk_deformation_oracle(zeta: Complex64, m: usize) -> Complex64 {
    let dr = 1.0 / m as f64;
    let dt = TAU / m as f64;
    let one = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..m {
        let r = (i as f64 + 0.5) * dr;
        let mut ring = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let z = Complex64::from_polar(r, (j as f64 + 0.5) * dt);
            ring += one / (z * (z - one) * (z - zeta));
        }
        acc += ring * r;
    }
    -(zeta * (zeta - one)) * acc * (dr * dt) / std::f64::consts::PI
}
