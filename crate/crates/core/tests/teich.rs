mod common;

use adelic_qc::teich::{
    ab_extension, ab_extension_integral, almost_complex_j, cm_distance, d_id_phi, nag_verjovsky_mu, SolenoidDiffeo,
};
use adelic_qc::{Chain, Complex64, Frequency, PontryaginSeries};
use common::{c, rng};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// A real series with `h(0) = 0`.
fn random_h(r: &mut ChaCha8Rng, dens: &[u64], amp: f64) -> PontryaginSeries {
    let mut h = PontryaginSeries::zero();
    for _ in 0..3 {
        let den = dens[r.gen_range(0..dens.len())];
        let q = Frequency::new(r.gen_range(1..=2 * den as i64), den);
        h = h
            .add(&PontryaginSeries::sin_mode(q, amp * r.gen_range(-1.0..1.0)))
            .add(&PontryaginSeries::cos_mode(q, amp * r.gen_range(-1.0..1.0) * 0.5));
    }
    // Cancel the value at 0 with one cosine of the lowest frequency present.
    let at0 = h.eval_baseleaf(c(0.0, 0.0)).re;
    let q = Frequency::new(1, dens[0]);
    h.sub(&PontryaginSeries::cos_mode(q, at0)).with_reality(true).unwrap()
}

fn diffeo(r: &mut ChaCha8Rng, chain: &Chain, amp: f64) -> SolenoidDiffeo {
    SolenoidDiffeo::new(random_h(r, chain.levels(), amp), chain.clone()).unwrap()
}

#[test]
fn cm_distance_is_a_metric_on_random_triples() {
    let mut r = rng(11);
    let chain = Chain::p_adic(2, 3).unwrap();
    for _ in 0..50 {
        let (f, g, h) = (diffeo(&mut r, &chain, 0.05), diffeo(&mut r, &chain, 0.05), diffeo(&mut r, &chain, 0.05));
        for m in 0..3 {
            let fg = cm_distance(&f, &g, m).unwrap();
            assert_eq!(fg, cm_distance(&g, &f, m).unwrap());
            assert_eq!(cm_distance(&f, &f, m).unwrap(), 0.0);
            assert!(fg > 0.0);
            let via = cm_distance(&f, &h, m).unwrap() + cm_distance(&h, &g, m).unwrap();
            assert!(fg <= via * (1.0 + 1e-12), "m={m}: {fg} > {via}");
        }
    }
    assert!(cm_distance(&SolenoidDiffeo::identity(&chain), &SolenoidDiffeo::identity(&Chain::p_adic(3, 2).unwrap()), 0)
        .is_err());
}

#[test]
fn c0_distance_is_controlled_by_c1_on_integer_frequencies() {
    let mut r = rng(12);
    let chain = Chain::p_adic(2, 1).unwrap();
    let id = SolenoidDiffeo::identity(&chain);
    for _ in 0..200 {
        let f = SolenoidDiffeo::new(
            {
                // Mean zero, so the coefficient ℓ¹ bound applies.
                let mut h = PontryaginSeries::zero();
                for k in 1..=4 {
                    h = h.add(&PontryaginSeries::sin_mode(Frequency::integer(k), 0.05 * r.gen_range(-1.0..1.0)));
                }
                let b = 0.05 * r.gen_range(-1.0..1.0);
                h.add(&PontryaginSeries::cos_mode(Frequency::integer(1), b))
                    .sub(&PontryaginSeries::cos_mode(Frequency::integer(3), b))
            },
            chain.clone(),
        )
        .unwrap();
        let (d0, d1) = (cm_distance(&f, &id, 0).unwrap(), cm_distance(&f, &id, 1).unwrap());
        assert!(d0 <= PI / 3f64.sqrt() * d1, "{d0} > (π/√3) {d1}");
    }
}

#[test]
fn c0_control_fails_for_fractional_frequencies() {
    // ε sin(x/2) on the level-2 chain: d_0 = 2ε, d_1 = 2·ε/2 = ε.
    let chain = Chain::p_adic(2, 2).unwrap();
    let eps = 0.01;
    let f = SolenoidDiffeo::new(PontryaginSeries::sin_mode(Frequency::new(1, 2), eps), chain.clone()).unwrap();
    let id = SolenoidDiffeo::identity(&chain);
    let (d0, d1) = (cm_distance(&f, &id, 0).unwrap(), cm_distance(&f, &id, 1).unwrap());
    assert!((d0 - 2.0 * eps).abs() <= 1e-15 && (d1 - eps).abs() <= 1e-15);
    assert!(d0 > PI / 3f64.sqrt() * d1);
}

#[test]
fn extension_agrees_with_the_averaging_integral() {
    let mut r = rng(13);
    let chain = Chain::p_adic(3, 2).unwrap();
    for _ in 0..20 {
        let f = diffeo(&mut r, &chain, 0.05);
        for _ in 0..10 {
            let z = c(r.gen_range(-20.0..20.0), r.gen_range(-3.0..3.0));
            let d = (ab_extension(&f, z) - ab_extension_integral(&f, z, 1e-13)).norm();
            assert!(d <= 1e-8, "{z}: {d}");
        }
    }
}

#[test]
fn nv_denominator_stays_within_its_certificate() {
    let mut r = rng(14);
    let chain = Chain::p_adic(2, 3).unwrap();
    for _ in 0..30 {
        let f = diffeo(&mut r, &chain, 0.03);
        let Ok(nv) = nag_verjovsky_mu(&f) else {
            continue;
        };
        assert!(nv.certificate < 1.0);
        for _ in 0..200 {
            let (x, y) = (r.gen_range(-30.0..30.0), r.gen_range(-40.0..40.0));
            assert!((nv.denominator(x, y) - 1.0).norm() <= nv.certificate * (1.0 + 1e-12));
            assert!(nv.eval(x, y).norm() < 1.0);
        }
    }
}

#[test]
fn linearization_is_the_first_order_part() {
    let chain = Chain::p_adic(2, 2).unwrap();
    let v = PontryaginSeries::sin_mode(Frequency::new(1, 2), 0.2)
        .add(&PontryaginSeries::sin_mode(Frequency::integer(1), 0.1))
        .with_reality(true)
        .unwrap();
    let lin = d_id_phi(&v).unwrap();
    let err = |t: f64| {
        let f = SolenoidDiffeo::new(v.scale(c(t, 0.0)), chain.clone()).unwrap();
        let nv = nag_verjovsky_mu(&f).unwrap();
        (0..50)
            .map(|k| {
                let (x, y) = (0.7 * k as f64, 0.1 * k as f64 - 2.0);
                (nv.eval(x, y) - lin.eval(x, y) * t).norm()
            })
            .fold(0.0, f64::max)
    };
    let ratio = err(0.02) / err(0.01);
    assert!((3.0..=5.0).contains(&ratio), "{ratio}");
}

#[test]
fn hilbert_transform_identity_for_boundary_fields() {
    let defect = common::hilbert_defect(&common::hilbert_fixture());
    assert!(defect <= 1e-6, "{defect}");
}

proptest! {
    #[test]
    fn j_squares_to_minus_one((_, s) in common::chain_and_series(8)) {
        let s = s.sub(&PontryaginSeries::constant(s.coefficient(Frequency::ZERO)));
        let jj = almost_complex_j(&almost_complex_j(&s).unwrap()).unwrap();
        prop_assert_eq!(jj, s.neg());
    }

    #[test]
    fn j_preserves_reality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let chain = Chain::p_adic(3, 3).unwrap();
        let s = common::random_real_series(&mut r, &chain, 4);
        let s = s.sub(&PontryaginSeries::constant(s.coefficient(Frequency::ZERO))).with_reality(true).unwrap();
        let js = almost_complex_j(&s).unwrap();
        prop_assert!(js.is_real_symmetric());
        for k in 0..8 {
            prop_assert!(js.eval_baseleaf(Complex64::new(3.1 * k as f64, 0.0)).im.abs() <= 1e-12);
        }
    }
}
