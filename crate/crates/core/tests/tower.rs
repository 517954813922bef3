mod common;

use adelic_qc::leaf::{LeafCoefficient, LeafTerm, Profile};
use adelic_qc::plane::{normalize_fix01inf, PlaneSolver};
use adelic_qc::teich::mirror_extend;
use adelic_qc::tower::{
    boundary_samples, level_coefficient, level_coefficient_value, AdelicBeltrami, Tower, TowerConfig,
};
use adelic_qc::{Chain, Complex64, Error, Frequency, ProfiniteInt, SolenoidPoint};
use common::c;
use rand::Rng;
use std::f64::consts::TAU;

const BUMP: Profile = Profile::Bump { lo: -0.6, hi: 0.6 };

fn geometric() -> LeafCoefficient {
    let terms = (1..4).map(|j| LeafTerm { q: Frequency::new(1, 1 << j), c: c(0.45 * 4f64.powi(-j), 0.0), profile: BUMP });
    LeafCoefficient::new(terms.collect()).unwrap()
}

fn periodic() -> LeafCoefficient {
    LeafCoefficient::new(vec![
        LeafTerm { q: Frequency::new(1, 2), c: c(0.3, 0.1), profile: BUMP },
        LeafTerm { q: Frequency::integer(1), c: c(0.1, 0.0), profile: BUMP },
    ])
    .unwrap()
}

fn tower(eta: LeafCoefficient, chain: Chain) -> Tower {
    Tower::solve(AdelicBeltrami::new(eta, chain).unwrap(), TowerConfig::default()).unwrap()
}

#[test]
fn geometric_differences_decrease_without_violations() {
    let t = tower(geometric(), Chain::p_adic(2, 4).unwrap());
    let d = t.diagnostics().unwrap();
    assert_eq!(d.diffs.len(), 3);
    assert!(d.diffs.windows(2).all(|w| w[1] < w[0]), "{:?}", d.diffs);
    assert!(d.violations.is_empty());
    assert!(d.a_prime_est.is_some());
    assert!(d.m_l_est >= 1.0);
}

#[test]
fn periodic_levels_reuse_their_solution() {
    let t = tower(periodic(), Chain::custom(vec![2, 4, 8]).unwrap());
    let solved: Vec<usize> = t.levels().iter().map(|l| l.solved_at).collect();
    assert_eq!(solved, vec![0, 0, 0]);
    let d = t.diagnostics().unwrap();
    assert!(d.diffs.iter().all(|&x| x == 0.0));
    assert!(d.bound_terms.iter().all(|&x| x == 0.0));
    assert_eq!(d.a_prime_est, None);
}

#[test]
fn direct_level_four_solve_agrees_with_the_reused_level_two() {
    // For a coefficient pulled back from level 2, the level-4 solution is the
    // square root of the level-2 one: f_4(w)² = f_2(w²).
    let eta = periodic();
    let cfg = TowerConfig::default();
    let t = tower(eta.clone(), Chain::custom(vec![2, 4]).unwrap());
    let direct = AdelicBeltrami::new(eta, Chain::custom(vec![4]).unwrap()).unwrap();
    let field = level_coefficient(&direct, 0, cfg.half_width, cfg.grid).unwrap();
    let f4 = normalize_fix01inf(&PlaneSolver::new(cfg.half_width, cfg.grid).unwrap().solve(&field, &cfg.solver).unwrap())
        .unwrap();
    let f2 = t.levels()[0].map.as_ref().unwrap();
    let mut worst = 0.0f64;
    for k in 0..40 {
        let w = Complex64::from_polar(0.8 + 0.02 * k as f64, 0.37 * k as f64);
        let (a, b) = (f4.eval(w) * f4.eval(w), f2.eval(w * w));
        worst = worst.max((a - b).norm() / b.norm());
    }
    assert!(worst <= 1e-3, "relative defect {worst}");
}

#[test]
fn level_coefficient_pulls_back_to_the_filtered_leaf_coefficient() {
    let eta = geometric();
    let mut r = common::rng(3);
    for n in [2u64, 4, 8] {
        let eta_n = eta.filter(n);
        for _ in 0..100 {
            let z = c(r.gen_range(-40.0..40.0), r.gen_range(-0.7..0.7));
            let w = (Complex64::i() * z / n as f64).exp();
            // conj(w')/w' = -e^{-2ix/n} along w = e^{iz/n}.
            let back = -level_coefficient_value(&eta_n, n, w) * c(0.0, -2.0 * z.re / n as f64).exp();
            assert!((back - eta_n.eval(z.re, z.im)).norm() <= 1e-8, "n={n} z={z}");
        }
    }
}

#[test]
fn lifts_commute_with_the_deck_translation() {
    let t = tower(geometric(), Chain::p_adic(2, 3).unwrap());
    for j in 0..3 {
        let lift = t.lift(j).unwrap();
        let period = TAU * lift.level() as f64;
        for k in 0..10 {
            let z = c(0.9 * k as f64, 0.05 * k as f64 - 0.2);
            let d = lift.eval(z + period).unwrap() - lift.eval(z).unwrap() - period;
            assert!(d.norm() <= 1e-6, "level {} at {z}: {d}", lift.level());
        }
    }
}

#[test]
fn zero_coefficient_gives_the_identity() {
    let chain = Chain::p_adic(3, 2).unwrap();
    let t = tower(LeafCoefficient::zero(), chain.clone());
    for k in 0..20 {
        let p = SolenoidPoint::exp(ProfiniteInt::from_integer(k, &chain), c(0.4 * k as f64, 0.1 * k as f64 - 1.0));
        for i in 0..2 {
            let q = t.evaluate(&p, i).unwrap();
            assert_eq!(q.a(), p.a());
            assert!((q.z() - p.z()).norm() <= 1e-10, "{} vs {}", q.z(), p.z());
        }
    }
}

#[test]
fn unit_is_fixed_at_every_level() {
    let chain = Chain::p_adic(2, 4).unwrap();
    let t = tower(geometric(), chain.clone());
    let unit = SolenoidPoint::identity(&chain);
    for i in 0..4 {
        let q = t.evaluate(&unit, i).unwrap();
        for &n in chain.levels() {
            assert!((q.project(n).unwrap() - 1.0).norm() <= 1e-10);
        }
    }
}

#[test]
fn mirror_symmetric_coefficients_preserve_the_boundary() {
    let eta = mirror_extend(
        &LeafCoefficient::new(vec![LeafTerm {
            q: Frequency::new(1, 2),
            c: c(0.25, 0.1),
            profile: Profile::Bump { lo: 0.2, hi: 0.9 },
        }])
        .unwrap(),
    );
    let chain = Chain::p_adic(2, 2).unwrap();
    let t = tower(eta, chain.clone());
    let pts = boundary_samples(&chain, 48);
    for i in 0..2 {
        let tr = t.boundary_trace(&pts, i).unwrap();
        assert!(tr.modulus_defect <= 1e-4, "level {i}: {}", tr.modulus_defect);
        assert!(tr.orientation_preserving);
    }
}

#[test]
fn boundary_trace_rejects_asymmetric_coefficients_and_interior_points() {
    let chain = Chain::p_adic(2, 2).unwrap();
    let t = tower(geometric(), chain.clone());
    assert!(matches!(t.boundary_trace(&boundary_samples(&chain, 8), 0), Err(Error::InvalidInput(_))));

    let sym = tower(mirror_extend(&geometric()), chain.clone());
    let inside = [SolenoidPoint::exp(ProfiniteInt::zero(&chain), c(1.0, 0.3))];
    assert!(matches!(sym.boundary_trace(&inside, 0), Err(Error::OutsideWindow(_))));
}

#[test]
fn wide_height_bands_do_not_fit_the_window() {
    // Terms like those of the non-renormalizable example: frequency 1/n!, height
    // scale n!. Level 1 alone would need a plane of radius e^8.
    let chain = Chain::factorial(3).unwrap();
    let terms = (1..=3u64)
        .map(|n| {
            let f = [1u64, 2, 6][n as usize - 1];
            LeafTerm { q: Frequency::new(1, f), c: c(0.02, 0.0), profile: Profile::Gaussian { center: 0.0, width: f as f64 } }
        })
        .collect();
    let mu = AdelicBeltrami::new(LeafCoefficient::new(terms).unwrap(), chain).unwrap();
    match Tower::solve(mu, TowerConfig::default()) {
        Err(Error::WindowTooSmall { required_half_width }) => assert!(required_half_width > 2.9e3),
        other => panic!("expected WindowTooSmall, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn inadmissible_coefficients_are_refused() {
    let big = LeafCoefficient::new(vec![LeafTerm { q: Frequency::integer(1), c: c(1.2, 0.0), profile: BUMP }]).unwrap();
    assert!(matches!(AdelicBeltrami::new(big, Chain::p_adic(2, 2).unwrap()), Err(Error::NotAdmissible(_))));
}
