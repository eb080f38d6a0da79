use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use so42::algebra::{Family, GeneratorId::*};
use so42::classical::*;

fn report(sign: EnergySign, seed: u64) -> RelationReport {
    verify_relations(sign, 100, seed).unwrap()
}

#[test]
fn negative_energy_relations() {
    let r = report(EnergySign::Negative, 11);
    assert!(r.passed, "bracket {} motion {}", r.max_relation_residual, r.max_motion_residual);
    assert_eq!(r.relations.len(), 105);
    assert_eq!(r.constant_of_motion.len(), 15);
    assert_eq!(r.radial_term.family, Family::A);
    assert_eq!(r.radial_term.chosen, RadialTerm::Plus);
    assert!(r.radial_term.minus_residual > 1e-2);
    assert_eq!(r.chosen_flips, vec![Family::B, Family::S]);
    assert!(!r.global_flip);
    assert_eq!(r.convention, "{x,y} = z");
    // the printed formulas do not satisfy the table as they stand
    assert!(r.printed_max_residual > 1e-2);
}

#[test]
fn positive_energy_relations() {
    let r = report(EnergySign::Positive, 12);
    assert!(r.passed, "bracket {} motion {}", r.max_relation_residual, r.max_motion_residual);
    assert_eq!(r.radial_term.family, Family::B);
    assert_eq!(r.radial_term.chosen, RadialTerm::Plus);
    assert!(r.chosen_flips.is_empty());
}

#[test]
fn sign_patterns_form_an_orbit_of_eight() {
    for sign in [EnergySign::Negative, EnergySign::Positive] {
        let r = report(sign, 5);
        assert_eq!(r.valid_sign_patterns.len(), 8, "{sign:?}");
        // flipping all families is the global convention flip, never valid
        assert!(r.valid_sign_patterns.iter().all(|p| p.flipped.len() < 7));
        // L is never flipped in a valid pattern
        assert!(r.valid_sign_patterns.iter().all(|p| !p.flipped.contains(&Family::L)));
    }
}

#[test]
fn canonical_matches_search() {
    for sign in [EnergySign::Negative, EnergySign::Positive] {
        let r = report(sign, 99);
        let c = Realization::canonical(sign);
        assert_eq!(c.radial, r.radial_term.chosen);
        assert_eq!(c.flipped_families(), r.chosen_flips);
    }
}

#[test]
fn report_is_deterministic() {
    let a = serde_json::to_string(&report(EnergySign::Negative, 3)).unwrap();
    let b = serde_json::to_string(&report(EnergySign::Negative, 3)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn printed_time_derivatives_hold_without_flips() {
    // the printed [H, G] blocks describe the formulas as printed
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(4);
    for sign in [EnergySign::Negative, EnergySign::Positive] {
        let (pts, _) = SamplingWindow::default().sample(sign, 30, &mut rng);
        let real = Realization::printed(sign);
        for x in &pts {
            let r = time_derivative_residuals(&real, x, 1e-5).unwrap();
            assert!(r.iter().all(|v| *v < 1e-5), "{sign:?} {r:?}");
        }
    }
}

#[test]
fn spot_constant_of_motion() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(8);
    let (neg, _) = SamplingWindow::default().sample(EnergySign::Negative, 5, &mut rng);
    let (pos, _) = SamplingWindow::default().sample(EnergySign::Positive, 5, &mut rng);
    for x in &neg {
        assert!(verify_constant_of_motion(RealizationFn::new(B2, EnergySign::Negative), x).unwrap() < 1e-5);
        assert!(verify_constant_of_motion(RealizationFn::new(L1, EnergySign::Negative), x).unwrap() < 1e-9);
    }
    for x in &pos {
        assert!(verify_constant_of_motion(RealizationFn::new(G3, EnergySign::Positive), x).unwrap() < 1e-5);
    }
}

#[test]
fn richardson_variant_is_tighter() {
    let opts = VerifyOptions {
        richardson: true,
        ..Default::default()
    };
    let r = verify_relations_with(EnergySign::Negative, 40, 2, &opts).unwrap();
    assert!(r.passed);
    assert!(r.max_relation_residual < 1e-6);
}

#[test]
fn wide_window_loses_precision() {
    // near |ζ| = 50 the hyperbolic terms swamp a 1e-5 absolute tolerance
    let opts = VerifyOptions {
        window: SamplingWindow::wide(),
        ..Default::default()
    };
    let r = verify_relations_with(EnergySign::Positive, 200, 1, &opts).unwrap();
    assert!(r.max_relation_residual.max(r.max_motion_residual) > 1e-5);
}

// Analytic partial derivatives of L = r × p.
fn l_jacobian(r: [f64; 3], p: [f64; 3]) -> [[f64; 6]; 3] {
    [
        [0.0, p[2], -p[1], 0.0, -r[2], r[1]],
        [-p[2], 0.0, p[0], r[2], 0.0, -r[0]],
        [p[1], -p[0], 0.0, -r[1], r[0], 0.0],
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn angular_brackets_match_analytic(
        r in prop::array::uniform3(-3.0f64..3.0),
        p in prop::array::uniform3(-0.6f64..0.6),
        i in 0usize..3, j in 0usize..3,
    ) {
        let x = PhasePoint::new(r, p, 0.0);
        prop_assume!(x.radius() > 0.5 && x.energy() < -0.05);
        let l = [L1, L2, L3];
        let fd = poisson_bracket(RealizationFn::new(l[i], EnergySign::Negative), RealizationFn::new(l[j], EnergySign::Negative), &x, 1e-5).unwrap();
        let jac = l_jacobian(r, p);
        let exact: f64 = (0..3).map(|k| jac[i][k] * jac[j][3 + k] - jac[i][3 + k] * jac[j][k]).sum();
        prop_assert!((fd - exact).abs() < 1e-8);
    }

    #[test]
    fn bracket_is_antisymmetric(seed in 0u64..1000, a in 0usize..15, b in 0usize..15) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let (pts, _) = SamplingWindow::default().sample(EnergySign::Negative, 1, &mut rng);
        let ga = so42::GeneratorId::from_index(a).unwrap();
        let gb = so42::GeneratorId::from_index(b).unwrap();
        let f = RealizationFn::new(ga, EnergySign::Negative);
        let g = RealizationFn::new(gb, EnergySign::Negative);
        let ab = poisson_bracket(f, g, &pts[0], 1e-5).unwrap();
        let ba = poisson_bracket(g, f, &pts[0], 1e-5).unwrap();
        prop_assert!((ab + ba).abs() < 1e-12);
        prop_assert!(poisson_bracket(f, f, &pts[0], 1e-5).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rotations_leave_scalars_invariant(seed in 0u64..1000) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        for sign in [EnergySign::Negative, EnergySign::Positive] {
            let (pts, _) = SamplingWindow::default().sample(sign, 1, &mut rng);
            for l in [L1, L2, L3] {
                for s in [S, C, D] {
                    let v = poisson_bracket(RealizationFn::new(l, sign), RealizationFn::new(s, sign), &pts[0], 1e-5).unwrap();
                    prop_assert!(v.abs() < 1e-6);
                }
            }
        }
    }
}

#[test]
fn scalar_d_is_energy_function() {
    let x = PhasePoint::new([0.3, -1.2, 0.7], [0.1, 0.4, -0.2], 0.0);
    let d = eval_generator(RealizationFn::new(D, EnergySign::Negative), &x).unwrap();
    assert_abs_diff_eq!(d, 1.0 / (-2.0 * x.energy()).sqrt(), epsilon = 1e-14);
}
