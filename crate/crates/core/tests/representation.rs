use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use so42::algebra::GeneratorId::{self, *};
use so42::representation::*;

// Closed forms fitted to the solved tables, used here as independent oracles.
fn omega_rot_oracle(l: i64, m: i64) -> f64 {
    (((l - m) * (l + m + 1)) as f64).sqrt()
}
fn beta_oracle(l: i64, m: i64) -> f64 {
    (((l + 1 - m) * (l - m)) as f64).sqrt()
}
fn gamma_oracle(l: i64, m: i64) -> f64 {
    (((l + m) * (l + m + 1)) as f64).sqrt()
}
fn omega_rad_oracle(n: i64, l: i64) -> f64 {
    (((n - l) * (n + l + 1)) as f64).sqrt()
}

#[test]
fn derived_tables_match_closed_forms() {
    let t = derive_ladder_coefficients(6).unwrap();
    assert!(!t.omega_rot.is_empty() && !t.beta.is_empty() && !t.gamma.is_empty());
    for (&(l, m), &v) in &t.omega_rot {
        assert_abs_diff_eq!(v, omega_rot_oracle(l, m), epsilon = 1e-12);
    }
    for (&(l, m), &v) in &t.beta {
        assert_abs_diff_eq!(v, beta_oracle(l, m), epsilon = 1e-12);
    }
    for (&(l, m), &v) in &t.gamma {
        assert_abs_diff_eq!(v, gamma_oracle(l, m), epsilon = 1e-12);
    }
    for (&(n, l), &v) in &t.omega_rad {
        assert_abs_diff_eq!(v, omega_rad_oracle(n, l), epsilon = 1e-12);
    }
    assert!(t.max_residual() < 1e-10);
    assert!(t.residuals.rotation_lowering_rule && t.residuals.runge_lenz_lowering_rule);
}

#[test]
fn frozen_ladder_values() {
    let t = derive_ladder_coefficients(4).unwrap();
    assert_abs_diff_eq!(t.omega_rot(1, 0), 2f64.sqrt(), epsilon = 1e-14);
    assert_abs_diff_eq!(t.omega_rot(1, -1), 2f64.sqrt(), epsilon = 1e-14);
    assert_abs_diff_eq!(t.omega_rot(2, 0), 6f64.sqrt(), epsilon = 1e-14);
    assert_abs_diff_eq!(t.omega_rad(1, 0), 2f64.sqrt(), epsilon = 1e-14);
    assert_abs_diff_eq!(t.omega_rad(2, 1), 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(t.beta(0, 0), 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(t.beta(0, -1), 2f64.sqrt(), epsilon = 1e-14);
    assert_abs_diff_eq!(t.gamma(1, 0), 2f64.sqrt(), epsilon = 1e-14);
}

#[test]
fn radial_lowering_is_shifted_raising() {
    // The closed form continued to negative n satisfies f(-n) = f(n-1),
    // which is how the lowering coefficient is indexed.
    let t = derive_ladder_coefficients(5).unwrap();
    for l in 0..4 {
        for n in (l + 2)..=5 {
            assert_abs_diff_eq!(t.omega_rad_lowering(n, l), omega_rad_oracle(-n, l), epsilon = 1e-12);
        }
    }
}

#[test]
fn full_commutator_suite_at_six() {
    let rep = RepSet::build(6).unwrap();
    assert_eq!(rep.dim(), 91);
    let report = check_commutators(&rep, 1e-9);
    assert_eq!(report.entries.len(), 105);
    assert!(report.passed, "max residual {}", report.max_residual);
    assert!(hermiticity_report(&rep, 1e-12).passed);
    let cas = casimir_check(&rep, 1e-9);
    assert!(cas.passed, "{:?}", cas.entries);
}

#[test]
fn so4_block_without_projection() {
    let rep = RepSet::build(4).unwrap();
    let so4 = [L1, L2, L3, A1, A2, A3];
    let mut pairs = Vec::new();
    for (i, &a) in so4.iter().enumerate() {
        for &b in &so4[i + 1..] {
            pairs.push((a, b));
        }
    }
    let r = check_commutators_with(&rep, 1e-12, &pairs, Projection::Full);
    assert!(r.passed, "{}", r.max_residual);
}

#[test]
fn truncation_shows_at_the_boundary() {
    let rep = RepSet::build(4).unwrap();
    let r = check_commutators_with(&rep, 1e-9, &[(S, C)], Projection::Full);
    assert!(r.max_residual > 1.0);
}

#[test]
fn eigenstate_actions() {
    let rep = RepSet::build(4).unwrap();
    let b = &rep.basis;
    let g = |s: (i64, i64, i64)| b.index_of(BasisState::new(s.0, s.1, s.2)).unwrap();
    let d = rep.generator(D);
    let l3 = rep.generator(L3);
    for (i, s) in b.states().iter().enumerate() {
        assert_eq!(d.get(i, i).re, s.n as f64);
        assert_eq!(l3.get(i, i).re, s.m as f64);
    }
    // L1 annihilates l = 0
    let l1 = rep.generator(L1).dense();
    for n in 1..=4 {
        let j = g((n, 0, 0));
        assert!(l1.column(j).iter().all(|v| v.norm() < 1e-15));
    }
    // A3 couples |2 0 0⟩ and |2 1 0⟩ with α c = 1
    assert_abs_diff_eq!(rep.generator(A3).get(g((2, 1, 0)), g((2, 0, 0))).re, 1.0, epsilon = 1e-14);
}

#[test]
fn heisenberg_picture_is_consistent() {
    let rep = RepSet::build(4).unwrap();
    let gt = heisenberg_generator(&rep, C, 0.0);
    assert!(gt.sub(rep.generator(C)).max_abs() < 1e-15);
    // shell-preserving generators commute with H
    let at = heisenberg_generator(&rep, A1, 3.7);
    assert!(at.sub(rep.generator(A1)).max_abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn basis_dimension_formula(n in 1usize..12) {
        let b = build_basis(n).unwrap();
        let brute: usize = (1..=n).map(|k| k * k).sum();
        prop_assert_eq!(b.dim(), brute);
        prop_assert_eq!(b.dim(), basis_dim(n));
    }

    #[test]
    fn heisenberg_preserves_hermiticity(g in 0usize..15, t in -20.0f64..20.0) {
        let rep = RepSet::build(3).unwrap();
        let id = GeneratorId::from_index(g).unwrap();
        let m = heisenberg_generator(&rep, id, t);
        prop_assert!(m.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn printed_coefficients_are_real_on_their_domain(n in 1i64..20, l in 1i64..20) {
        prop_assume!(l <= n);
        for kind in [CoefficientKind::C, CoefficientKind::U, CoefficientKind::V] {
            let v = closed_form_coefficient(kind, n, l, 0).unwrap();
            prop_assert!(v.is_finite() && v >= 0.0);
        }
    }
}
