use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use so42::controllability::*;
use so42::linalg::{CVector, OperatorMatrix, C64};
use so42::representation::{BasisState, RepSet};
use so42::simulator::matrix_exponential;
use so42::GeneratorId::{self, *};
use so42::Error;

fn rep4() -> Arc<RepSet> {
    Arc::new(RepSet::build(4).unwrap())
}

fn sys(controls: &[GeneratorId]) -> ControlSystem {
    ControlSystem::new(rep4(), controls).unwrap()
}

fn ground(s: &ControlSystem) -> CVector {
    s.basis_state(BasisState::new(1, 0, 0)).unwrap()
}

/// The observed orbit dimension through |100⟩ at n_max = 4.
const M_STAR: usize = 9;

#[test]
fn lie_spans() {
    let rep = rep4();
    assert_eq!(lie_span_controls(&ControlSystem::full(rep.clone())).unwrap().dim, 15);
    assert_eq!(lie_span_controls(&ControlSystem::reduced(rep.clone())).unwrap().dim, 15);
    assert_eq!(lie_span_controls(&sys(&[L3])).unwrap().dim, 1);
    assert!(lie_span_controls(&ControlSystem::drift_only(rep)).is_err());
}

#[test]
fn b1_vanishes() {
    let full = ControlSystem::full(rep4());
    assert!(b1_residual(&full, 0.7, 1e-5).unwrap() < 1e-6);
    let static_set = sys(&[L3, D]);
    for t in [0.0, 0.3, 4.1] {
        assert!(b1_residual(&static_set, t, 1e-5).unwrap() < 1e-12);
    }
    assert!(matches!(b1_residual(&full, 0.7, 0.0), Err(Error::InvalidArgument(_))));
}

#[test]
fn b1_residual_shrinks_quadratically() {
    // single generator: the central-difference error is O(h²) until roundoff
    let s = sys(&[C]);
    let r1 = b1_residual(&s, 1.3, 1e-2).unwrap();
    let r2 = b1_residual(&s, 1.3, 1e-3).unwrap();
    let ratio = r1 / r2;
    assert!((60.0..160.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn ideal_condition_examples() {
    let rep = rep4();
    for s in [ControlSystem::full(rep.clone()), ControlSystem::reduced(rep.clone()), sys(&[L1, L2, L3])] {
        let ic = check_ideal_condition(&s, B1_TOL).unwrap();
        assert!(ic.ok, "{:?}", s.controls());
        assert!(ic.max_residual < IDEAL_TOL);
    }
}

#[test]
fn orbit_dimension_examples() {
    for set in [&[L3][..], &[L1, L2, L3][..]] {
        let s = sys(set);
        assert_eq!(orbit_dimension(&s, &ground(&s), GAP_RATIO).unwrap().rank, 0);
    }
    let full = ControlSystem::full(rep4());
    let r = orbit_dimension(&full, &ground(&full), GAP_RATIO).unwrap();
    assert_eq!(r.rank, M_STAR);
    assert!(r.gap_ratio >= GAP_RATIO);
}

#[test]
fn orbit_dimension_is_constant_over_probes() {
    let full = ControlSystem::full(rep4());
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let probes = orbit_probes(&full, &ground(&full), 20, &ProbeOptions::default(), &mut rng).unwrap();
    let interior = full.rep().interior_dim();
    for p in &probes {
        let inside: f64 = p.iter().take(interior).map(|z| z.norm_sqr()).sum();
        assert!(inside >= 0.99);
        assert_eq!(orbit_dimension(&full, p, GAP_RATIO).unwrap().rank, M_STAR);
    }
}

#[test]
fn orbit_dimension_survives_drift() {
    let full = ControlSystem::full(rep4());
    let psi = ground(&full);
    let h = full.rep().hamiltonian.clone();
    for t in [0.4, 1.7, 6.0] {
        let k = h.scale(C64::new(0.0, -t));
        let moved = matrix_exponential(&k).unwrap().apply(&psi);
        assert_eq!(orbit_dimension(&full, &moved, GAP_RATIO).unwrap().rank, M_STAR);
        assert_eq!(orbit_dimension_at(&full, &moved, t, GAP_RATIO).unwrap().rank, M_STAR);
    }
}

#[test]
fn orbit_dimension_is_monotone_in_the_control_set() {
    let rep = rep4();
    let full = ControlSystem::full(rep.clone());
    let psi = ground(&full);
    let m_full = orbit_dimension(&full, &psi, GAP_RATIO).unwrap().rank;
    for set in [&[L1, L2, L3][..], &[S, C, D][..], &[A3][..], &[B3, G3, D][..]] {
        let s = ControlSystem::new(rep.clone(), set).unwrap();
        assert!(orbit_dimension(&s, &psi, GAP_RATIO).unwrap().rank <= m_full);
    }
}

#[test]
fn reports() {
    let rep = rep4();
    for s in [ControlSystem::full(rep.clone()), ControlSystem::reduced(rep.clone())] {
        let r = controllability_report(&s, 20, 7).unwrap();
        assert_eq!(r.verdict, VERDICT_OK, "{:?}", s.controls());
        assert_eq!(r.orbit_dim, Some(M_STAR));
        assert!(r.orbit_dim_constant);
        assert_eq!(r.probe_dims.len(), 21);
        assert!(r.rank_gap >= GAP_RATIO);
    }
    let r = controllability_report(&ControlSystem::drift_only(rep), 20, 7).unwrap();
    assert_eq!(r.verdict, VERDICT_FAIL);
    assert_eq!(r.orbit_dim, Some(0));
}

#[test]
fn report_is_deterministic() {
    let s = ControlSystem::reduced(rep4());
    let a = serde_json::to_string(&controllability_report(&s, 5, 3).unwrap()).unwrap();
    let b = serde_json::to_string(&controllability_report(&s, 5, 3).unwrap()).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn orbit_dimension_invariant_under_group_action(coeffs in prop::collection::vec(-0.05f64..0.05, 15)) {
        let full = ControlSystem::full(rep4());
        let mut k = OperatorMatrix::zeros(full.dim());
        for (i, c) in coeffs.iter().enumerate() {
            k = k.lin_comb(C64::new(1.0, 0.0), full.control_matrix(i), C64::new(*c, 0.0));
        }
        let moved = matrix_exponential(&k).unwrap().apply(&ground(&full));
        prop_assert_eq!(orbit_dimension(&full, &moved, GAP_RATIO).unwrap().rank, M_STAR);
    }
}
