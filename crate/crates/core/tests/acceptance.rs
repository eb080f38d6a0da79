//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::sync::Arc;
use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use so42::algebra::{generated_subalgebra_exact, AlgebraElement, StructureTable, DIM};
use so42::classical::{verify_relations, EnergySign};
use so42::controllability::{controllability_report, generator_b1_residuals, ControlSystem, VERDICT_FAIL, VERDICT_OK};
use so42::linalg::{CVector, C64};
use so42::representation::{
    casimir_check, check_commutators, derive_ladder_coefficients, energy, hermiticity_report, BasisState, RepSet,
};
use so42::simulator::{
    observable_expectation, optimize_pulse, propagate, propagate_from, random_schedule, PulseSchedule, Segment,
};
use so42::GeneratorId::{self, *};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let t = StructureTable::so42();
    let mut mismatched = 0;
    let mut pairs = 0;
    for (i, &a) in GeneratorId::ALL.iter().enumerate() {
        for &b in &GeneratorId::ALL[i + 1..] {
            pairs += 1;
            if t.bracket_generators(a, b).coeffs() != &common::expected_bracket(a, b) {
                mismatched += 1;
            }
        }
    }
    let mut triples = 0;
    let mut jacobi_failures = 0;
    for a in 0..DIM {
        for b in a + 1..DIM {
            for c in b + 1..DIM {
                triples += 1;
                let (x, y, z) = (GeneratorId::ALL[a], GeneratorId::ALL[b], GeneratorId::ALL[c]);
                if !t.jacobi_defect(x, y, z).is_zero() {
                    jacobi_failures += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        pairs == 105 && mismatched == 0 && triples == 455 && jacobi_failures == 0 && secs < 1.0,
        format!("{pairs} pairs, {mismatched} mismatched; {triples} Jacobi triples, {jacobi_failures} non-zero; {secs:.3} s"),
    )
}

fn criterion_2() -> Verdict {
    let seeds: Vec<AlgebraElement<BigRational>> = [L1, L2, A3, S, C].iter().map(|&g| AlgebraElement::basis(g)).collect();
    let closure = generated_subalgebra_exact(&seeds);
    verdict(
        closure.dim == 15 && closure.depth <= 6 && closure.converged,
        format!("exact closure of {{L1, L2, A3, S, C}}: dim {} at depth {}", closure.dim, closure.depth),
    )
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut passed = true;
    let mut parts = Vec::new();
    for sign in [EnergySign::Negative, EnergySign::Positive] {
        match verify_relations(sign, 100, 3) {
            Ok(r) => {
                let ok = r.n_samples >= 100
                    && r.relations.len() == 105
                    && r.constant_of_motion.len() == 15
                    && r.max_relation_residual < 1e-5
                    && r.max_motion_residual < 1e-5;
                passed &= ok;
                parts.push(format!(
                    "{sign:?}: {} points, bracket {:.1e}, motion {:.1e}",
                    r.n_samples, r.max_relation_residual, r.max_motion_residual
                ));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("{sign:?}: {e}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(passed && secs < 30.0, format!("{}; {secs:.1} s", parts.join("; ")))
}

fn criterion_4(rep: &RepSet) -> Verdict {
    let comm = check_commutators(rep, 1e-9);
    let herm = hermiticity_report(rep, 1e-12);
    let cas = casimir_check(rep, 1e-9);
    let tables = derive_ladder_coefficients(6).expect("tables");
    let constraint = tables.max_residual();
    let rules = tables.residuals.rotation_lowering_rule && tables.residuals.runge_lenz_lowering_rule;
    verdict(
        rep.dim() == 91 && comm.entries.len() == 105 && comm.passed && herm.passed && cas.passed && constraint < 1e-10 && rules,
        format!(
            "dim {}; commutators {:.1e}; Hermiticity {:.1e}; Casimir {:.1e}; constraints {:.1e}",
            rep.dim(),
            comm.max_residual,
            herm.max_residual,
            cas.max_residual,
            constraint
        ),
    )
}

fn criterion_5(rep: Arc<RepSet>) -> Verdict {
    let sys = ControlSystem::full(rep);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let t = rng.random_range(0.0..20.0);
        for (_, r) in generator_b1_residuals(&sys, t, 1e-5).expect("residuals") {
            worst = worst.max(r);
        }
    }
    verdict(worst < 1e-6, format!("max |dG/dt - [H', G]| over 15 generators and 5 times: {worst:.1e}"))
}

fn criterion_6(rep: Arc<RepSet>) -> Verdict {
    let mut passed = true;
    let mut parts = Vec::new();
    for (label, sys, want) in [
        ("full", ControlSystem::full(rep.clone()), VERDICT_OK),
        ("reduced", ControlSystem::reduced(rep.clone()), VERDICT_OK),
        ("drift-only", ControlSystem::drift_only(rep.clone()), VERDICT_FAIL),
    ] {
        let r = controllability_report(&sys, 20, 6).expect("report");
        let mut ok = r.verdict == want;
        if want == VERDICT_OK {
            ok &= r.probe_dims.len() >= 21 && r.orbit_dim_constant && r.rank_gap >= 1e3;
        }
        passed &= ok;
        let dim = r.orbit_dim.map_or("ambiguous".to_string(), |d| d.to_string());
        parts.push(format!("{label}: {} (orbit {dim}, {} probes, gap {:.1e})", r.verdict, r.probe_dims.len() - 1, r.rank_gap));
    }
    verdict(passed, parts.join("; "))
}

fn criterion_7(rep: Arc<RepSet>) -> Verdict {
    let full = ControlSystem::full(rep.clone());
    let ground = full.basis_state(BasisState::new(1, 0, 0)).expect("state");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let long = random_schedule(&full, 1000, 0.5, 1.0, &mut rng);
    let defect = propagate(&full, &long, &ground).expect("propagate").max_norm_defect();

    let mut phase_err: f64 = 0.0;
    for (i, s) in rep.basis.states().iter().enumerate() {
        let psi0 = full.basis_state(*s).expect("state");
        let traj = propagate_from(&full, &PulseSchedule::zero(3, 0.9), &psi0, 0.0, 2).expect("propagate");
        for (t, psi) in traj.times.iter().zip(&traj.states) {
            let want = C64::from_polar(1.0, -energy(s.n) * t);
            phase_err = phase_err.max((psi[i] - want).norm());
        }
    }

    let lad = [L1, L2, L3, A1, A2, A3, D];
    let mut mixed = CVector::from_fn(rep.dim(), |j, _| C64::new((j as f64 * 0.7).sin(), (j as f64 * 1.3).cos()));
    mixed /= C64::new(mixed.norm(), 0.0);
    let e0 = observable_expectation(&mixed, &rep.hamiltonian).expect("energy");
    let segs: Vec<Segment> = (0..50)
        .map(|_| {
            let mut u = [0.0; DIM];
            for g in lad {
                u[g.index()] = rng.random_range(-1.5..1.5);
            }
            Segment::new(rng.random_range(0.05..0.5), u)
        })
        .collect();
    let traj = propagate_from(&full, &PulseSchedule::new(segs).expect("schedule"), &mixed, 0.0, 2).expect("propagate");
    let drift = traj
        .states
        .iter()
        .map(|psi| (observable_expectation(psi, &rep.hamiltonian).expect("energy") - e0).abs())
        .fold(0.0, f64::max);

    let mut u = [0.0; DIM];
    u[C.index()] = 1.0;
    let pulse = PulseSchedule::new(vec![Segment::new(1.0, u)]).expect("schedule");
    let kicked = propagate(&full, &pulse, &ground).expect("propagate");
    let change = (observable_expectation(kicked.final_state(), &rep.hamiltonian).expect("energy") - energy(1)).abs();

    verdict(
        defect < 1e-10 && phase_err < 1e-9 && drift < 1e-10 && change > 1e-3,
        format!("norm defect {defect:.1e}; phase error {phase_err:.1e}; <H> drift under L,A,D {drift:.1e}; C pulse shifts <H> by {change:.3}"),
    )
}

fn criterion_8(rep: Arc<RepSet>) -> Verdict {
    let sys = ControlSystem::new(rep, &[B3, G3, D]).expect("system");
    let psi0 = sys.basis_state(BasisState::new(1, 0, 0)).expect("state");
    let target = sys.basis_state(BasisState::new(2, 1, 0)).expect("state");
    let start = Instant::now();
    let r = optimize_pulse(&sys, &psi0, &target, 20, 50_000, 8).expect("optimize");
    let secs = start.elapsed().as_secs_f64();
    let per_segment = propagate(&sys, &r.schedule, &psi0).expect("propagate");
    let fid = so42::simulator::fidelity(per_segment.final_state(), &target);
    let leak = per_segment.max_boundary_population();
    let dense = propagate_from(&sys, &r.schedule, &psi0, 0.0, 16).expect("propagate");
    verdict(
        r.schedule.segments.len() <= 20 && r.evaluations <= 50_000 && fid >= 0.95 && leak < 0.01 && secs < 60.0,
        format!(
            "fidelity {fid:.4} with {} segments, {} evaluations, {secs:.1} s; boundary population at segment ends {leak:.4} \
             (info: inside segments, 16 sub-steps each, it peaks at {:.3})",
            r.schedule.segments.len(),
            r.evaluations,
            dense.max_boundary_population()
        ),
    )
}

fn main() {
    let rep6 = Arc::new(RepSet::build(6).expect("n_max = 6"));
    let rep4 = Arc::new(RepSet::build(4).expect("n_max = 4"));
    let results = [
        ("structure constants", criterion_1()),
        ("closure of five generators", criterion_2()),
        ("classical realization", criterion_3()),
        ("representation at n_max = 6", criterion_4(&rep6)),
        ("spectrum-generating condition", criterion_5(rep6.clone())),
        ("controllability report", criterion_6(rep4.clone())),
        ("simulator invariants", criterion_7(rep4.clone())),
        ("reachability |1,0,0> -> |2,1,0>", criterion_8(rep4)),
    ];
    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        println!("criterion {} [{name}]: {} | {}", i + 1, if v.passed { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.passed);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
