//! Searches for a 20-segment schedule taking |1 0 0> to |2 1 0> with the
//! radial controls B3, G3 and D, then replays it to inspect the leak into the
//! outermost shells.
//!
//! cargo run --release --example optimize_transfer [seed]

use std::sync::Arc;
use std::time::Instant;

use so42::controllability::ControlSystem;
use so42::representation::{BasisState, RepSet};
use so42::simulator::{optimize_pulse, propagate, propagate_from};
use so42::GeneratorId::*;

fn main() -> so42::Result<()> {
    let seed = std::env::args().nth(1).map_or(0, |s| s.parse().expect("seed must be an integer"));
    let rep = Arc::new(RepSet::build(4)?);
    let sys = ControlSystem::new(rep, &[B3, G3, D])?;
    let psi0 = sys.basis_state(BasisState::new(1, 0, 0))?;
    let target = sys.basis_state(BasisState::new(2, 1, 0))?;

    let start = Instant::now();
    let r = optimize_pulse(&sys, &psi0, &target, 20, 50_000, seed)?;
    println!(
        "fidelity {:.5} after {} evaluations in {:.1} s (search ran in a {}-dimensional reachable subspace)",
        r.fidelity,
        r.evaluations,
        start.elapsed().as_secs_f64(),
        r.reachable_dim
    );
    let good = r.starts.iter().filter(|s| s.fidelity >= 0.95 && s.max_boundary_population < 0.01).count();
    println!("{good} of {} starts reached fidelity 0.95 with leak below 1%", r.starts.len());

    let ends = propagate(&sys, &r.schedule, &psi0)?;
    let dense = propagate_from(&sys, &r.schedule, &psi0, 0.0, 16)?;
    println!("boundary population at segment ends: {:.4}", ends.max_boundary_population());
    println!("boundary population inside segments: {:.4}", dense.max_boundary_population());
    for (k, seg) in r.schedule.segments.iter().enumerate().take(5) {
        println!("segment {k}: B3 {:+.3} G3 {:+.3} D {:+.3}", seg.amplitude(B3), seg.amplitude(G3), seg.amplitude(D));
    }
    Ok(())
}
