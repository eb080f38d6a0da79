//! Runs the controllability report for the full control set, the five-
//! generator set and the drift alone.
//!
//! cargo run --release --example controllability

use std::sync::Arc;

use so42::controllability::{controllability_report, orbit_dimension, ControlSystem};
use so42::representation::{BasisState, RepSet};
use so42::GeneratorId::*;

fn main() -> so42::Result<()> {
    let rep = Arc::new(RepSet::build(4)?);
    let systems = [
        ControlSystem::full(rep.clone()),
        ControlSystem::reduced(rep.clone()),
        ControlSystem::new(rep.clone(), &[B3, G3, D])?,
        ControlSystem::drift_only(rep.clone()),
    ];
    for sys in &systems {
        let r = controllability_report(sys, 20, 1)?;
        let names: Vec<&str> = sys.controls().iter().map(|g| g.name()).collect();
        let label = if names.is_empty() { "drift only".to_string() } else { format!("{{{}}}", names.join(",")) };
        println!(
            "{label}: Lie span {}, orbit dimension {:?}, gap {:.1e} -> {}",
            r.lie_span_dim,
            r.orbit_dim,
            r.rank_gap,
            r.verdict
        );
    }

    let sys = &systems[1];
    let excited = sys.basis_state(BasisState::new(2, 1, 0))?;
    let r = orbit_dimension(sys, &excited, 1e3)?;
    println!("orbit dimension at |2 1 0>: {} (gap {:.1e})", r.rank, r.gap_ratio);
    Ok(())
}
