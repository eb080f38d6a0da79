//! Propagates a hand-written schedule and writes the trajectory CSV.
//!
//! cargo run --release --example simulate [out.csv]

use std::sync::Arc;

use so42::controllability::ControlSystem;
use so42::representation::{BasisState, RepSet};
use so42::simulator::{fidelity, propagate_from, shell_populations, PulseSchedule};

const SCHEDULE: &str = r#"[
  {"duration": 0.5, "u": {"C": 1.0}},
  {"duration": 0.5, "u": {"S": -0.8, "D": 0.3}},
  {"duration": 1.0, "u": {"A3": 1.2}},
  {"duration": 0.5}
]"#;

fn main() -> so42::Result<()> {
    let rep = Arc::new(RepSet::build(4)?);
    let sys = ControlSystem::full(rep.clone());
    let schedule = PulseSchedule::from_json(SCHEDULE)?;
    let psi0 = sys.basis_state(BasisState::new(1, 0, 0))?;
    let traj = propagate_from(&sys, &schedule, &psi0, 0.0, 4)?;

    let last = traj.final_state();
    println!("t = {:.2}", traj.final_time());
    println!("shell populations: {:?}", shell_populations(&rep, last).iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>());
    println!("overlap with |2 1 0>: {:.4}", fidelity(last, &sys.basis_state(BasisState::new(2, 1, 0))?));
    println!("max norm defect {:.1e}, max boundary population {:.4}", traj.max_norm_defect(), traj.max_boundary_population());

    if let Some(path) = std::env::args().nth(1) {
        traj.save_csv(&rep, path.as_ref())?;
        println!("wrote {path}");
    }
    Ok(())
}
