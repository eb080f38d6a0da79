//! Builds the truncated bound-state representation and checks commutators,
//! Hermiticity and the Casimir identities on the interior shells.
//!
//! cargo run --release --example representation [n_max]

use so42::representation::{casimir_check, check_commutators, derive_ladder_coefficients, hermiticity_report, RepSet};
use so42::GeneratorId::*;

fn main() -> so42::Result<()> {
    let n_max = std::env::args().nth(1).map_or(Ok(6), |s| s.parse()).expect("n_max must be an integer");
    let rep = RepSet::build(n_max)?;
    println!("n_max = {n_max}: dimension {}, interior {}", rep.dim(), rep.interior_dim());

    let tables = derive_ladder_coefficients(n_max)?;
    println!("radial ladder from |1 0 0>: {:.6}", tables.omega_rad(1, 0));
    println!("Runge-Lenz beta(1, 0) = {:.6}", tables.beta(1, 0));

    let comm = check_commutators(&rep, 1e-9);
    println!("worst interior commutator residual over {} pairs: {:.2e}", comm.entries.len(), comm.max_residual);
    println!("worst Hermiticity defect: {:.2e}", hermiticity_report(&rep, 1e-12).max_residual);
    for e in casimir_check(&rep, 1e-9).entries.iter().take(3) {
        println!("Casimir {}: {:.2e}", e.name, e.residual);
    }

    let d = rep.generator(D);
    println!("diagonal of D on the first shells: {:?}", (0..5).map(|i| d.get(i, i).re).collect::<Vec<_>>());
    Ok(())
}
