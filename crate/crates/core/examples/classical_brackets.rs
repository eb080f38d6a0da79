//! Verifies the phase-space realization of the fifteen generators by
//! finite-difference Poisson brackets, for both signs of the energy.
//!
//! cargo run --release --example classical_brackets

use so42::classical::{verify_relations, EnergySign, PhasePoint, RealizationFn};
use so42::classical::{eval_generator, poisson_bracket};
use so42::GeneratorId::*;

fn main() -> so42::Result<()> {
    for sign in [EnergySign::Negative, EnergySign::Positive] {
        let r = verify_relations(sign, 100, 1)?;
        println!(
            "{sign:?}: {} samples ({} rejected), worst bracket {:.2e}, worst constant of motion {:.2e}, sign flips {:?}",
            r.n_samples, r.rejected_samples, r.max_relation_residual, r.max_motion_residual, r.chosen_flips
        );
    }

    // a single bracket by hand: {L1, L2} = L3 on a bound orbit point
    let x = PhasePoint::new([1.0, 0.2, -0.3].into(), [0.1, 0.8, 0.2].into(), 0.0);
    let f = |g| RealizationFn::new(g, EnergySign::Negative);
    let lhs = poisson_bracket(f(L1), f(L2), &x, 1e-5)?;
    let rhs = eval_generator(f(L3), &x)?;
    println!("\nat E = {:.3}: {{L1, L2}} = {lhs:.9}, L3 = {rhs:.9}", x.energy());
    Ok(())
}
