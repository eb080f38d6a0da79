//! Prints the nonzero brackets of so(4,2), checks Jacobi exactly and closes
//! the five-generator set under the bracket.
//!
//! cargo run --example structure_constants

use num_rational::BigRational;
use so42::algebra::{generated_subalgebra_exact, verify_algebra, AlgebraElement};
use so42::GeneratorId::{self, *};
use so42::StructureTable;

fn main() {
    let t = StructureTable::so42();
    for (i, &a) in GeneratorId::ALL.iter().enumerate() {
        for &b in &GeneratorId::ALL[i + 1..] {
            let row = t.sparse_row(a, b);
            if row.is_empty() {
                continue;
            }
            let terms: Vec<String> = row.iter().map(|(g, c)| format!("{c:+} {g}")).collect();
            println!("[{a}, {b}] = {}", terms.join(" "));
        }
    }

    let report = verify_algebra(&[L1, L2, A3, S, C]);
    println!(
        "\n{} Jacobi triples, {} failures; Killing signature {:?}",
        report.jacobi_triples,
        report.jacobi_failures.len(),
        report.killing_signature
    );

    for seeds in [&[L1, L2, A3, S, C][..], &[B3, G3, D], &[L1, A1]] {
        let exact: Vec<AlgebraElement<BigRational>> = seeds.iter().map(|&g| AlgebraElement::basis(g)).collect();
        let c = generated_subalgebra_exact(&exact);
        let names: Vec<&str> = seeds.iter().map(|g| g.name()).collect();
        println!("closure of {{{}}}: dim {} at depth {}", names.join(", "), c.dim, c.depth);
    }
}
