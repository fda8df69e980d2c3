//! Solve for invariant means exactly: uniqueness on full symmetric
//! inverse monoids, the vertex polytope of a semisimple product, the
//! axiom checker, and renormalization onto a corner.
//!
//! Run with: `cargo run --example semisimple_means`

use imean::bim::{FiniteBIM, SemisimpleSpec};
use imean::means;
use imean::pbij::SubsetIdempotent;
use imean::util::rational_to_string;

fn main() -> Result<(), imean::error::Error> {
    // I_4 carries a unique invariant mean: each atom weighs 1/4.
    let i4 = FiniteBIM::full_symmetric(4)?;
    let solution = means::solve(&i4)?;
    println!("I_4: status {:?}, dim {}", solution.status, solution.dim);
    let witness = solution.witness.expect("finite monoids always have means");
    println!(
        "  atom value {}",
        rational_to_string(&witness.class_values()[0])
    );

    // I_1 x I_2 has a one-dimensional polytope of means: the constraint
    // is x_1 + 2 x_2 = 1 with vertices (1, 0) and (0, 1/2).
    let product = FiniteBIM::semisimple(&SemisimpleSpec::new(vec![1, 2])?);
    let solution = means::solve(&product)?;
    println!("I_1 x I_2: status {:?}, dim {}", solution.status, solution.dim);
    for vertex in &solution.vertices {
        let rendered: Vec<String> =
            vertex.class_values().iter().map(rational_to_string).collect();
        println!("  vertex ({})", rendered.join(", "));
    }

    // Every solver output passes the exhaustive axiom check: invariance,
    // additivity, inclusion-exclusion, monotonicity, complements, and
    // the null ideal.
    let witness = solution.witness.expect("feasible");
    let report = means::check_axioms(&product, &witness)?;
    println!(
        "axiom check: ok = {}, {} elements, {} idempotent pairs",
        report.ok(),
        report.checked_elements,
        report.checked_idempotent_pairs
    );
    println!("barycenter witness faithful? {}", means::is_faithful(&witness));

    // Restricting the unique mean of I_3 to a rank-2 corner renormalizes
    // to the unique mean of I_2.
    let i3 = FiniteBIM::full_symmetric(3)?;
    let mean = means::solve(&i3)?.witness.unwrap();
    let corner = SubsetIdempotent::from_members(i3.ground(), [0, 1])?;
    let restricted = means::restrict(&i3, &mean, &corner)?;
    println!(
        "mean of I_3 restricted to a rank-2 corner: atom value {}",
        rational_to_string(&restricted.mean.class_values()[0])
    );

    // A normalized atom assignment invariant under unit conjugation
    // extends to an invariant mean; rank/n is the canonical example.
    let sigma = vec![mean.class_values()[0].clone(); 3];
    let unit_report = means::check_unit_invariance(&i3, &sigma)?;
    println!("rank/3 assignment is unit-invariant? {}", unit_report.invariant);
    Ok(())
}
