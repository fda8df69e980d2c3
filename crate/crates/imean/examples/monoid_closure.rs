//! Build finite Boolean inverse monoids of partial bijections: close a
//! generating set, inspect the Green's structure, and hunt for pencils.
//!
//! Run with: `cargo run --example monoid_closure`

use imean::bim::{FiniteBIM, SemisimpleSpec};
use imean::pbij::{GroundSet, PartialBijection, SubsetIdempotent};

fn main() -> Result<(), imean::error::Error> {
    // Close the four matrix units of a two-point ground set. The result
    // is the full symmetric inverse monoid I_2: zero, four singleton
    // maps, the identity, and the transposition.
    let ground = GroundSet::new(2)?;
    let mut generators = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            generators.push(PartialBijection::new(ground, [(i, j)])?);
        }
    }
    let i2 = FiniteBIM::close(ground, &generators, 1000)?;
    println!("closure of the 2x2 matrix units has {} elements", i2.element_count());

    // A block-diagonal product I_1 x I_2 lives inside I(3). Atoms in
    // different blocks are never D-related, and the monoid is not
    // 0-simplifying: a single block atom generates a proper ∨-ideal.
    let spec = SemisimpleSpec::new(vec![1, 2])?;
    let product = FiniteBIM::semisimple(&spec);
    println!(
        "I_1 x I_2: {} elements, {} atom classes",
        product.element_count(),
        product.atom_classes().class_count
    );
    let block1_atom = SubsetIdempotent::from_members(product.ground(), [0])?;
    let block2_atom = SubsetIdempotent::from_members(product.ground(), [1])?;
    println!(
        "cross-block atoms D-related? {}",
        product.d_related(&block1_atom, &block2_atom)?.is_some()
    );
    println!("0-simplifying? {}", product.is_zero_simplifying()?);

    // In the full I_3 every nonzero idempotent is large: here is an
    // explicit pencil from the identity down to a single atom.
    let i3 = FiniteBIM::full_symmetric(3)?;
    let atom = SubsetIdempotent::from_members(i3.ground(), [0])?;
    let pencil = i3.is_large(&atom)?.expect("atoms of I_n are large");
    println!("pencil from 1 to an atom of I_3, length {}:", pencil.len());
    for x in &pencil.elements {
        println!("  {x}");
    }

    // Local monoids: the corner of I_3 at a rank-2 idempotent is a copy
    // of I_2.
    let corner = SubsetIdempotent::from_members(i3.ground(), [0, 2])?;
    let local = i3.local_monoid(&corner)?;
    println!(
        "corner of I_3 at a rank-2 idempotent has {} elements (I_2 has 7)",
        local.element_count()
    );
    Ok(())
}
