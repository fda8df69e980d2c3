//! Rook matrices over a Boolean inverse monoid: validation, the star
//! anti-involution, products, and the dictionary between matrices over
//! `I(X)` and bijections of tagged disjoint unions.
//!
//! Run with: `cargo run --example rook_algebra`

use imean::bim::FiniteBIM;
use imean::pbij::{GroundSet, PartialBijection};
use imean::rook::{bijection_to_rook, rook_to_bijection, Dim, RookMatrix};

fn main() -> Result<(), imean::error::Error> {
    let ground = GroundSet::new(3)?;
    let base = FiniteBIM::full_symmetric(3)?;

    // A 2x2 rook matrix over I(3): entries in one row need orthogonal
    // ranges, entries in one column orthogonal domains.
    let a = RookMatrix::new(
        Dim::Finite(2),
        Dim::Finite(2),
        [
            ((0usize, 0usize), PartialBijection::new(ground, [(0, 1)])?),
            ((0, 1), PartialBijection::new(ground, [(1, 2)])?),
            ((1, 0), PartialBijection::new(ground, [(2, 0), (1, 2)])?),
        ],
    )?;
    println!("matrix valid over I_3? {}", a.validate_in(&base)?);

    // star is transpose-with-inverse, and A = A A* A always.
    let star = a.star();
    let back = a.product(&star)?.product(&a)?;
    println!("A = A A* A? {}", back == a);

    // the identity matrix is neutral
    let id2 = RookMatrix::identity(2, PartialBijection::identity(ground))?;
    println!("I_2 A = A? {}", id2.product(&a)? == a);

    // A valid matrix over I(X) is the same thing as a bijection between
    // tagged unions of subsets; the round trip is exact.
    let f = rook_to_bijection(&a)?;
    println!("induced bijection on tagged points:");
    for ((x, j), (y, i)) in &f.pairs {
        println!("  ({x}, col {j}) -> ({y}, row {i})");
    }
    let again = bijection_to_rook(&f, ground)?;
    println!("round trip reproduces the matrix? {}", again == a);

    // Idempotent rook matrices are exactly diagonal matrices of
    // idempotents.
    let e = RookMatrix::diagonal(&[
        PartialBijection::new(ground, [(0, 0), (2, 2)])?,
        PartialBijection::new(ground, [(1, 1)])?,
    ])?;
    println!(
        "diagonal of idempotents is idempotent? {}",
        e.is_idempotent_matrix()?
    );

    // A Tarski matrix of degree m is an m x (m+1) matrix with A*A = I;
    // over any finite ground set the hunt comes back empty.
    let elements = base.enumerate_elements(100)?;
    let found = imean::rook::search_tarski_degree1(&elements)?;
    println!("degree-1 Tarski pair over I_3? {:?}", found.is_some());
    Ok(())
}
