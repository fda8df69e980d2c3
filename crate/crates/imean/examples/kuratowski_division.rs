//! Division by two on finite sets: from halvings of two sets and a
//! bijection between them, construct a bijection between the chosen
//! halves as an explicit finite join of composition words.
//!
//! Run with: `cargo run --example kuratowski_division`

use imean::bim::FiniteBIM;
use imean::paradox::{
    check_kuratowski_property, evaluate_word, kuratowski_bijection, KuratowskiInstance,
};
use imean::pbij::{GroundSet, PartialBijection, SubsetIdempotent};

fn main() -> Result<(), imean::error::Error> {
    // Six points; M = {0,1,2} matched to N = {3,4,5} by phi, P = {0,2,4}
    // matched to Q = {1,3,5} by psi, and alpha a 6-cycle between the two
    // copies of the ground set.
    let ground = GroundSet::new(6)?;
    let instance = KuratowskiInstance {
        ground,
        m_part: SubsetIdempotent::from_members(ground, [0, 1, 2])?,
        phi: PartialBijection::new(ground, [(0, 3), (1, 4), (2, 5)])?,
        p_part: SubsetIdempotent::from_members(ground, [0, 2, 4])?,
        psi: PartialBijection::new(ground, [(0, 1), (2, 3), (4, 5)])?,
        alpha: PartialBijection::new(ground, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])?,
    };

    let decomposition = kuratowski_bijection(&instance)?;
    println!("bijection M -> Q: {}", decomposition.bijection);
    println!("as {} piece(s):", decomposition.pieces.len());
    for piece in &decomposition.pieces {
        println!("  word {:?} on {}", piece.word, piece.map);
        // every piece re-evaluates through its own composition word
        for &(x, y) in piece.map.graph() {
            assert_eq!(evaluate_word(&instance, &piece.word, x), Some(y));
        }
    }

    // The idempotent-level counterpart on a finite monoid: halved
    // idempotents with D-related joins have D-related cross halves.
    let i4 = FiniteBIM::full_symmetric(4)?;
    println!(
        "idempotent property holds on I_4? {}",
        check_kuratowski_property(&i4)?
    );
    Ok(())
}
