//! Paradoxicality over the naturals: residue-class affine maps, bounded
//! certificate search, amplification of a single expanding map, and the
//! upgrade from weak to strong certificates.
//!
//! Run with: `cargo run --example paradox_naturals`

use imean::paradox::{
    arden_upgrade, bike_amplify, detect_weak, AffineMap, AffinePiece, PeriodicSet, ResClass,
};

fn main() -> Result<(), imean::error::Error> {
    // n -> 2n and n -> 2n + 1 are total injections with disjoint ranges:
    // the evens and the odds.
    let double = AffineMap::total_affine(2, 0)?;
    let double_shift = AffineMap::total_affine(2, 1)?;
    println!("range of 2n:   {:?}", double.range());
    println!("range of 2n+1: {:?}", double_shift.range());

    // The bounded search finds the pair at word length one. Its existence
    // rules out any normalized invariant mean: both ranges would weigh 1
    // inside a join of weight at most 1.
    let cert = detect_weak(&[double.clone(), double_shift.clone()], 1)?
        .expect("the parity pair is found immediately");
    println!("weak certificate found: kind {:?}", cert.kind());

    // Since the two ranges tile the naturals, the witness n -> 2n+1
    // upgrades the certificate to a strong one.
    let strong = arden_upgrade(&cert, &double_shift)?;
    println!("upgraded: kind {:?}", strong.kind());

    // Amplification: a = 4n leaves three quarters of the naturals
    // uncovered; a two-element pencil into that complement produces a
    // certificate for the pair (a^2, b).
    let quadruple = AffineMap::total_affine(4, 0)?;
    let evens = ResClass::new(0, 2)?;
    let odds = ResClass::new(1, 2)?;
    let pencil = vec![
        AffineMap::new([AffinePiece::from_slope(2, 1, 1, evens)?])?, // 2n -> 4n+1
        AffineMap::new([AffinePiece::from_slope(2, 0, 1, odds)?])?,  // 2n+1 -> 4n+2
    ];
    let amplified = bike_amplify(&quadruple, &pencil)?;
    println!(
        "amplified certificate: d(b) = N? {}, r(b) ⊥ r(a^2)? {}",
        amplified.b().domain().is_naturals(),
        amplified
            .b()
            .range()
            .disjoint(&amplified.a().range())?
    );

    // The symbolic algebra composes, inverts, and joins exactly; the
    // inverse of doubling is division by two on the evens.
    let halve = double.inverse();
    println!("(2n)^-1 applied to 10: {:?}", halve.apply(10));
    println!("(2n)^-1 applied to 11: {:?}", halve.apply(11));
    let idempotent = double.compose(&halve)?;
    println!(
        "2n ∘ (2n)^-1 is the partial identity on {:?}",
        idempotent.range()
    );

    // Bounded search reports absence as inconclusive, never as a proof.
    let nothing = detect_weak(&[AffineMap::identity()], 3)?;
    println!(
        "identity generators: certificate found? {} (absence is inconclusive)",
        nothing.is_some()
    );

    // Periodic sets form an exact Boolean algebra.
    let thirds = PeriodicSet::new(3, [0])?;
    println!("complement of 3N: {:?}", thirds.complement());
    Ok(())
}
