//! Matrix towers: validate dimension vectors, pull means back along the
//! connecting maps, read off the forced mean of a single-block tower, and
//! realize levels concretely.
//!
//! Run with: `cargo run --example uhf_tower`

use imean::af_tower::AFTower;
use imean::means;
use imean::util::{rational_from_str, rational_to_string};

fn main() -> Result<(), imean::error::Error> {
    // The 2^infinity tower: I_1 -> I_2 -> I_4 -> I_8, each map doubling.
    let levels: Vec<Vec<u64>> = (0..=3).map(|i| vec![1u64 << i]).collect();
    let maps = vec![vec![vec![2u64]]; 3];
    let tower = AFTower::new(levels, maps)?;
    println!("tower validates, depth {}", tower.depth());

    // Single-block towers force their mean: level i weighs 2^-i.
    let forced = tower.uhf_unique_mean(3)?;
    for (i, v) in forced.vectors.iter().enumerate() {
        println!("  level {i}: atom value {}", rational_to_string(&v[0]));
    }
    println!("forced mean faithful? {}", forced.is_positive());

    // Realize level 2 (I_4) and confirm the solver agrees with the tower.
    let realized = tower.realize_level(2, 64)?;
    let solved = means::solve(&realized)?.witness.unwrap();
    println!(
        "solver on realized I_4 gives {}",
        rational_to_string(&solved.class_values()[0])
    );

    // The connecting map doubles points; an atom lands on two atoms.
    let embedding = tower.realize_embedding(1, 64)?;
    let atom = imean::pbij::SubsetIdempotent::from_members(
        imean::pbij::GroundSet::new(2)?,
        [0],
    )?
    .to_partial_identity();
    println!(
        "atom of I_2 embeds into I_4 as a join of {} atoms",
        embedding.apply(&atom)?.rank()
    );

    // A branching tower admits many means; pull any normalized seed back.
    let branching = AFTower::new(
        vec![vec![1], vec![1, 1], vec![2, 2]],
        vec![vec![vec![1], vec![1]], vec![vec![1, 1], vec![1, 1]]],
    )?;
    let seed = vec![rational_from_str("1/4")?, rational_from_str("1/4")?];
    let mean = branching.tower_mean(2, &seed)?;
    for (i, v) in mean.vectors.iter().enumerate() {
        let rendered: Vec<String> = v.iter().map(rational_to_string).collect();
        println!("  branching level {i}: ({})", rendered.join(", "));
    }
    Ok(())
}
