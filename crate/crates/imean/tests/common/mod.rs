//! Shared instance generators for the integration suites.

use imean::bim::FiniteBIM;
use imean::pbij::{GroundSet, PartialBijection};
use imean::rook::{Dim, RookMatrix};
use imean::util::SplitMix64;
use std::collections::BTreeMap;

pub fn random_pbij(rng: &mut SplitMix64, ground: GroundSet) -> PartialBijection {
    let n = ground.size();
    let mut sources: Vec<usize> = (0..n).collect();
    let mut targets: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut sources);
    rng.shuffle(&mut targets);
    let k = rng.below(n + 1);
    PartialBijection::new(
        ground,
        sources[..k].iter().copied().zip(targets[..k].iter().copied()),
    )
    .expect("random graph is injective")
}

/// Close a random generator set on the given ground.
pub fn random_closure(rng: &mut SplitMix64, ground_size: usize, cap: usize) -> FiniteBIM {
    let ground = GroundSet::new(ground_size).unwrap();
    let count = rng.below(3) + 1;
    let generators: Vec<PartialBijection> =
        (0..count).map(|_| random_pbij(rng, ground)).collect();
    FiniteBIM::close(ground, &generators, cap).expect("ground <= 4 closures stay small")
}

/// Random valid rook matrix over the full symmetric inverse monoid:
/// random entries with RM1/RM2 conflicts restricted away in scan order.
pub fn random_rook(
    rng: &mut SplitMix64,
    ground: GroundSet,
    rows: usize,
    cols: usize,
) -> RookMatrix<PartialBijection> {
    let mut entries: BTreeMap<(usize, usize), PartialBijection> = BTreeMap::new();
    for i in 0..rows {
        for j in 0..cols {
            if rng.chance(1, 3) {
                continue;
            }
            let candidate = random_pbij(rng, ground);
            let mut graph: Vec<(usize, usize)> = candidate.graph().to_vec();
            for i2 in 0..i {
                if let Some(prev) = entries.get(&(i2, j)) {
                    let used = prev.dom_mask();
                    graph.retain(|&(s, _)| used & (1 << s) == 0);
                }
            }
            for j2 in 0..j {
                if let Some(prev) = entries.get(&(i, j2)) {
                    let used = prev.im_mask();
                    graph.retain(|&(_, t)| used & (1 << t) == 0);
                }
            }
            if !graph.is_empty() {
                entries.insert((i, j), PartialBijection::new(ground, graph).unwrap());
            }
        }
    }
    RookMatrix::new(Dim::Finite(rows), Dim::Finite(cols), entries).unwrap()
}
