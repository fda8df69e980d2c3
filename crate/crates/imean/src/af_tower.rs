//! Matrix towers of semisimple inverse monoids: dimension-vector
//! propagation, exact mean pull-back along the connecting maps, the
//! forced mean of a tower of single blocks, and concrete realizations of
//! levels and embeddings.
//!
//! A tower is a finite truncation `m_0 → m_1 → ...` of block-size vectors
//! with connecting matrices `M_i` of shape `|m_{i+1}| × |m_i|` satisfying
//! `m_{i+1} = M_i · m_i`, base level `[1]`, and no zero columns (columns
//! with no positive entry would break injectivity of the level embeddings
//! and the propagation of faithfulness).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::bim::{FiniteBIM, SemisimpleSpec};
use crate::error::{Error, Result};
use crate::pbij::{GroundSet, PartialBijection};

/// A finite truncation of a matrix tower.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AFTower {
    /// Block-size vectors `m_0, m_1, ...`.
    pub levels: Vec<Vec<u64>>,
    /// Connecting matrices; `maps[i]` has shape `|levels[i+1]| × |levels[i]|`.
    pub maps: Vec<Vec<Vec<u64>>>,
}

impl AFTower {
    pub fn new(levels: Vec<Vec<u64>>, maps: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        let tower = AFTower { levels, maps };
        tower.validate()?;
        Ok(tower)
    }

    pub fn depth(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    /// Check every structural invariant, reporting the first failure.
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::BadBase);
        }
        if self.levels[0] != vec![1] {
            return Err(Error::BadBase);
        }
        if self.maps.len() + 1 != self.levels.len() {
            return Err(Error::InvalidInput(format!(
                "{} levels need {} maps, got {}",
                self.levels.len(),
                self.levels.len() - 1,
                self.maps.len()
            )));
        }
        for (i, level) in self.levels.iter().enumerate() {
            if level.is_empty() || level.contains(&0) {
                return Err(Error::InvalidInput(format!(
                    "level {i} must list positive block sizes"
                )));
            }
        }
        for (i, m) in self.maps.iter().enumerate() {
            let rows = self.levels[i + 1].len();
            let cols = self.levels[i].len();
            if m.len() != rows || m.iter().any(|row| row.len() != cols) {
                return Err(Error::DimensionMismatch { level: i + 1 });
            }
            for col in 0..cols {
                if m.iter().all(|row| row[col] == 0) {
                    return Err(Error::ZeroColumn { level: i, col });
                }
            }
            // dimension compatibility: m_{i+1} = M_i · m_i
            for (row, &target) in self.levels[i + 1].iter().enumerate() {
                let dot: u64 = m[row]
                    .iter()
                    .zip(&self.levels[i])
                    .map(|(a, b)| a * b)
                    .sum();
                if dot != target {
                    return Err(Error::DimensionMismatch { level: i + 1 });
                }
            }
        }
        Ok(())
    }

    /// Whether every level is a single block.
    pub fn is_uhf(&self) -> bool {
        self.levels.iter().all(|l| l.len() == 1)
    }

    fn check_level_vector(&self, level: usize, v: &[BigRational]) -> Result<()> {
        if level >= self.levels.len() {
            return Err(Error::InvalidInput(format!("no level {level} in the tower")));
        }
        if v.len() != self.levels[level].len() {
            return Err(Error::DimensionMismatch { level });
        }
        if v.iter().any(|x| x.is_negative()) {
            return Err(Error::InvalidInput("mean vectors must be non-negative".into()));
        }
        Ok(())
    }

    fn normalization(&self, level: usize, v: &[BigRational]) -> BigRational {
        self.levels[level]
            .iter()
            .zip(v)
            .map(|(&n, x)| BigRational::from_integer(BigInt::from(n)) * x)
            .sum()
    }

    /// Pull a normalized level-`i+1` mean vector back to level `i` along
    /// `x = M_iᵀ y`. Normalization transfers exactly in both directions.
    pub fn pull_back(&self, i: usize, y: &[BigRational]) -> Result<Vec<BigRational>> {
        self.validate()?;
        if i + 1 >= self.levels.len() {
            return Err(Error::InvalidInput(format!("no map out of level {i}")));
        }
        self.check_level_vector(i + 1, y)?;
        if !self.normalization(i + 1, y).is_one() {
            return Err(Error::NotNormalized);
        }
        let m = &self.maps[i];
        let cols = self.levels[i].len();
        let x: Vec<BigRational> = (0..cols)
            .map(|c| {
                m.iter()
                    .zip(y)
                    .map(|(row, yv)| BigRational::from_integer(BigInt::from(row[c])) * yv)
                    .sum()
            })
            .collect();
        if !self.normalization(i, &x).is_one() {
            return Err(Error::InternalInvariantViolation(
                "pull-back lost normalization".into(),
            ));
        }
        Ok(x)
    }

    /// Successive pull-backs from a normalized seed at level `depth` down
    /// to the base. Compatibility is re-verified at every step.
    pub fn tower_mean(&self, depth: usize, seed: &[BigRational]) -> Result<TowerMean> {
        self.validate()?;
        if depth >= self.levels.len() {
            return Err(Error::InvalidInput(format!(
                "depth {depth} exceeds the tower truncation"
            )));
        }
        self.check_level_vector(depth, seed)?;
        if !self.normalization(depth, seed).is_one() {
            return Err(Error::NotNormalized);
        }
        let mut vectors = vec![Vec::new(); depth + 1];
        vectors[depth] = seed.to_vec();
        for i in (0..depth).rev() {
            vectors[i] = self.pull_back(i, &vectors[i + 1].clone())?;
        }
        let mean = TowerMean { vectors };
        mean.verify(self)?;
        Ok(mean)
    }

    /// The forced mean of a tower of single blocks: level `i` takes the
    /// value `1/n_i` on its atoms. Faithfulness is asserted.
    pub fn uhf_unique_mean(&self, depth: usize) -> Result<TowerMean> {
        self.validate()?;
        if !self.is_uhf() {
            return Err(Error::NotUHF);
        }
        if depth >= self.levels.len() {
            return Err(Error::InvalidInput(format!(
                "depth {depth} exceeds the tower truncation"
            )));
        }
        let vectors: Vec<Vec<BigRational>> = (0..=depth)
            .map(|i| {
                vec![BigRational::new(
                    BigInt::one(),
                    BigInt::from(self.levels[i][0]),
                )]
            })
            .collect();
        let mean = TowerMean { vectors };
        mean.verify(self)?;
        if !mean.is_positive() {
            return Err(Error::InternalInvariantViolation(
                "forced mean is not faithful".into(),
            ));
        }
        Ok(mean)
    }

    /// Concrete block-diagonal realization of one level.
    pub fn realize_level(&self, level: usize, cap: usize) -> Result<FiniteBIM> {
        self.validate()?;
        if level >= self.levels.len() {
            return Err(Error::InvalidInput(format!("no level {level} in the tower")));
        }
        let sizes: Vec<usize> = self.levels[level].iter().map(|&n| n as usize).collect();
        let ground: usize = sizes.iter().sum();
        if ground > cap {
            return Err(Error::CapExceeded(cap));
        }
        Ok(FiniteBIM::semisimple(&SemisimpleSpec::new(sizes)?))
    }

    /// Concrete injective morphism realizing `maps[level]` by
    /// block-diagonal copying: block `j` of the source is copied into
    /// block `l` of the target with multiplicity `M[l][j]`.
    pub fn realize_embedding(&self, level: usize, cap: usize) -> Result<LevelEmbedding> {
        self.validate()?;
        if level + 1 >= self.levels.len() {
            return Err(Error::InvalidInput(format!("no map out of level {level}")));
        }
        let source = SemisimpleSpec::new(
            self.levels[level].iter().map(|&n| n as usize).collect(),
        )?;
        let target = SemisimpleSpec::new(
            self.levels[level + 1].iter().map(|&n| n as usize).collect(),
        )?;
        if source.ground().size() > cap || target.ground().size() > cap {
            return Err(Error::CapExceeded(cap));
        }
        LevelEmbedding::new(source, target, self.maps[level].clone())
    }
}

/// Per-level mean vectors of a tower truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerMean {
    pub vectors: Vec<Vec<BigRational>>,
}

impl TowerMean {
    pub fn level_values(&self, level: usize) -> &[BigRational] {
        &self.vectors[level]
    }

    pub fn is_positive(&self) -> bool {
        self.vectors
            .iter()
            .all(|v| v.iter().all(|x| x.is_positive()))
    }

    /// Re-verify normalization at every level and compatibility
    /// `x_i = M_iᵀ x_{i+1}` at every step.
    pub fn verify(&self, tower: &AFTower) -> Result<()> {
        if self.vectors.is_empty() || self.vectors.len() > tower.levels.len() {
            return Err(Error::InvalidInput("level count mismatch".into()));
        }
        for (i, v) in self.vectors.iter().enumerate() {
            tower.check_level_vector(i, v)?;
            if !tower.normalization(i, v).is_one() {
                return Err(Error::NotNormalized);
            }
        }
        for i in 0..self.vectors.len() - 1 {
            let m = &tower.maps[i];
            let y = &self.vectors[i + 1];
            for (c, xv) in self.vectors[i].iter().enumerate() {
                let dot: BigRational = m
                    .iter()
                    .zip(y)
                    .map(|(row, yv)| BigRational::from_integer(BigInt::from(row[c])) * yv)
                    .sum();
                if dot != *xv {
                    return Err(Error::InternalInvariantViolation(format!(
                        "compatibility fails at level {i}, coordinate {c}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A concrete injective morphism between consecutive realized levels.
#[derive(Debug, Clone)]
pub struct LevelEmbedding {
    source: SemisimpleSpec,
    target: SemisimpleSpec,
    matrix: Vec<Vec<u64>>,
    /// `segments[l][j]` lists the start offsets (in the target ground set)
    /// of the copies of source block `j` inside target block `l`.
    segments: Vec<Vec<Vec<usize>>>,
}

impl LevelEmbedding {
    fn new(source: SemisimpleSpec, target: SemisimpleSpec, matrix: Vec<Vec<u64>>) -> Result<Self> {
        let src_sizes = source.block_sizes().to_vec();
        let tgt_blocks = target.blocks();
        let mut segments = vec![vec![Vec::new(); src_sizes.len()]; tgt_blocks.len()];
        for (l, &(tstart, tlen)) in tgt_blocks.iter().enumerate() {
            let mut offset = tstart;
            for (j, &sj) in src_sizes.iter().enumerate() {
                for _ in 0..matrix[l][j] {
                    segments[l][j].push(offset);
                    offset += sj;
                }
            }
            if offset != tstart + tlen {
                return Err(Error::DimensionMismatch { level: l });
            }
        }
        Ok(LevelEmbedding {
            source,
            target,
            matrix,
            segments,
        })
    }

    pub fn source(&self) -> &SemisimpleSpec {
        &self.source
    }

    pub fn target(&self) -> &SemisimpleSpec {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    /// Apply the morphism: each block of the source acts on every copy of
    /// itself inside the target.
    pub fn apply(&self, s: &PartialBijection) -> Result<PartialBijection> {
        if s.ground() != self.source.ground() {
            return Err(Error::GroundMismatch {
                left: self.source.ground().size(),
                right: s.ground().size(),
            });
        }
        let src_blocks = self.source.blocks();
        let block_of = |p: usize| -> Result<(usize, usize)> {
            for (j, &(start, len)) in src_blocks.iter().enumerate() {
                if p >= start && p < start + len {
                    return Ok((j, p - start));
                }
            }
            Err(Error::NotAnElement)
        };
        let mut pairs = Vec::new();
        for &(x, y) in s.graph() {
            let (jx, ox) = block_of(x)?;
            let (jy, oy) = block_of(y)?;
            if jx != jy {
                return Err(Error::NotAnElement); // not block-diagonal
            }
            for row in &self.segments {
                for &seg in &row[jx] {
                    pairs.push((seg + ox, seg + oy));
                }
            }
        }
        PartialBijection::new(GroundSet::new(self.target.ground().size())?, pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::means;
    use crate::pbij::SubsetIdempotent;
    use crate::util::SplitMix64;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn power_tower(base: u64, depth: usize) -> AFTower {
        let levels: Vec<Vec<u64>> = (0..=depth).map(|i| vec![base.pow(i as u32)]).collect();
        let maps = vec![vec![vec![base]]; depth];
        AFTower::new(levels, maps).unwrap()
    }

    #[test]
    fn power_tower_validates() {
        let t = power_tower(2, 3);
        assert_eq!(t.levels, vec![vec![1], vec![2], vec![4], vec![8]]);
        t.validate().unwrap();
        assert!(t.is_uhf());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        // M_0 = [[1],[1]] sends (1) to (1,1), not (1,2)
        let err = AFTower::new(vec![vec![1], vec![1, 2]], vec![vec![vec![1], vec![1]]]);
        assert!(matches!(err, Err(Error::DimensionMismatch { level: 1 })));
    }

    #[test]
    fn zero_column_is_reported() {
        let err = AFTower::new(
            vec![vec![1], vec![1, 2], vec![3, 3]],
            vec![
                vec![vec![1], vec![2]],
                // second column all zero
                vec![vec![3, 0], vec![3, 0]],
            ],
        );
        assert!(matches!(err, Err(Error::ZeroColumn { level: 1, col: 1 })));
    }

    #[test]
    fn bad_base_is_reported() {
        assert!(matches!(
            AFTower::new(vec![vec![2]], vec![]),
            Err(Error::BadBase)
        ));
        assert!(matches!(
            AFTower::new(vec![vec![1, 1]], vec![]),
            Err(Error::BadBase)
        ));
    }

    #[test]
    fn pull_back_halves_powers_of_two() {
        let t = power_tower(2, 4);
        for i in 0..4usize {
            let y = vec![rat(1, 2i64.pow(i as u32 + 1))];
            let x = t.pull_back(i, &y).unwrap();
            assert_eq!(x, vec![rat(1, 2i64.pow(i as u32))]);
        }
    }

    #[test]
    fn pull_back_through_identity_map() {
        let t = AFTower::new(
            vec![vec![1], vec![1, 2], vec![1, 2]],
            vec![
                vec![vec![1], vec![2]],
                vec![vec![1, 0], vec![0, 1]],
            ],
        )
        .unwrap();
        let y = vec![rat(1, 3), rat(1, 3)];
        let x = t.pull_back(1, &y).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn pull_back_rejects_unnormalized() {
        let t = power_tower(2, 2);
        assert!(matches!(
            t.pull_back(0, &[rat(1, 3)]),
            Err(Error::NotNormalized)
        ));
        assert!(matches!(
            t.pull_back(1, &[rat(1, 2)]),
            Err(Error::NotNormalized)
        ));
    }

    #[test]
    fn tower_mean_by_repeated_pull_back() {
        let t = power_tower(2, 3);
        let mean = t.tower_mean(3, &[rat(1, 8)]).unwrap();
        assert_eq!(
            mean.vectors,
            vec![
                vec![rat(1, 1)],
                vec![rat(1, 2)],
                vec![rat(1, 4)],
                vec![rat(1, 8)],
            ]
        );
        // depth 0 is just the forced base value
        let base = t.tower_mean(0, &[rat(1, 1)]).unwrap();
        assert_eq!(base.vectors, vec![vec![rat(1, 1)]]);
    }

    #[test]
    fn multi_block_top_admits_several_seeds() {
        // 1 -> (1,1) -> (2,2) with both copies mixing
        let t = AFTower::new(
            vec![vec![1], vec![1, 1], vec![2, 2]],
            vec![
                vec![vec![1], vec![1]],
                vec![vec![1, 1], vec![1, 1]],
            ],
        )
        .unwrap();
        for seed in [
            vec![rat(1, 2), rat(0, 1)],
            vec![rat(0, 1), rat(1, 2)],
            vec![rat(1, 4), rat(1, 4)],
        ] {
            let mean = t.tower_mean(2, &seed).unwrap();
            mean.verify(&t).unwrap();
        }
    }

    #[test]
    fn faithfulness_propagates_from_positive_seeds() {
        let mut rng = SplitMix64::new(99);
        for _ in 0..50 {
            // random small tower with no zero columns by construction
            let depth = rng.below(4) + 1;
            let mut levels: Vec<Vec<u64>> = vec![vec![1]];
            let mut maps = Vec::new();
            for _ in 0..depth {
                let prev = levels.last().unwrap().clone();
                let rows = rng.below(3) + 1;
                let mut m = vec![vec![0u64; prev.len()]; rows];
                for (col, _) in prev.iter().enumerate() {
                    // at least one positive entry per column
                    m[rng.below(rows)][col] = rng.below(3) as u64 + 1;
                }
                for row in m.iter_mut() {
                    for cell in row.iter_mut() {
                        if *cell == 0 && rng.chance(1, 2) {
                            *cell = rng.below(3) as u64;
                        }
                    }
                }
                let next: Vec<u64> = m
                    .iter()
                    .map(|row| row.iter().zip(&prev).map(|(a, b)| a * b).sum())
                    .collect();
                if next.contains(&0) {
                    continue;
                }
                maps.push(m);
                levels.push(next);
            }
            let depth = maps.len();
            let tower = AFTower::new(levels, maps).unwrap();
            // positive seed: uniform over the weighted atoms
            let top = tower.levels[depth].clone();
            let total: u64 = top.iter().sum::<u64>() * top.len() as u64;
            let seed: Vec<BigRational> = top
                .iter()
                .map(|_| {
                    BigRational::new(BigInt::one(), BigInt::from(top.len() as u64))
                        / BigRational::from_integer(BigInt::from(
                            top.iter().sum::<u64>(),
                        ))
                        * BigRational::from_integer(BigInt::from(top.len() as u64))
                })
                .collect();
            // normalize: m^T seed = 1 with equal block values
            let sum: BigRational = tower.normalization(depth, &seed);
            let seed: Vec<BigRational> = seed.into_iter().map(|v| v / &sum).collect();
            let mean = tower.tower_mean(depth, &seed).unwrap();
            assert!(mean.is_positive());
            let _ = total;
        }
    }

    #[test]
    fn uhf_means_are_forced() {
        let t2 = power_tower(2, 5);
        let mean = t2.uhf_unique_mean(5).unwrap();
        for (i, v) in mean.vectors.iter().enumerate() {
            assert_eq!(v, &vec![rat(1, 2i64.pow(i as u32))]);
        }
        let t6 = power_tower(6, 3);
        let mean = t6.uhf_unique_mean(3).unwrap();
        for (i, v) in mean.vectors.iter().enumerate() {
            assert_eq!(v, &vec![rat(1, 6i64.pow(i as u32))]);
        }
        let multi = AFTower::new(
            vec![vec![1], vec![1, 1]],
            vec![vec![vec![1], vec![1]]],
        )
        .unwrap();
        assert!(matches!(multi.uhf_unique_mean(1), Err(Error::NotUHF)));
    }

    #[test]
    fn realized_embedding_doubles_points() {
        let t = power_tower(2, 2);
        let emb = t.realize_embedding(1, 64).unwrap(); // I_2 -> I_4
        let g2 = GroundSet::new(2).unwrap();
        let atom = SubsetIdempotent::from_members(g2, [0]).unwrap().to_partial_identity();
        let image = emb.apply(&atom).unwrap();
        assert_eq!(image.rank(), 2); // join of two atoms
        assert!(image.is_idempotent());
        let identity_image = emb.apply(&PartialBijection::identity(g2)).unwrap();
        assert!(identity_image.is_identity());
    }

    #[test]
    fn realized_embedding_is_injective_morphism() {
        let t = power_tower(2, 2);
        let emb = t.realize_embedding(1, 64).unwrap();
        let source = t.realize_level(1, 64).unwrap();
        let target = t.realize_level(2, 64).unwrap();
        let elements = source.enumerate_elements(1000).unwrap();
        let mut images = std::collections::HashSet::new();
        for s in &elements {
            let ts = emb.apply(s).unwrap();
            assert!(target.contains(&ts));
            assert!(images.insert(ts.clone())); // injective
            for u in &elements {
                let tu = emb.apply(u).unwrap();
                assert_eq!(
                    emb.apply(&s.compose(u).unwrap()).unwrap(),
                    ts.compose(&tu).unwrap()
                );
                if s.compatible(u).unwrap() {
                    assert_eq!(
                        emb.apply(&s.join(u).unwrap()).unwrap(),
                        ts.join(&tu).unwrap()
                    );
                }
            }
        }
        // zero maps to zero
        assert!(emb.apply(&PartialBijection::zero(GroundSet::new(2).unwrap())).unwrap().is_zero());
    }

    #[test]
    fn atom_images_decompose_as_the_matrix_prescribes() {
        // two source blocks into two target blocks with mixed multiplicity
        let t = AFTower::new(
            vec![vec![1], vec![1, 2], vec![5, 4]],
            vec![
                vec![vec![1], vec![2]],
                vec![vec![1, 2], vec![2, 1]],
            ],
        )
        .unwrap();
        let emb = t.realize_embedding(1, 64).unwrap();
        let g = GroundSet::new(3).unwrap();
        // an atom of source block 1 (point 0) maps to 1 + 2 atoms
        let a0 = SubsetIdempotent::from_members(g, [0]).unwrap().to_partial_identity();
        assert_eq!(emb.apply(&a0).unwrap().rank(), 3);
        // an atom of source block 2 (point 1) maps to 2 + 1 atoms
        let a1 = SubsetIdempotent::from_members(g, [1]).unwrap().to_partial_identity();
        assert_eq!(emb.apply(&a1).unwrap().rank(), 3);
    }

    #[test]
    fn pulled_back_mean_agrees_with_embedding_on_idempotents() {
        let t = power_tower(2, 3);
        let tower_mean = t.tower_mean(3, &[rat(1, 8)]).unwrap();
        for i in 0..3usize {
            let emb = t.realize_embedding(i, 64).unwrap();
            let source = t.realize_level(i, 64).unwrap();
            let target = t.realize_level(i + 1, 64).unwrap();
            let mu_i = means::MeanVector::new(
                source.atom_classes(),
                tower_mean.level_values(i).to_vec(),
            )
            .unwrap();
            let mu_next = means::MeanVector::new(
                target.atom_classes(),
                tower_mean.level_values(i + 1).to_vec(),
            )
            .unwrap();
            for e in source.idempotents().unwrap() {
                let te = emb.apply(&e.to_partial_identity()).unwrap();
                assert_eq!(
                    mu_i.evaluate(&e).unwrap(),
                    mu_next.evaluate(&te.as_subset().unwrap()).unwrap()
                );
            }
        }
    }
}
