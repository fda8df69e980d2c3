//! Exact arithmetic of partial bijections on a finite ground set, together
//! with the Boolean algebra of partial identities.
//!
//! A [`PartialBijection`] is stored as its graph, sorted by source, so that
//! structural equality is semantic equality. A [`SubsetIdempotent`] is a
//! bitset over the ground set and converts losslessly to the partial
//! identity on its members. All values are immutable after construction and
//! every operation is a pure function.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of points in a ground set. Subsets are stored as `u64`
/// bitmasks, which covers every desk-scale computation in this crate.
pub const MAX_GROUND: usize = 64;

/// A finite ground set `{0, 1, ..., size-1}`, never empty.
///
/// The empty ground set is rejected: on it the identity equals zero, so no
/// normalized mean can exist and every downstream construction degenerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct GroundSet {
    size: usize,
}

impl GroundSet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidGround("ground set must be non-empty".into()));
        }
        if size > MAX_GROUND {
            return Err(Error::InvalidGround(format!(
                "ground set size {size} exceeds supported maximum {MAX_GROUND}"
            )));
        }
        Ok(GroundSet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Bitmask with one bit per ground point.
    pub fn full_mask(&self) -> u64 {
        if self.size == 64 {
            u64::MAX
        } else {
            (1u64 << self.size) - 1
        }
    }

    pub fn points(&self) -> impl Iterator<Item = usize> {
        0..self.size
    }

    fn check_point(&self, point: usize) -> Result<()> {
        if point >= self.size {
            Err(Error::PointOutOfRange {
                point,
                ground: self.size,
            })
        } else {
            Ok(())
        }
    }
}

impl TryFrom<usize> for GroundSet {
    type Error = Error;
    fn try_from(size: usize) -> Result<Self> {
        GroundSet::new(size)
    }
}

impl From<GroundSet> for usize {
    fn from(g: GroundSet) -> usize {
        g.size
    }
}

fn require_same_ground(a: GroundSet, b: GroundSet) -> Result<()> {
    if a != b {
        Err(Error::GroundMismatch {
            left: a.size,
            right: b.size,
        })
    } else {
        Ok(())
    }
}

/// A partial identity `1_A`, identified with the subset `A` of the ground
/// set. Houses the Boolean algebra operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSubset", into = "RawSubset")]
pub struct SubsetIdempotent {
    ground: GroundSet,
    mask: u64,
}

#[derive(Serialize, Deserialize)]
struct RawSubset {
    ground: usize,
    members: Vec<usize>,
}

impl TryFrom<RawSubset> for SubsetIdempotent {
    type Error = Error;
    fn try_from(raw: RawSubset) -> Result<Self> {
        let ground = GroundSet::new(raw.ground)?;
        SubsetIdempotent::from_members(ground, raw.members)
    }
}

impl From<SubsetIdempotent> for RawSubset {
    fn from(s: SubsetIdempotent) -> RawSubset {
        RawSubset {
            ground: s.ground.size(),
            members: s.members().collect(),
        }
    }
}

impl SubsetIdempotent {
    pub fn from_members(ground: GroundSet, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = 0u64;
        for point in members {
            ground.check_point(point)?;
            mask |= 1 << point;
        }
        Ok(SubsetIdempotent { ground, mask })
    }

    /// Build directly from a bitmask; bits beyond the ground are rejected.
    pub fn from_mask(ground: GroundSet, mask: u64) -> Result<Self> {
        if mask & !ground.full_mask() != 0 {
            return Err(Error::PointOutOfRange {
                point: (63 - (mask & !ground.full_mask()).leading_zeros()) as usize,
                ground: ground.size(),
            });
        }
        Ok(SubsetIdempotent { ground, mask })
    }

    pub fn empty(ground: GroundSet) -> Self {
        SubsetIdempotent { ground, mask: 0 }
    }

    pub fn top(ground: GroundSet) -> Self {
        SubsetIdempotent {
            ground,
            mask: ground.full_mask(),
        }
    }

    pub fn singleton(ground: GroundSet, point: usize) -> Result<Self> {
        ground.check_point(point)?;
        Ok(SubsetIdempotent {
            ground,
            mask: 1 << point,
        })
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.ground.points().filter(move |p| self.contains(*p))
    }

    pub fn contains(&self, point: usize) -> bool {
        point < self.ground.size() && self.mask & (1 << point) != 0
    }

    pub fn count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_top(&self) -> bool {
        self.mask == self.ground.full_mask()
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        require_same_ground(self.ground, other.ground)?;
        Ok(SubsetIdempotent {
            ground: self.ground,
            mask: self.mask & other.mask,
        })
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        require_same_ground(self.ground, other.ground)?;
        Ok(SubsetIdempotent {
            ground: self.ground,
            mask: self.mask | other.mask,
        })
    }

    /// Complement relative to the ground set.
    pub fn complement(&self) -> Self {
        SubsetIdempotent {
            ground: self.ground,
            mask: !self.mask & self.ground.full_mask(),
        }
    }

    /// Relative complement `self \ other`.
    pub fn minus(&self, other: &Self) -> Result<Self> {
        require_same_ground(self.ground, other.ground)?;
        Ok(SubsetIdempotent {
            ground: self.ground,
            mask: self.mask & !other.mask,
        })
    }

    pub fn leq(&self, other: &Self) -> Result<bool> {
        require_same_ground(self.ground, other.ground)?;
        Ok(self.mask & !other.mask == 0)
    }

    pub fn disjoint(&self, other: &Self) -> Result<bool> {
        require_same_ground(self.ground, other.ground)?;
        Ok(self.mask & other.mask == 0)
    }

    /// The partial identity on the members, as a partial bijection.
    pub fn to_partial_identity(&self) -> PartialBijection {
        let graph: Vec<(usize, usize)> = self.members().map(|p| (p, p)).collect();
        PartialBijection {
            ground: self.ground,
            graph,
        }
    }
}

/// An injective partial map on a finite ground set, the element type of
/// every concrete inverse monoid in this crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPbij", into = "RawPbij")]
pub struct PartialBijection {
    ground: GroundSet,
    /// Pairs `(source, target)`, sorted by source; sources pairwise
    /// distinct, targets pairwise distinct.
    graph: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawPbij {
    ground: usize,
    graph: Vec<(usize, usize)>,
}

impl TryFrom<RawPbij> for PartialBijection {
    type Error = Error;
    fn try_from(raw: RawPbij) -> Result<Self> {
        let ground = GroundSet::new(raw.ground)?;
        PartialBijection::new(ground, raw.graph)
    }
}

impl From<PartialBijection> for RawPbij {
    fn from(p: PartialBijection) -> RawPbij {
        RawPbij {
            ground: p.ground.size(),
            graph: p.graph,
        }
    }
}

impl fmt::Display for PartialBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.graph.is_empty() {
            return write!(f, "0");
        }
        let pairs: Vec<String> = self
            .graph
            .iter()
            .map(|(s, t)| format!("{s}\u{2192}{t}"))
            .collect();
        write!(f, "[{}]", pairs.join(" "))
    }
}

impl PartialBijection {
    /// Canonical constructor: deduplicates identical pairs, sorts by
    /// source, and rejects graphs that are not injective.
    pub fn new(ground: GroundSet, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut graph: Vec<(usize, usize)> = pairs.into_iter().collect();
        graph.sort_unstable();
        graph.dedup();
        let mut seen_sources = 0u64;
        let mut seen_targets = 0u64;
        for &(s, t) in &graph {
            ground.check_point(s)?;
            ground.check_point(t)?;
            if seen_sources & (1 << s) != 0 {
                return Err(Error::NotInjective(format!("source {s} repeated")));
            }
            if seen_targets & (1 << t) != 0 {
                return Err(Error::NotInjective(format!("target {t} repeated")));
            }
            seen_sources |= 1 << s;
            seen_targets |= 1 << t;
        }
        Ok(PartialBijection { ground, graph })
    }

    /// The zero element: the empty map.
    pub fn zero(ground: GroundSet) -> Self {
        PartialBijection {
            ground,
            graph: Vec::new(),
        }
    }

    /// The identity element: the total identity map.
    pub fn identity(ground: GroundSet) -> Self {
        SubsetIdempotent::top(ground).to_partial_identity()
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn graph(&self) -> &[(usize, usize)] {
        &self.graph
    }

    pub fn rank(&self) -> usize {
        self.graph.len()
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.graph
            .binary_search_by_key(&x, |&(s, _)| s)
            .ok()
            .map(|i| self.graph[i].1)
    }

    pub fn preimage(&self, y: usize) -> Option<usize> {
        self.graph.iter().find(|&&(_, t)| t == y).map(|&(s, _)| s)
    }

    pub fn dom_mask(&self) -> u64 {
        self.graph.iter().fold(0, |m, &(s, _)| m | (1 << s))
    }

    pub fn im_mask(&self) -> u64 {
        self.graph.iter().fold(0, |m, &(_, t)| m | (1 << t))
    }

    /// `d(a) = a⁻¹a`, the partial identity on the domain.
    pub fn domain(&self) -> SubsetIdempotent {
        SubsetIdempotent {
            ground: self.ground,
            mask: self.dom_mask(),
        }
    }

    /// `r(a) = aa⁻¹`, the partial identity on the image.
    pub fn range(&self) -> SubsetIdempotent {
        SubsetIdempotent {
            ground: self.ground,
            mask: self.im_mask(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn is_idempotent(&self) -> bool {
        self.graph.iter().all(|&(s, t)| s == t)
    }

    pub fn is_identity(&self) -> bool {
        self.is_idempotent() && self.graph.len() == self.ground.size()
    }

    /// View an idempotent as the subset it is the partial identity of.
    pub fn as_subset(&self) -> Option<SubsetIdempotent> {
        if self.is_idempotent() {
            Some(SubsetIdempotent {
                ground: self.ground,
                mask: self.dom_mask(),
            })
        } else {
            None
        }
    }

    /// Semigroup product `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        require_same_ground(self.ground, other.ground)?;
        let graph: Vec<(usize, usize)> = other
            .graph
            .iter()
            .filter_map(|&(x, mid)| self.apply(mid).map(|y| (x, y)))
            .collect();
        // Sorted by source already (other.graph is) and injective since
        // both factors are.
        Ok(PartialBijection {
            ground: self.ground,
            graph,
        })
    }

    pub fn inverse(&self) -> Self {
        let mut graph: Vec<(usize, usize)> = self.graph.iter().map(|&(s, t)| (t, s)).collect();
        graph.sort_unstable();
        PartialBijection {
            ground: self.ground,
            graph,
        }
    }

    /// The natural partial order: `a ≤ b` iff `a = be` for an idempotent
    /// `e`, which for partial maps is graph containment.
    pub fn natural_leq(&self, other: &Self) -> Result<bool> {
        require_same_ground(self.ground, other.ground)?;
        Ok(self
            .graph
            .iter()
            .all(|&(s, t)| other.apply(s) == Some(t)))
    }

    /// `a ~ b`: the union is again a partial bijection, equivalently both
    /// `a⁻¹b` and `ab⁻¹` are idempotents.
    pub fn compatible(&self, other: &Self) -> Result<bool> {
        require_same_ground(self.ground, other.ground)?;
        for &(s, t) in &self.graph {
            if let Some(u) = other.apply(s) {
                if u != t {
                    return Ok(false);
                }
            }
            if let Some(v) = other.preimage(t) {
                if v != s {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `a ⊥ b`: both `a⁻¹b` and `ab⁻¹` are zero, i.e. disjoint domains and
    /// disjoint images.
    pub fn orthogonal(&self, other: &Self) -> Result<bool> {
        require_same_ground(self.ground, other.ground)?;
        Ok(self.dom_mask() & other.dom_mask() == 0 && self.im_mask() & other.im_mask() == 0)
    }

    /// Join of a compatible pair: the union of the graphs.
    pub fn join(&self, other: &Self) -> Result<Self> {
        if !self.compatible(other)? {
            return Err(Error::NotCompatible);
        }
        let mut graph = self.graph.clone();
        graph.extend_from_slice(&other.graph);
        graph.sort_unstable();
        graph.dedup();
        Ok(PartialBijection {
            ground: self.ground,
            graph,
        })
    }

    /// Restriction `self · 1_e` to a smaller domain.
    pub fn restrict_domain(&self, e: &SubsetIdempotent) -> Result<Self> {
        require_same_ground(self.ground, e.ground)?;
        let graph: Vec<(usize, usize)> = self
            .graph
            .iter()
            .copied()
            .filter(|&(s, _)| e.contains(s))
            .collect();
        Ok(PartialBijection {
            ground: self.ground,
            graph,
        })
    }

    /// Corestriction `1_e · self` to a smaller image.
    pub fn restrict_range(&self, e: &SubsetIdempotent) -> Result<Self> {
        require_same_ground(self.ground, e.ground)?;
        let graph: Vec<(usize, usize)> = self
            .graph
            .iter()
            .copied()
            .filter(|&(_, t)| e.contains(t))
            .collect();
        Ok(PartialBijection {
            ground: self.ground,
            graph,
        })
    }

    /// Conjugate `self · e · self⁻¹` of an idempotent, as a subset: the
    /// image of `e ∧ d(self)` under the map.
    pub fn conjugate_subset(&self, e: &SubsetIdempotent) -> Result<SubsetIdempotent> {
        require_same_ground(self.ground, e.ground)?;
        let mut mask = 0u64;
        for &(s, t) in &self.graph {
            if e.contains(s) {
                mask |= 1 << t;
            }
        }
        Ok(SubsetIdempotent {
            ground: self.ground,
            mask,
        })
    }
}
