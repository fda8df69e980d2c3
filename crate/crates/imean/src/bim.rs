//! Finite Boolean inverse monoids realized as wide inverse submonoids of a
//! symmetric inverse monoid `I(X)`.
//!
//! Two carriers back the same interface:
//!
//! * an explicit carrier produced by [`FiniteBIM::close`], which stores every
//!   element of the closure of a generating set, and
//! * a block-diagonal carrier for semisimple monoids
//!   `I_{n(1)} × ... × I_{n(k)}`, which answers membership and the Green's
//!   relations structurally so that large levels (such as `I_8` inside a
//!   matrix tower) never need their million-plus elements enumerated.
//!
//! A `FiniteBIM` is immutable after construction; all queries are pure.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pbij::{GroundSet, PartialBijection, SubsetIdempotent};

/// Block sizes of a semisimple inverse monoid `I_{n(1)} × ... × I_{n(k)}`,
/// realized inside `I(n(1) + ... + n(k))` as block-diagonal partial
/// bijections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SemisimpleSpec {
    block_sizes: Vec<usize>,
}

impl TryFrom<Vec<usize>> for SemisimpleSpec {
    type Error = Error;
    fn try_from(sizes: Vec<usize>) -> Result<Self> {
        SemisimpleSpec::new(sizes)
    }
}

impl From<SemisimpleSpec> for Vec<usize> {
    fn from(s: SemisimpleSpec) -> Vec<usize> {
        s.block_sizes
    }
}

impl SemisimpleSpec {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::InvalidInput("at least one block required".into()));
        }
        if block_sizes.contains(&0) {
            return Err(Error::InvalidInput("block sizes must be positive".into()));
        }
        // the total must still fit a ground set
        GroundSet::new(block_sizes.iter().sum())?;
        Ok(SemisimpleSpec { block_sizes })
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn block_count(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet::new(self.block_sizes.iter().sum()).expect("validated at construction")
    }

    /// `(start, len)` ranges of the blocks inside the ground set.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.block_sizes.len());
        let mut start = 0;
        for &len in &self.block_sizes {
            out.push((start, len));
            start += len;
        }
        out
    }

    /// The `n² `matrix-unit generators `{(i,j)}` of every block; their
    /// closure is the block-diagonal realization.
    pub fn matrix_unit_generators(&self) -> Vec<PartialBijection> {
        let ground = self.ground();
        let mut gens = Vec::new();
        for (start, len) in self.blocks() {
            for i in start..start + len {
                for j in start..start + len {
                    gens.push(
                        PartialBijection::new(ground, [(i, j)]).expect("in-range singleton"),
                    );
                }
            }
        }
        gens
    }
}

/// A pencil from `target` to `bound`: elements whose domains join to
/// `target` and whose ranges sit below `bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pencil {
    pub target: SubsetIdempotent,
    pub elements: Vec<PartialBijection>,
    pub bound: SubsetIdempotent,
}

impl Pencil {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Check the defining conditions inside the given monoid.
    pub fn validate(&self, monoid: &FiniteBIM) -> Result<()> {
        let mut dom_union = SubsetIdempotent::empty(self.target.ground());
        for x in &self.elements {
            if !monoid.contains(x) {
                return Err(Error::BadPencil("pencil element outside monoid".into()));
            }
            if !x.range().leq(&self.bound)? {
                return Err(Error::BadPencil("range exceeds the bound".into()));
            }
            dom_union = dom_union.join(&x.domain())?;
        }
        if dom_union != self.target {
            return Err(Error::BadPencil("domains do not join to the target".into()));
        }
        Ok(())
    }

    /// Whether the element domains are pairwise orthogonal.
    pub fn has_orthogonal_domains(&self) -> bool {
        let mut seen = 0u64;
        for x in &self.elements {
            let m = x.dom_mask();
            if seen & m != 0 {
                return false;
            }
            seen |= m;
        }
        true
    }
}

/// Atoms of the idempotent Boolean algebra together with their partition
/// into D-classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomClasses {
    pub atoms: Vec<SubsetIdempotent>,
    /// `class_of[i]` is the D-class index of `atoms[i]`.
    pub class_of: Vec<usize>,
    pub class_count: usize,
}

impl AtomClasses {
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.class_count];
        for &c in &self.class_of {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn atoms_of_class(&self, class: usize) -> Vec<SubsetIdempotent> {
        self.atoms
            .iter()
            .zip(&self.class_of)
            .filter(|&(_, &c)| c == class)
            .map(|(a, _)| *a)
            .collect()
    }

    /// Indices of the atoms lying below `e`. Errors with `NotAnElement`
    /// when `e` is not a union of atoms, i.e. not in the algebra.
    pub fn atoms_in(&self, e: &SubsetIdempotent) -> Result<Vec<usize>> {
        let mut covered = 0u64;
        let mut indices = Vec::new();
        for (i, atom) in self.atoms.iter().enumerate() {
            if atom.leq(e)? {
                covered |= atom.mask();
                indices.push(i);
            }
        }
        if covered != e.mask() {
            return Err(Error::NotAnElement);
        }
        Ok(indices)
    }

    /// Class multiplicity vector of the atoms below `e`.
    pub fn class_vector(&self, e: &SubsetIdempotent) -> Result<Vec<u64>> {
        let mut vec = vec![0u64; self.class_count];
        for i in self.atoms_in(e)? {
            vec[self.class_of[i]] += 1;
        }
        Ok(vec)
    }
}

#[derive(Debug)]
struct ExplicitCarrier {
    elements: Vec<PartialBijection>,
    index: HashMap<PartialBijection, usize>,
    /// Masks of the partial identities present, sorted.
    idempotent_masks: Vec<u64>,
    idempotent_set: HashSet<u64>,
    /// (domain mask, image mask) -> witness element index.
    dr_index: HashMap<(u64, u64), usize>,
    /// Lazily computed downward closure, for prefix pruning in searches.
    down: OnceLock<HashSet<PartialBijection>>,
}

#[derive(Debug)]
struct BlockCarrier {
    spec: SemisimpleSpec,
    /// `block_of[point]` = block index.
    block_of: Vec<usize>,
    blocks: Vec<(usize, usize)>,
}

impl BlockCarrier {
    fn new(spec: SemisimpleSpec) -> Self {
        let blocks = spec.blocks();
        let mut block_of = vec![0usize; spec.ground().size()];
        for (b, &(start, len)) in blocks.iter().enumerate() {
            block_of[start..start + len].fill(b);
        }
        BlockCarrier {
            spec,
            block_of,
            blocks,
        }
    }

    fn respects_blocks(&self, p: &PartialBijection) -> bool {
        p.graph()
            .iter()
            .all(|&(s, t)| self.block_of[s] == self.block_of[t])
    }

    /// Per-block cardinalities of a subset.
    fn block_ranks(&self, e: &SubsetIdempotent) -> Vec<usize> {
        let mut ranks = vec![0usize; self.blocks.len()];
        for p in e.members() {
            ranks[self.block_of[p]] += 1;
        }
        ranks
    }
}

#[derive(Debug)]
enum Carrier {
    Explicit(ExplicitCarrier),
    Block(BlockCarrier),
}

/// A finite Boolean inverse monoid of partial bijections: wide over its
/// idempotent Boolean algebra, closed under products, inverses, and
/// compatible joins, and containing zero and the identity.
#[derive(Debug)]
pub struct FiniteBIM {
    ground: GroundSet,
    generators: Vec<PartialBijection>,
    carrier: Carrier,
}

/// Number of elements of `I_n`: `Σ_k C(n,k)² k!`.
pub fn symmetric_inverse_monoid_size(n: usize) -> BigUint {
    let mut total = BigUint::from(0u32);
    for k in 0..=n {
        // falling = n(n-1)...(n-k+1), so C(n,k)² k! = falling² / k!
        let mut falling = BigUint::one();
        for i in 0..k {
            falling *= BigUint::from(n - i);
        }
        let mut kfact = BigUint::one();
        for i in 1..=k {
            kfact *= BigUint::from(i);
        }
        total += &falling * &falling / &kfact;
    }
    total
}

impl FiniteBIM {
    /// Least wide Boolean inverse monoid containing the generators:
    /// fixpoint closure under products, inverses, compatible joins, and
    /// complements of idempotents, capped at `cap` elements.
    pub fn close(
        ground: GroundSet,
        generators: &[PartialBijection],
        cap: usize,
    ) -> Result<FiniteBIM> {
        let mut elements: Vec<PartialBijection> = Vec::new();
        let mut index: HashMap<PartialBijection, usize> = HashMap::new();
        let push = |elements: &mut Vec<PartialBijection>,
                        index: &mut HashMap<PartialBijection, usize>,
                        item: PartialBijection|
         -> Result<bool> {
            if index.contains_key(&item) {
                return Ok(false);
            }
            if elements.len() + 1 > cap {
                return Err(Error::CapExceeded(cap));
            }
            index.insert(item.clone(), elements.len());
            elements.push(item);
            Ok(true)
        };

        push(&mut elements, &mut index, PartialBijection::zero(ground))?;
        push(&mut elements, &mut index, PartialBijection::identity(ground))?;
        for g in generators {
            if g.ground() != ground {
                return Err(Error::GroundMismatch {
                    left: ground.size(),
                    right: g.ground().size(),
                });
            }
            push(&mut elements, &mut index, g.clone())?;
        }

        let mut frontier: Vec<PartialBijection> = elements.clone();
        while !frontier.is_empty() {
            let mut fresh: Vec<PartialBijection> = Vec::new();
            let add = |elements: &mut Vec<PartialBijection>,
                           index: &mut HashMap<PartialBijection, usize>,
                           fresh: &mut Vec<PartialBijection>,
                           item: PartialBijection|
             -> Result<()> {
                if push(elements, index, item.clone())? {
                    fresh.push(item);
                }
                Ok(())
            };

            for a in &frontier {
                add(&mut elements, &mut index, &mut fresh, a.inverse())?;
                if a.is_idempotent() {
                    let comp = a
                        .as_subset()
                        .expect("idempotent")
                        .complement()
                        .to_partial_identity();
                    add(&mut elements, &mut index, &mut fresh, comp)?;
                }
            }
            // products and compatible joins of (frontier x everything)
            let snapshot = elements.clone();
            for a in &frontier {
                for b in &snapshot {
                    add(&mut elements, &mut index, &mut fresh, a.compose(b)?)?;
                    add(&mut elements, &mut index, &mut fresh, b.compose(a)?)?;
                    if a.compatible(b)? {
                        add(&mut elements, &mut index, &mut fresh, a.join(b)?)?;
                    }
                }
            }
            frontier = fresh;
        }

        Ok(FiniteBIM::from_closed_elements(
            ground,
            generators.to_vec(),
            elements,
            index,
        ))
    }

    fn from_closed_elements(
        ground: GroundSet,
        generators: Vec<PartialBijection>,
        elements: Vec<PartialBijection>,
        index: HashMap<PartialBijection, usize>,
    ) -> FiniteBIM {
        let mut idempotent_masks: Vec<u64> = elements
            .iter()
            .filter(|e| e.is_idempotent())
            .map(|e| e.dom_mask())
            .collect();
        idempotent_masks.sort_unstable();
        idempotent_masks.dedup();
        let idempotent_set: HashSet<u64> = idempotent_masks.iter().copied().collect();
        let mut dr_index = HashMap::new();
        for (i, s) in elements.iter().enumerate() {
            dr_index
                .entry((s.dom_mask(), s.im_mask()))
                .or_insert(i);
        }
        FiniteBIM {
            ground,
            generators,
            carrier: Carrier::Explicit(ExplicitCarrier {
                elements,
                index,
                idempotent_masks,
                idempotent_set,
                dr_index,
                down: OnceLock::new(),
            }),
        }
    }

    /// Block-diagonal realization of a semisimple inverse monoid. Queries
    /// are answered structurally; the element set is never materialized
    /// unless explicitly enumerated.
    pub fn semisimple(spec: &SemisimpleSpec) -> FiniteBIM {
        FiniteBIM {
            ground: spec.ground(),
            generators: Vec::new(),
            carrier: Carrier::Block(BlockCarrier::new(spec.clone())),
        }
    }

    /// The full symmetric inverse monoid `I_n`.
    pub fn full_symmetric(n: usize) -> Result<FiniteBIM> {
        Ok(FiniteBIM::semisimple(&SemisimpleSpec::new(vec![n])?))
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn generators(&self) -> &[PartialBijection] {
        &self.generators
    }

    pub fn semisimple_spec(&self) -> Option<&SemisimpleSpec> {
        match &self.carrier {
            Carrier::Block(b) => Some(&b.spec),
            Carrier::Explicit(_) => None,
        }
    }

    pub fn zero(&self) -> PartialBijection {
        PartialBijection::zero(self.ground)
    }

    pub fn one(&self) -> PartialBijection {
        PartialBijection::identity(self.ground)
    }

    pub fn top(&self) -> SubsetIdempotent {
        SubsetIdempotent::top(self.ground)
    }

    pub fn contains(&self, s: &PartialBijection) -> bool {
        if s.ground() != self.ground {
            return false;
        }
        match &self.carrier {
            Carrier::Explicit(c) => c.index.contains_key(s),
            Carrier::Block(b) => b.respects_blocks(s),
        }
    }

    /// Whether some element of the monoid extends `partial`. Used as the
    /// prefix-pruning predicate in backtracking searches.
    pub fn down_contains(&self, partial: &PartialBijection) -> bool {
        if partial.ground() != self.ground {
            return false;
        }
        match &self.carrier {
            Carrier::Block(b) => b.respects_blocks(partial),
            Carrier::Explicit(c) => {
                let down = c.down.get_or_init(|| {
                    let mut set = HashSet::new();
                    for s in &c.elements {
                        let graph = s.graph().to_vec();
                        let n = graph.len();
                        for mask in 0u64..(1 << n) {
                            let pairs = graph
                                .iter()
                                .enumerate()
                                .filter(|&(i, _)| mask & (1 << i) != 0)
                                .map(|(_, &p)| p);
                            set.insert(
                                PartialBijection::new(self.ground, pairs)
                                    .expect("restriction of injective"),
                            );
                        }
                    }
                    set
                });
                down.contains(partial)
            }
        }
    }

    pub fn is_idempotent_of(&self, e: &SubsetIdempotent) -> bool {
        if e.ground() != self.ground {
            return false;
        }
        match &self.carrier {
            Carrier::Explicit(c) => c.idempotent_set.contains(&e.mask()),
            Carrier::Block(_) => true,
        }
    }

    fn require_idempotent(&self, e: &SubsetIdempotent) -> Result<()> {
        if self.is_idempotent_of(e) {
            Ok(())
        } else {
            Err(Error::NotAnElement)
        }
    }

    pub fn element_count(&self) -> BigUint {
        match &self.carrier {
            Carrier::Explicit(c) => BigUint::from(c.elements.len()),
            Carrier::Block(b) => b
                .spec
                .block_sizes()
                .iter()
                .map(|&n| symmetric_inverse_monoid_size(n))
                .product(),
        }
    }

    pub fn idempotent_count(&self) -> BigUint {
        match &self.carrier {
            Carrier::Explicit(c) => BigUint::from(c.idempotent_masks.len()),
            Carrier::Block(_) => BigUint::from(2u32).pow(self.ground.size() as u32),
        }
    }

    /// All idempotents, as subsets. Errors when the (block-diagonal)
    /// algebra is too large to enumerate.
    pub fn idempotents(&self) -> Result<Vec<SubsetIdempotent>> {
        match &self.carrier {
            Carrier::Explicit(c) => c
                .idempotent_masks
                .iter()
                .map(|&m| SubsetIdempotent::from_mask(self.ground, m))
                .collect(),
            Carrier::Block(_) => {
                let n = self.ground.size();
                if n > 20 {
                    return Err(Error::CapExceeded(1 << 20));
                }
                (0u64..(1 << n))
                    .map(|m| SubsetIdempotent::from_mask(self.ground, m))
                    .collect()
            }
        }
    }

    /// Materialize the element set, failing once `cap` is exceeded.
    pub fn enumerate_elements(&self, cap: usize) -> Result<Vec<PartialBijection>> {
        match &self.carrier {
            Carrier::Explicit(c) => {
                if c.elements.len() > cap {
                    return Err(Error::CapExceeded(cap));
                }
                Ok(c.elements.clone())
            }
            Carrier::Block(b) => {
                let mut acc = vec![PartialBijection::zero(self.ground)];
                for &(start, len) in &b.blocks {
                    let points: Vec<usize> = (start..start + len).collect();
                    let block_elems = all_partial_bijections_on(self.ground, &points);
                    let mut next = Vec::with_capacity(acc.len() * block_elems.len());
                    for a in &acc {
                        for e in &block_elems {
                            if next.len() + 1 > cap {
                                return Err(Error::CapExceeded(cap));
                            }
                            next.push(a.join(e).expect("orthogonal blocks"));
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
        }
    }

    /// The group of units: elements that are total permutations.
    pub fn units(&self, cap: usize) -> Result<Vec<PartialBijection>> {
        match &self.carrier {
            Carrier::Explicit(c) => Ok(c
                .elements
                .iter()
                .filter(|s| s.is_unit())
                .cloned()
                .collect()),
            Carrier::Block(b) => {
                let mut acc = vec![PartialBijection::zero(self.ground)];
                for &(start, len) in &b.blocks {
                    let points: Vec<usize> = (start..start + len).collect();
                    let perms = all_permutations_on(self.ground, &points);
                    let mut next = Vec::with_capacity(acc.len() * perms.len());
                    for a in &acc {
                        for p in &perms {
                            if next.len() + 1 > cap {
                                return Err(Error::CapExceeded(cap));
                            }
                            next.push(a.join(p).expect("orthogonal blocks"));
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
        }
    }

    /// A uniformly-flavoured random element, for seeded spot checks on
    /// monoids too large to enumerate.
    pub fn sample_element(&self, rng: &mut crate::util::SplitMix64) -> PartialBijection {
        match &self.carrier {
            Carrier::Explicit(c) => c.elements[rng.below(c.elements.len())].clone(),
            Carrier::Block(b) => {
                let mut acc = PartialBijection::zero(self.ground);
                for &(start, len) in &b.blocks {
                    let mut sources: Vec<usize> = (start..start + len).collect();
                    let mut targets = sources.clone();
                    rng.shuffle(&mut sources);
                    rng.shuffle(&mut targets);
                    let k = rng.below(len + 1);
                    let piece = PartialBijection::new(
                        self.ground,
                        sources[..k].iter().copied().zip(targets[..k].iter().copied()),
                    )
                    .expect("block-local graph");
                    acc = acc.join(&piece).expect("orthogonal blocks");
                }
                acc
            }
        }
    }

    /// Atoms of the idempotent Boolean algebra: the blocks of the partition
    /// of the ground set the algebra induces.
    pub fn atoms(&self) -> Vec<SubsetIdempotent> {
        match &self.carrier {
            Carrier::Block(_) => self
                .ground
                .points()
                .map(|p| SubsetIdempotent::singleton(self.ground, p).expect("in range"))
                .collect(),
            Carrier::Explicit(c) => {
                let mut atom_masks: Vec<u64> = Vec::new();
                for p in self.ground.points() {
                    let bit = 1u64 << p;
                    let mut atom = self.ground.full_mask();
                    for &m in &c.idempotent_masks {
                        if m & bit != 0 {
                            atom &= m;
                        }
                    }
                    atom_masks.push(atom);
                }
                atom_masks.sort_unstable();
                atom_masks.dedup();
                atom_masks
                    .into_iter()
                    .map(|m| SubsetIdempotent::from_mask(self.ground, m).expect("subset of ground"))
                    .collect()
            }
        }
    }

    /// A witness `s` with `d(s) = e` and `r(s) = f`, when one exists.
    pub fn d_related(
        &self,
        e: &SubsetIdempotent,
        f: &SubsetIdempotent,
    ) -> Result<Option<PartialBijection>> {
        self.require_idempotent(e)?;
        self.require_idempotent(f)?;
        match &self.carrier {
            Carrier::Explicit(c) => Ok(c
                .dr_index
                .get(&(e.mask(), f.mask()))
                .map(|&i| c.elements[i].clone())),
            Carrier::Block(b) => {
                if b.block_ranks(e) != b.block_ranks(f) {
                    return Ok(None);
                }
                // pair off the points blockwise, in order
                let mut pairs = Vec::new();
                for &(start, len) in &b.blocks {
                    let srcs: Vec<usize> =
                        (start..start + len).filter(|&p| e.contains(p)).collect();
                    let tgts: Vec<usize> =
                        (start..start + len).filter(|&p| f.contains(p)).collect();
                    pairs.extend(srcs.into_iter().zip(tgts));
                }
                Ok(Some(PartialBijection::new(self.ground, pairs)?))
            }
        }
    }

    /// `e ≤_J f`: some idempotent `e' ≤ f` is D-related to `e`.
    pub fn j_leq(&self, e: &SubsetIdempotent, f: &SubsetIdempotent) -> Result<bool> {
        self.require_idempotent(e)?;
        self.require_idempotent(f)?;
        match &self.carrier {
            Carrier::Explicit(c) => {
                let em = e.mask();
                let fm = f.mask();
                Ok(c
                    .dr_index
                    .keys()
                    .any(|&(d, r)| d == em && r & !fm == 0))
            }
            Carrier::Block(b) => {
                let re = b.block_ranks(e);
                let rf = b.block_ranks(f);
                Ok(re.iter().zip(&rf).all(|(a, b)| a <= b))
            }
        }
    }

    /// Whether mutual `≤_J` of idempotents always implies D-relatedness.
    pub fn check_d_eq_j(&self) -> Result<bool> {
        match &self.carrier {
            // blockwise ranks classify both relations
            Carrier::Block(_) => Ok(true),
            Carrier::Explicit(_) => {
                let idems = self.idempotents()?;
                for e in &idems {
                    for f in &idems {
                        if self.j_leq(e, f)?
                            && self.j_leq(f, e)?
                            && self.d_related(e, f)?.is_none()
                        {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
        }
    }

    /// A pencil witnessing `e ⪯ f`, or `None`. The search works atom by
    /// atom, which is complete because domains may be assumed pairwise
    /// orthogonal and an algebra atom below a join of idempotents lies
    /// below one of them.
    pub fn preceq(
        &self,
        e: &SubsetIdempotent,
        f: &SubsetIdempotent,
    ) -> Result<Option<Pencil>> {
        self.require_idempotent(e)?;
        self.require_idempotent(f)?;
        if e.is_empty() {
            return Err(Error::ZeroIdempotent);
        }
        match &self.carrier {
            Carrier::Block(b) => {
                let rf = b.block_ranks(f);
                let mut elements = Vec::new();
                for p in e.members() {
                    let block = b.block_of[p];
                    if rf[block] == 0 {
                        return Ok(None);
                    }
                    let (start, len) = b.blocks[block];
                    let target = (start..start + len)
                        .find(|&q| f.contains(q))
                        .expect("nonzero rank");
                    elements.push(PartialBijection::new(self.ground, [(p, target)])?);
                }
                Ok(Some(Pencil {
                    target: *e,
                    elements,
                    bound: *f,
                }))
            }
            Carrier::Explicit(c) => {
                let mut elements = Vec::new();
                for atom in self.atoms() {
                    if !atom.leq(e)? {
                        continue;
                    }
                    let mut found = None;
                    for s in &c.elements {
                        if atom.mask() & !s.dom_mask() != 0 {
                            continue;
                        }
                        let piece = s.restrict_domain(&atom)?;
                        if piece.range().leq(f)? {
                            found = Some(piece);
                            break;
                        }
                    }
                    match found {
                        Some(piece) => elements.push(piece),
                        None => return Ok(None),
                    }
                }
                Ok(Some(Pencil {
                    target: *e,
                    elements,
                    bound: *f,
                }))
            }
        }
    }

    /// Replace each element by its restriction to the part of its domain
    /// not already covered, dropping what becomes zero. Preserves the
    /// joined domain and the bound.
    pub fn orthogonalize_pencil(&self, pencil: &Pencil) -> Result<Pencil> {
        pencil.validate(self)?;
        let mut covered = SubsetIdempotent::empty(self.ground);
        let mut elements = Vec::new();
        for x in &pencil.elements {
            let rest = x.domain().minus(&covered)?;
            let piece = x.restrict_domain(&rest)?;
            covered = covered.join(&x.domain())?;
            if !piece.is_zero() {
                elements.push(piece);
            }
        }
        Ok(Pencil {
            target: pencil.target,
            elements,
            bound: pencil.bound,
        })
    }

    /// A pencil from the identity to `e`, if `e` is large.
    pub fn is_large(&self, e: &SubsetIdempotent) -> Result<Option<Pencil>> {
        self.require_idempotent(e)?;
        if e.is_empty() {
            return Ok(None);
        }
        self.preceq(&self.top(), e)
    }

    /// Every non-zero idempotent is large, which makes the relation `≡`
    /// (mutual `⪯`) universal on the non-zero idempotents.
    pub fn is_zero_simplifying(&self) -> Result<bool> {
        match &self.carrier {
            Carrier::Block(b) => Ok(b.blocks.len() == 1),
            Carrier::Explicit(_) => {
                for e in self.idempotents()? {
                    if !e.is_empty() && self.is_large(&e)?.is_none() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// The `∨`-closed ideal generated by the idempotent `e`: the closure of
    /// `SeS` under products on both sides and binary compatible joins.
    pub fn principal_vee_ideal(&self, e: &SubsetIdempotent, cap: usize) -> Result<HashSet<PartialBijection>> {
        self.require_idempotent(e)?;
        let elements = self.enumerate_elements(cap)?;
        let e_pb = e.to_partial_identity();
        let mut ideal: HashSet<PartialBijection> = HashSet::new();
        let mut frontier: Vec<PartialBijection> = Vec::new();
        for s in &elements {
            for t in &elements {
                let x = s.compose(&e_pb)?.compose(t)?;
                if ideal.insert(x.clone()) {
                    frontier.push(x);
                }
            }
        }
        while !frontier.is_empty() {
            let mut fresh = Vec::new();
            for x in &frontier {
                for s in &elements {
                    for y in [s.compose(x)?, x.compose(s)?] {
                        if ideal.insert(y.clone()) {
                            fresh.push(y);
                        }
                    }
                }
                let snapshot: Vec<PartialBijection> = ideal.iter().cloned().collect();
                for y in &snapshot {
                    if x.compatible(y)? {
                        let j = x.join(y)?;
                        if ideal.insert(j.clone()) {
                            fresh.push(j);
                        }
                    }
                }
            }
            frontier = fresh;
        }
        Ok(ideal)
    }

    /// The local monoid `eSe`, with the ground set relabeled to the members
    /// of `e`.
    pub fn local_monoid(&self, e: &SubsetIdempotent) -> Result<FiniteBIM> {
        Ok(self.local_monoid_with_map(e)?.0)
    }

    /// As [`local_monoid`](Self::local_monoid), also returning the list of
    /// parent points in local order (local point `i` is `map[i]`).
    pub fn local_monoid_with_map(
        &self,
        e: &SubsetIdempotent,
    ) -> Result<(FiniteBIM, Vec<usize>)> {
        self.require_idempotent(e)?;
        if e.is_empty() {
            return Err(Error::ZeroIdempotent);
        }
        let parent_points: Vec<usize> = e.members().collect();
        let local_ground = GroundSet::new(parent_points.len())?;
        let to_local: HashMap<usize, usize> = parent_points
            .iter()
            .enumerate()
            .map(|(local, &parent)| (parent, local))
            .collect();
        match &self.carrier {
            Carrier::Block(b) => {
                let mut sizes = Vec::new();
                for &(start, len) in &b.blocks {
                    let count = (start..start + len).filter(|&p| e.contains(p)).count();
                    if count > 0 {
                        sizes.push(count);
                    }
                }
                let spec = SemisimpleSpec::new(sizes)?;
                // points are relabeled in increasing order, so blocks stay
                // contiguous in the local ground set
                Ok((FiniteBIM::semisimple(&spec), parent_points))
            }
            Carrier::Explicit(c) => {
                let mut elements: Vec<PartialBijection> = Vec::new();
                let mut index: HashMap<PartialBijection, usize> = HashMap::new();
                for s in &c.elements {
                    let corner = s.restrict_domain(e)?.restrict_range(e)?;
                    let local = PartialBijection::new(
                        local_ground,
                        corner.graph().iter().map(|&(a, b)| (to_local[&a], to_local[&b])),
                    )?;
                    if !index.contains_key(&local) {
                        index.insert(local.clone(), elements.len());
                        elements.push(local);
                    }
                }
                let generators = Vec::new();
                Ok((
                    FiniteBIM::from_closed_elements(local_ground, generators, elements, index),
                    parent_points,
                ))
            }
        }
    }

    /// Atoms of the idempotent algebra partitioned into D-classes.
    pub fn atom_classes(&self) -> AtomClasses {
        let atoms = self.atoms();
        match &self.carrier {
            Carrier::Block(b) => {
                // one class per block, in block order
                let class_of: Vec<usize> = atoms
                    .iter()
                    .map(|a| b.block_of[a.members().next().expect("singleton atom")])
                    .collect();
                AtomClasses {
                    atoms,
                    class_of,
                    class_count: b.blocks.len(),
                }
            }
            Carrier::Explicit(_) => {
                let n = atoms.len();
                let mut class_of: Vec<Option<usize>> = vec![None; n];
                let mut class_count = 0;
                for i in 0..n {
                    if class_of[i].is_some() {
                        continue;
                    }
                    let c = class_count;
                    class_count += 1;
                    class_of[i] = Some(c);
                    for j in i + 1..n {
                        if class_of[j].is_none()
                            && self
                                .d_related(&atoms[i], &atoms[j])
                                .expect("atoms are idempotents")
                                .is_some()
                        {
                            class_of[j] = Some(c);
                        }
                    }
                }
                AtomClasses {
                    atoms,
                    class_of: class_of.into_iter().map(|c| c.expect("assigned")).collect(),
                    class_count,
                }
            }
        }
    }
}

trait IsUnit {
    fn is_unit(&self) -> bool;
}

impl IsUnit for PartialBijection {
    fn is_unit(&self) -> bool {
        let full = self.ground().full_mask();
        self.dom_mask() == full && self.im_mask() == full
    }
}

/// All partial bijections whose graph lives on the given points.
fn all_partial_bijections_on(ground: GroundSet, points: &[usize]) -> Vec<PartialBijection> {
    let mut out = Vec::new();
    let mut current: Vec<(usize, usize)> = Vec::new();
    fn recurse(
        ground: GroundSet,
        points: &[usize],
        idx: usize,
        used_targets: u64,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<PartialBijection>,
    ) {
        if idx == points.len() {
            out.push(
                PartialBijection::new(ground, current.iter().copied()).expect("injective by construction"),
            );
            return;
        }
        // point not in the domain
        recurse(ground, points, idx + 1, used_targets, current, out);
        for &t in points {
            if used_targets & (1 << t) == 0 {
                current.push((points[idx], t));
                recurse(ground, points, idx + 1, used_targets | (1 << t), current, out);
                current.pop();
            }
        }
    }
    recurse(ground, points, 0, 0, &mut current, &mut out);
    out
}

/// All total bijections on the given points.
fn all_permutations_on(ground: GroundSet, points: &[usize]) -> Vec<PartialBijection> {
    all_partial_bijections_on(ground, points)
        .into_iter()
        .filter(|p| p.rank() == points.len())
        .collect()
}
