//! Generalized rook matrices over a Boolean inverse monoid.
//!
//! Entries in one row have pairwise orthogonal ranges (RM1), entries in one
//! column have pairwise orthogonal domains (RM2), and only finitely many
//! entries are non-zero (RM3). Matrices are stored sparsely, so the
//! finitely supported `ω × ω` case is the same structure with an unbounded
//! index range. The correspondence with bijections of tagged disjoint
//! unions converts questions about rook matrices over `I(X)` into questions
//! about partial bijections and back.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bim::FiniteBIM;
use crate::element::InverseElement;
use crate::error::{Error, Result};
use crate::pbij::{GroundSet, PartialBijection, SubsetIdempotent};

/// A matrix extent: a finite bound or `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DimRepr", into = "DimRepr")]
pub enum Dim {
    Finite(usize),
    Omega,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DimRepr {
    Number(usize),
    Tag(String),
}

impl TryFrom<DimRepr> for Dim {
    type Error = Error;
    fn try_from(r: DimRepr) -> Result<Dim> {
        match r {
            DimRepr::Number(n) => {
                if n == 0 {
                    Err(Error::InvalidInput("matrix extent must be positive".into()))
                } else {
                    Ok(Dim::Finite(n))
                }
            }
            DimRepr::Tag(t) if t == "omega" => Ok(Dim::Omega),
            DimRepr::Tag(t) => Err(Error::InvalidInput(format!("unknown extent `{t}`"))),
        }
    }
}

impl From<Dim> for DimRepr {
    fn from(d: Dim) -> DimRepr {
        match d {
            Dim::Finite(n) => DimRepr::Number(n),
            Dim::Omega => DimRepr::Tag("omega".into()),
        }
    }
}

impl Dim {
    fn admits(&self, index: usize) -> bool {
        match self {
            Dim::Finite(n) => index < *n,
            Dim::Omega => true,
        }
    }
}

/// A sparse rook matrix over elements of `E`. Zero entries are never
/// stored, so structural equality is semantic equality (after the implicit
/// trimming of all-zero rows and columns that sparsity provides).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RookMatrix<E> {
    rows: Dim,
    cols: Dim,
    entries: BTreeMap<(usize, usize), E>,
}

impl<E: InverseElement> RookMatrix<E> {
    pub fn new(
        rows: Dim,
        cols: Dim,
        entries: impl IntoIterator<Item = ((usize, usize), E)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((i, j), e) in entries {
            if !rows.admits(i) || !cols.admits(j) {
                return Err(Error::ShapeMismatch);
            }
            if e.is_zero() {
                continue;
            }
            if map.insert((i, j), e).is_some() {
                return Err(Error::InvalidInput(format!("duplicate entry at ({i}, {j})")));
            }
        }
        Ok(RookMatrix { rows, cols, entries: map })
    }

    pub fn zero(rows: Dim, cols: Dim) -> Self {
        RookMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    /// The `n × n` identity over a supplied monoid identity element.
    pub fn identity(n: usize, one: E) -> Result<Self> {
        RookMatrix::new(
            Dim::Finite(n),
            Dim::Finite(n),
            (0..n).map(|i| ((i, i), one.clone())),
        )
    }

    /// Square diagonal matrix `Δ(a_1, ..., a_n)`.
    pub fn diagonal(elements: &[E]) -> Result<Self> {
        let n = elements.len();
        RookMatrix::new(
            Dim::Finite(n),
            Dim::Finite(n),
            elements.iter().cloned().enumerate().map(|(i, e)| ((i, i), e)),
        )
    }

    /// `Δ_ω(a_1, ..., a_n)`: the ω × ω diagonal with the given leading
    /// entries and zeros elsewhere.
    pub fn diagonal_omega(elements: &[E]) -> Result<Self> {
        RookMatrix::new(
            Dim::Omega,
            Dim::Omega,
            elements.iter().cloned().enumerate().map(|(i, e)| ((i, i), e)),
        )
    }

    pub fn rows(&self) -> Dim {
        self.rows
    }

    pub fn cols(&self) -> Dim {
        self.cols
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &E)> {
        self.entries.iter()
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&E> {
        self.entries.get(&(i, j))
    }

    pub fn support(&self) -> usize {
        self.entries.len()
    }

    /// RM1 and RM2. (RM3 holds by sparse representation.)
    pub fn validate(&self) -> Result<bool> {
        let items: Vec<(&(usize, usize), &E)> = self.entries.iter().collect();
        for (idx, (&(i1, j1), a)) in items.iter().enumerate() {
            for (&(i2, j2), b) in items.iter().skip(idx + 1) {
                if i1 == i2 && j1 != j2 {
                    // same row, distinct columns: ranges orthogonal
                    if !a
                        .range_idempotent()
                        .orthogonal(&b.range_idempotent())?
                    {
                        return Ok(false);
                    }
                }
                if j1 == j2 && i1 != i2 {
                    // same column, distinct rows: domains orthogonal
                    if !a
                        .domain_idempotent()
                        .orthogonal(&b.domain_idempotent())?
                    {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// `(AB)_ij = ⋁_k a_ik b_kj`. The joined terms are provably pairwise
    /// orthogonal for valid inputs; this is still asserted and an internal
    /// invariant violation raised otherwise.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch);
        }
        let mut by_row: BTreeMap<usize, Vec<(usize, &E)>> = BTreeMap::new();
        for (&(k, j), e) in &other.entries {
            by_row.entry(k).or_default().push((j, e));
        }
        let mut terms: BTreeMap<(usize, usize), Vec<E>> = BTreeMap::new();
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    let t = a.compose(b)?;
                    if !t.is_zero() {
                        terms.entry((i, j)).or_default().push(t);
                    }
                }
            }
        }
        let mut entries = BTreeMap::new();
        for ((i, j), ts) in terms {
            for x in 0..ts.len() {
                for y in x + 1..ts.len() {
                    if !ts[x].orthogonal(&ts[y])? {
                        return Err(Error::InternalInvariantViolation(format!(
                            "non-orthogonal terms in product cell ({i}, {j})"
                        )));
                    }
                }
            }
            let mut acc = ts[0].clone();
            for t in &ts[1..] {
                acc = acc.join(t)?;
            }
            entries.insert((i, j), acc);
        }
        Ok(RookMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    /// `A* = (a_ji⁻¹)`: transpose with entrywise inverse.
    pub fn star(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(&(i, j), e)| ((j, i), e.inverse()))
            .collect();
        RookMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Entrywise natural partial order.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch);
        }
        for (pos, e) in &self.entries {
            match other.entries.get(pos) {
                Some(f) => {
                    if !e.natural_leq(f)? {
                        return Ok(false);
                    }
                }
                None => return Ok(false), // nonzero vs zero
            }
        }
        Ok(true)
    }

    /// Entrywise orthogonality.
    pub fn orthogonal(&self, other: &Self) -> Result<bool> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch);
        }
        for (pos, e) in &self.entries {
            if let Some(f) = other.entries.get(pos) {
                if !e.orthogonal(f)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Entrywise join of an orthogonal pair.
    pub fn join(&self, other: &Self) -> Result<Self> {
        if !self.orthogonal(other)? {
            return Err(Error::NotOrthogonal);
        }
        let mut entries = self.entries.clone();
        for (pos, f) in &other.entries {
            match entries.get_mut(pos) {
                Some(e) => *e = e.join(f)?,
                None => {
                    entries.insert(*pos, f.clone());
                }
            }
        }
        Ok(RookMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// `M² = M`, decided through the product.
    pub fn is_idempotent_matrix(&self) -> Result<bool> {
        if self.rows != self.cols {
            return Ok(false);
        }
        Ok(self.product(self)? == *self)
    }

    /// Whether every entry is diagonal and idempotent — by the structure
    /// theory this characterizes the idempotent square rook matrices.
    pub fn is_diagonal_of_idempotents(&self) -> bool {
        self.entries.iter().all(|(&(i, j), e)| i == j && e.is_idempotent())
    }

    /// A Tarski matrix of degree `m`: an `m × (m+1)` rook matrix with
    /// `A*A = I_{m+1}`.
    pub fn is_tarski(&self, m: usize) -> Result<bool> {
        if m == 0 || self.rows != Dim::Finite(m) || self.cols != Dim::Finite(m + 1) {
            return Err(Error::ShapeMismatch);
        }
        let gram = self.star().product(self)?;
        if gram.entries.len() != m + 1 {
            return Ok(false);
        }
        Ok((0..=m).all(|i| gram.entry(i, i).map(|e| e.is_identity()).unwrap_or(false)))
    }
}

impl RookMatrix<PartialBijection> {
    /// RM1–RM3 plus membership of every entry in the base monoid.
    pub fn validate_in(&self, base: &FiniteBIM) -> Result<bool> {
        for e in self.entries.values() {
            if !base.contains(e) {
                return Err(Error::BaseMismatch);
            }
        }
        self.validate()
    }
}

/// Serialized form of a rook matrix over `I(X)`: the shared ground size
/// plus the sparse entry list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RookMatrixJson {
    pub rows: Dim,
    pub cols: Dim,
    pub entries: Vec<(usize, usize, PartialBijection)>,
}

impl RookMatrixJson {
    pub fn into_matrix(self) -> Result<RookMatrix<PartialBijection>> {
        RookMatrix::new(
            self.rows,
            self.cols,
            self.entries.into_iter().map(|(i, j, e)| ((i, j), e)),
        )
    }

    pub fn from_matrix(m: &RookMatrix<PartialBijection>) -> Self {
        RookMatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: m
                .entries
                .iter()
                .map(|(&(i, j), e)| (i, j, e.clone()))
                .collect(),
        }
    }
}

/// `⨆ X_j = ∪ X_j × {j}`: subsets of a common ground set tagged by their
/// position in the list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedUnion {
    pub parts: Vec<SubsetIdempotent>,
}

impl TaggedUnion {
    pub fn points(&self) -> Vec<(usize, usize)> {
        let mut pts = Vec::new();
        for (tag, part) in self.parts.iter().enumerate() {
            for x in part.members() {
                pts.push((x, tag));
            }
        }
        pts
    }

    pub fn contains(&self, point: (usize, usize)) -> bool {
        self.parts
            .get(point.1)
            .map(|p| p.contains(point.0))
            .unwrap_or(false)
    }
}

/// A bijection `⨆ X_j → ⨆ Y_i` of tagged unions, stored pointwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedBijection {
    pub domain: TaggedUnion,
    pub codomain: TaggedUnion,
    /// Pairs `((x, j), (y, i))`, sorted by source.
    pub pairs: Vec<((usize, usize), (usize, usize))>,
}

impl TaggedBijection {
    pub fn new(
        domain: TaggedUnion,
        codomain: TaggedUnion,
        mut pairs: Vec<((usize, usize), (usize, usize))>,
    ) -> Result<Self> {
        pairs.sort_unstable();
        let sources: Vec<(usize, usize)> = pairs.iter().map(|&(s, _)| s).collect();
        let mut targets: Vec<(usize, usize)> = pairs.iter().map(|&(_, t)| t).collect();
        let dom_points = {
            let mut p = domain.points();
            p.sort_unstable();
            p
        };
        let cod_points = {
            let mut p = codomain.points();
            p.sort_unstable();
            p
        };
        if sources != dom_points {
            return Err(Error::NotBijective(
                "sources do not enumerate the tagged domain exactly once".into(),
            ));
        }
        targets.sort_unstable();
        if targets != cod_points {
            return Err(Error::NotBijective(
                "targets do not enumerate the tagged codomain exactly once".into(),
            ));
        }
        Ok(TaggedBijection {
            domain,
            codomain,
            pairs,
        })
    }

    pub fn apply(&self, point: (usize, usize)) -> Option<(usize, usize)> {
        self.pairs
            .binary_search_by_key(&point, |&(s, _)| s)
            .ok()
            .map(|k| self.pairs[k].1)
    }
}

/// Read off the bijection `⨆ X_j → ⨆ Y_i` induced by a valid finite rook
/// matrix over `I(X)`: `f(x, j) = (f_ij(x), i)`.
pub fn rook_to_bijection(matrix: &RookMatrix<PartialBijection>) -> Result<TaggedBijection> {
    let (m, n) = match (matrix.rows, matrix.cols) {
        (Dim::Finite(m), Dim::Finite(n)) => (m, n),
        _ => return Err(Error::ShapeMismatch),
    };
    let ground = matrix
        .entries
        .values()
        .next()
        .map(|e| e.ground())
        .ok_or_else(|| Error::InvalidInput("empty matrix has no ground set".into()))?;
    let mut x_parts = vec![SubsetIdempotent::empty(ground); n];
    let mut y_parts = vec![SubsetIdempotent::empty(ground); m];
    let mut pairs = Vec::new();
    for (&(i, j), e) in &matrix.entries {
        x_parts[j] = x_parts[j].join(&e.domain())?;
        y_parts[i] = y_parts[i].join(&e.range())?;
        for &(x, y) in e.graph() {
            pairs.push(((x, j), (y, i)));
        }
    }
    TaggedBijection::new(
        TaggedUnion { parts: x_parts },
        TaggedUnion { parts: y_parts },
        pairs,
    )
}

/// Extract the rook matrix whose entries are the tag-restrictions of a
/// bijection of tagged unions.
pub fn bijection_to_rook(
    f: &TaggedBijection,
    ground: GroundSet,
) -> Result<RookMatrix<PartialBijection>> {
    let n = f.domain.parts.len();
    let m = f.codomain.parts.len();
    if n == 0 || m == 0 {
        return Err(Error::ShapeMismatch);
    }
    let mut graphs: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for &((x, j), (y, i)) in &f.pairs {
        graphs.entry((i, j)).or_default().push((x, y));
    }
    let mut entries = BTreeMap::new();
    for ((i, j), graph) in graphs {
        entries.insert((i, j), PartialBijection::new(ground, graph)?);
    }
    let matrix = RookMatrix {
        rows: Dim::Finite(m),
        cols: Dim::Finite(n),
        entries,
    };
    if !matrix.validate()? {
        return Err(Error::InternalInvariantViolation(
            "matrix extracted from a bijection fails validation".into(),
        ));
    }
    Ok(matrix)
}

/// Exhaustive degree-1 Tarski search: a pair with total domains and
/// orthogonal ranges, lexicographically least among the candidates.
pub fn search_tarski_degree1<E: InverseElement>(candidates: &[E]) -> Result<Option<(E, E)>> {
    let mut total: Vec<&E> = candidates
        .iter()
        .filter(|e| e.domain_idempotent().is_identity())
        .collect();
    total.sort();
    total.dedup();
    for a in &total {
        for b in &total {
            if a
                .range_idempotent()
                .orthogonal(&b.range_idempotent())?
            {
                return Ok(Some(((*a).clone(), (*b).clone())));
            }
        }
    }
    Ok(None)
}

/// Decide whether `Δ_ω(es)` and `Δ_ω(fs)` are D-related in the ω-matrix
/// semigroup over `base`, by backtracking over the tagged points of the
/// two disjoint unions. The witness matrix entries must be elements of
/// `base`; prefixes are pruned through the downward-closure predicate.
pub fn diagonal_d_related(
    base: &FiniteBIM,
    es: &[SubsetIdempotent],
    fs: &[SubsetIdempotent],
) -> Result<bool> {
    let dom: Vec<(usize, usize)> = es
        .iter()
        .enumerate()
        .flat_map(|(j, e)| e.members().map(move |x| (x, j)).collect::<Vec<_>>())
        .collect();
    let cod: Vec<(usize, usize)> = fs
        .iter()
        .enumerate()
        .flat_map(|(i, f)| f.members().map(move |y| (y, i)).collect::<Vec<_>>())
        .collect();
    if dom.len() != cod.len() {
        return Ok(false);
    }
    if dom.is_empty() {
        return Ok(true); // the zero idempotent is D-related to itself
    }

    struct Search<'a> {
        base: &'a FiniteBIM,
        dom: Vec<(usize, usize)>,
        cod: Vec<(usize, usize)>,
        used: Vec<bool>,
        pieces: BTreeMap<(usize, usize), Vec<(usize, usize)>>,
    }

    impl Search<'_> {
        fn piece_ok(&self, cell: (usize, usize)) -> Result<bool> {
            let graph = &self.pieces[&cell];
            let piece = PartialBijection::new(self.base.ground(), graph.iter().copied())?;
            Ok(self.base.down_contains(&piece))
        }

        fn pieces_are_elements(&self) -> Result<bool> {
            for graph in self.pieces.values() {
                let piece = PartialBijection::new(self.base.ground(), graph.iter().copied())?;
                if !self.base.contains(&piece) {
                    return Ok(false);
                }
            }
            Ok(true)
        }

        fn assign(&mut self, at: usize) -> Result<bool> {
            if at == self.dom.len() {
                return self.pieces_are_elements();
            }
            let (x, j) = self.dom[at];
            for t in 0..self.cod.len() {
                if self.used[t] {
                    continue;
                }
                let (y, i) = self.cod[t];
                self.used[t] = true;
                self.pieces.entry((i, j)).or_default().push((x, y));
                if self.piece_ok((i, j))? && self.assign(at + 1)? {
                    return Ok(true);
                }
                let graph = self.pieces.get_mut(&(i, j)).expect("just inserted");
                graph.pop();
                if graph.is_empty() {
                    self.pieces.remove(&(i, j));
                }
                self.used[t] = false;
            }
            Ok(false)
        }
    }

    let n = cod.len();
    let mut search = Search {
        base,
        dom,
        cod,
        used: vec![false; n],
        pieces: BTreeMap::new(),
    };
    search.assign(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bim::{symmetric_inverse_monoid_size, SemisimpleSpec};
    use crate::util::SplitMix64;
    use num_bigint::BigUint;

    fn pb(ground: usize, pairs: &[(usize, usize)]) -> PartialBijection {
        PartialBijection::new(GroundSet::new(ground).unwrap(), pairs.iter().copied()).unwrap()
    }

    fn subset(ground: usize, members: &[usize]) -> SubsetIdempotent {
        SubsetIdempotent::from_members(GroundSet::new(ground).unwrap(), members.iter().copied())
            .unwrap()
    }

    fn all_i_n(n: usize) -> Vec<PartialBijection> {
        FiniteBIM::full_symmetric(n)
            .unwrap()
            .enumerate_elements(100_000)
            .unwrap()
    }

    /// Random valid rook matrix over the full `I(n)`: fill cells, then
    /// restrict away RM1/RM2 conflicts in scan order.
    pub(crate) fn random_rook(
        rng: &mut SplitMix64,
        ground: GroundSet,
        m: usize,
        k: usize,
    ) -> RookMatrix<PartialBijection> {
        let n = ground.size();
        let mut entries: BTreeMap<(usize, usize), PartialBijection> = BTreeMap::new();
        for i in 0..m {
            for j in 0..k {
                if rng.chance(1, 3) {
                    continue;
                }
                // random partial bijection
                let mut sources: Vec<usize> = (0..n).collect();
                let mut targets: Vec<usize> = (0..n).collect();
                rng.shuffle(&mut sources);
                rng.shuffle(&mut targets);
                let r = rng.below(n + 1);
                let mut graph: Vec<(usize, usize)> = sources[..r]
                    .iter()
                    .copied()
                    .zip(targets[..r].iter().copied())
                    .collect();
                // enforce RM2 against earlier rows in this column
                for i2 in 0..i {
                    if let Some(prev) = entries.get(&(i2, j)) {
                        let used = prev.dom_mask();
                        graph.retain(|&(s, _)| used & (1 << s) == 0);
                    }
                }
                // enforce RM1 against earlier columns in this row
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
        RookMatrix::new(Dim::Finite(m), Dim::Finite(k), entries).unwrap()
    }

    #[test]
    fn identity_matrix_is_valid_and_neutral() {
        let g = GroundSet::new(3).unwrap();
        let one = PartialBijection::identity(g);
        let id3 = RookMatrix::identity(3, one.clone()).unwrap();
        assert!(id3.validate().unwrap());
        let mut rng = SplitMix64::new(5);
        for _ in 0..20 {
            let a = random_rook(&mut rng, g, 3, 3);
            assert_eq!(id3.product(&a).unwrap(), a);
            assert_eq!(a.product(&id3).unwrap(), a);
        }
    }

    #[test]
    fn rm1_violation_detected() {
        let g = GroundSet::new(3).unwrap();
        // 1x2 matrix [a b] with overlapping ranges
        let a = pb(3, &[(0, 1)]);
        let b = pb(3, &[(2, 1)]);
        let m = RookMatrix::new(
            Dim::Finite(1),
            Dim::Finite(2),
            [((0usize, 0usize), a), ((0, 1), b)],
        )
        .unwrap();
        assert!(!m.validate().unwrap());
        let base = FiniteBIM::full_symmetric(3).unwrap();
        assert!(!m.validate_in(&base).unwrap());
        let _ = g;
    }

    #[test]
    fn diagonal_of_idempotents_is_valid() {
        let es = [
            subset(4, &[0, 1]).to_partial_identity(),
            subset(4, &[2]).to_partial_identity(),
            subset(4, &[0, 3]).to_partial_identity(),
        ];
        let d = RookMatrix::diagonal_omega(&es).unwrap();
        assert!(d.validate().unwrap());
        assert!(d.is_diagonal_of_idempotents());
    }

    #[test]
    fn base_membership_is_checked() {
        let spec = SemisimpleSpec::new(vec![1, 2]).unwrap();
        let base = FiniteBIM::semisimple(&spec);
        let cross_block = pb(3, &[(0, 1)]);
        let m = RookMatrix::new(Dim::Finite(1), Dim::Finite(1), [((0usize, 0usize), cross_block)])
            .unwrap();
        assert!(matches!(m.validate_in(&base), Err(Error::BaseMismatch)));
    }

    #[test]
    fn a_equals_a_astar_a() {
        let g = GroundSet::new(3).unwrap();
        let mut rng = SplitMix64::new(23);
        for _ in 0..100 {
            let (m, k) = (rng.below(3) + 1, rng.below(3) + 1);
            let a = random_rook(&mut rng, g, m, k);
            assert!(a.validate().unwrap());
            let astar = a.star();
            assert!(astar.validate().unwrap());
            assert_eq!(a.product(&astar).unwrap().product(&a).unwrap(), a);
            assert_eq!(astar.product(&a).unwrap().product(&astar).unwrap(), astar);
            assert_eq!(astar.star(), a);
        }
    }

    #[test]
    fn product_star_reverses() {
        let g = GroundSet::new(3).unwrap();
        let mut rng = SplitMix64::new(29);
        for _ in 0..100 {
            let a = random_rook(&mut rng, g, 2, 3);
            let b = random_rook(&mut rng, g, 3, 2);
            let ab = a.product(&b).unwrap();
            assert!(ab.validate().unwrap());
            assert_eq!(ab.star(), b.star().product(&a.star()).unwrap());
        }
    }

    #[test]
    fn product_is_associative() {
        let g = GroundSet::new(3).unwrap();
        let mut rng = SplitMix64::new(31);
        for _ in 0..60 {
            let a = random_rook(&mut rng, g, 2, 3);
            let b = random_rook(&mut rng, g, 3, 2);
            let c = random_rook(&mut rng, g, 2, 2);
            let left = a.product(&b).unwrap().product(&c).unwrap();
            let right = a.product(&b.product(&c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn matrix_order_and_orthogonal_join() {
        let g = GroundSet::new(3).unwrap();
        let mut rng = SplitMix64::new(37);
        for _ in 0..50 {
            let a = random_rook(&mut rng, g, 2, 2);
            assert!(a.leq(&a).unwrap());
            let zero = RookMatrix::zero(Dim::Finite(2), Dim::Finite(2));
            assert!(zero.orthogonal(&a).unwrap());
            assert_eq!(zero.join(&a).unwrap(), a);
            assert!(zero.leq(&a).unwrap());
        }
    }

    #[test]
    fn idempotent_matrices_are_diagonals_of_idempotents_exhaustive_2x2_over_i2() {
        let elems = all_i_n(2);
        assert_eq!(elems.len(), 7);
        let mut valid = 0;
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    for d in &elems {
                        let m = RookMatrix::new(
                            Dim::Finite(2),
                            Dim::Finite(2),
                            [
                                ((0usize, 0usize), a.clone()),
                                ((0, 1), b.clone()),
                                ((1, 0), c.clone()),
                                ((1, 1), d.clone()),
                            ],
                        )
                        .unwrap();
                        if !m.validate().unwrap() {
                            continue;
                        }
                        valid += 1;
                        assert_eq!(
                            m.is_idempotent_matrix().unwrap(),
                            m.is_diagonal_of_idempotents(),
                            "at {m:?}"
                        );
                    }
                }
            }
        }
        assert!(valid > 100);
    }

    #[test]
    fn slide_matrix_relates_shifted_diagonals() {
        // Δ_ω(e_1..e_m) is D-related to Δ_ω(0^r, e_1..e_m) via the matrix
        // with the e's shifted r rows down the diagonal
        let es = [
            subset(4, &[0, 1]).to_partial_identity(),
            subset(4, &[3]).to_partial_identity(),
        ];
        for r in 1..=3usize {
            let shift = RookMatrix::new(
                Dim::Omega,
                Dim::Omega,
                es.iter()
                    .cloned()
                    .enumerate()
                    .map(|(k, e)| ((r + k, k), e)),
            )
            .unwrap();
            assert!(shift.validate().unwrap());
            let gram = shift.star().product(&shift).unwrap();
            assert_eq!(gram, RookMatrix::diagonal_omega(&es).unwrap());
            let cogram = shift.product(&shift.star()).unwrap();
            let mut padded: Vec<PartialBijection> =
                vec![PartialBijection::zero(GroundSet::new(4).unwrap()); r];
            padded.extend(es.iter().cloned());
            assert_eq!(cogram, RookMatrix::diagonal_omega(&padded).unwrap());
        }
    }

    #[test]
    fn no_tarski_matrix_over_finite_ground_at_degree_one() {
        for n in 2..=3 {
            let candidates = all_i_n(n);
            assert!(search_tarski_degree1(&candidates).unwrap().is_none());
        }
    }

    #[test]
    fn padded_identity_is_not_tarski() {
        let g = GroundSet::new(2).unwrap();
        let one = PartialBijection::identity(g);
        // I_1 padded with a zero column: 1 x 2 with only the (0,0) cell
        let a = RookMatrix::new(Dim::Finite(1), Dim::Finite(2), [((0usize, 0usize), one)]).unwrap();
        assert!(!a.is_tarski(1).unwrap());
        assert!(matches!(a.is_tarski(2), Err(Error::ShapeMismatch)));
    }

    #[test]
    fn rook_matrices_over_two_element_monoid_count_like_i_n() {
        // the n x n rook matrices over {0, 1} biject with I_n
        let base = FiniteBIM::close(GroundSet::new(1).unwrap(), &[], 10).unwrap();
        let one = PartialBijection::identity(GroundSet::new(1).unwrap());
        for n in 1..=3usize {
            let cells = n * n;
            let mut count = BigUint::from(0u32);
            for mask in 0u32..(1 << cells) {
                let entries = (0..cells).filter(|c| mask & (1 << c) != 0).map(|c| {
                    let i = c / n;
                    let j = c % n;
                    ((i, j), one.clone())
                });
                let m = RookMatrix::new(Dim::Finite(n), Dim::Finite(n), entries).unwrap();
                if m.validate_in(&base).unwrap() {
                    count += 1u32;
                }
            }
            assert_eq!(count, symmetric_inverse_monoid_size(n));
        }
    }

    #[test]
    fn diagonal_d_relatedness_over_two_element_monoid_is_rank() {
        // diagonal idempotents over {0,1} are classified by the number of
        // nonzero diagonal entries
        let base = FiniteBIM::close(GroundSet::new(1).unwrap(), &[], 10).unwrap();
        let top = SubsetIdempotent::top(GroundSet::new(1).unwrap());
        let bot = SubsetIdempotent::empty(GroundSet::new(1).unwrap());
        let diag = |bits: &[bool]| -> Vec<SubsetIdempotent> {
            bits.iter().map(|&b| if b { top } else { bot }).collect()
        };
        assert!(diagonal_d_related(&base, &diag(&[true, false]), &diag(&[false, true])).unwrap());
        assert!(diagonal_d_related(&base, &diag(&[true, true]), &diag(&[true, true])).unwrap());
        assert!(!diagonal_d_related(&base, &diag(&[true, true]), &diag(&[true, false])).unwrap());
        assert!(diagonal_d_related(&base, &diag(&[false]), &diag(&[false, false])).unwrap());
    }

    #[test]
    fn rook_bijection_round_trip_small() {
        let g = GroundSet::new(4).unwrap();
        let mut rng = SplitMix64::new(41);
        let mut nonempty = 0;
        for _ in 0..100 {
            let (m, k) = (rng.below(3) + 1, rng.below(3) + 1);
            let a = random_rook(&mut rng, g, m, k);
            if a.support() == 0 {
                continue;
            }
            nonempty += 1;
            let f = rook_to_bijection(&a).unwrap();
            let back = bijection_to_rook(&f, g).unwrap();
            // the round trip reproduces the nonzero entries exactly
            assert_eq!(back.entries, a.entries);
            let again = rook_to_bijection(&back).unwrap();
            assert_eq!(again, f);
        }
        assert!(nonempty > 50);
    }

    #[test]
    fn rook_to_bijection_on_columns() {
        // 2x1 column [a; b] with orthogonal domains: one domain tag, two
        // codomain tags
        let a = pb(4, &[(0, 1), (1, 2)]);
        let b = pb(4, &[(2, 0)]);
        let m = RookMatrix::new(
            Dim::Finite(2),
            Dim::Finite(1),
            [((0usize, 0usize), a.clone()), ((1, 0), b.clone())],
        )
        .unwrap();
        assert!(m.validate().unwrap());
        let f = rook_to_bijection(&m).unwrap();
        assert_eq!(f.domain.parts.len(), 1);
        assert_eq!(f.domain.parts[0], subset(4, &[0, 1, 2]));
        assert_eq!(f.codomain.parts[0], subset(4, &[1, 2]));
        assert_eq!(f.codomain.parts[1], subset(4, &[0]));
        assert_eq!(f.apply((0, 0)), Some((1, 0)));
        assert_eq!(f.apply((2, 0)), Some((0, 1)));
    }

    #[test]
    fn json_round_trip() {
        let g = GroundSet::new(3).unwrap();
        let mut rng = SplitMix64::new(53);
        let a = random_rook(&mut rng, g, 2, 3);
        let text = serde_json::to_string(&RookMatrixJson::from_matrix(&a)).unwrap();
        let back: RookMatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_matrix().unwrap(), a);
        // omega tags parse
        let d: Dim = serde_json::from_str("\"omega\"").unwrap();
        assert_eq!(d, Dim::Omega);
        let d: Dim = serde_json::from_str("5").unwrap();
        assert_eq!(d, Dim::Finite(5));
        assert!(serde_json::from_str::<Dim>("\"q\"").is_err());
        assert!(serde_json::from_str::<Dim>("0").is_err());
    }
}
