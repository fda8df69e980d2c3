//! The type monoid of a finite Boolean inverse monoid, presented by its
//! atom D-classes.
//!
//! Generators are the D-classes of the algebra atoms; the distinguished
//! order-unit is the class-multiset of the atoms of the identity. D-related
//! idempotent pairs contribute relations between the atom decompositions of
//! the two sides — for the monoids built here those relations collapse to
//! trivial ones, and the presentation is cross-checked at small sizes
//! against exhaustive rook-matrix search over the matrix semigroup.
//!
//! The word problem is a bounded semi-decision: `Unknown` answers are
//! inconclusive, never `No`.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::bim::FiniteBIM;
use crate::error::{Error, Result};
use crate::pbij::SubsetIdempotent;

/// A finitely supported non-negative combination of the generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeElement {
    coeffs: Vec<u64>,
}

impl TypeElement {
    pub fn new(coeffs: Vec<u64>) -> Self {
        TypeElement { coeffs }
    }

    pub fn zero(arity: usize) -> Self {
        TypeElement {
            coeffs: vec![0; arity],
        }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn degree(&self) -> u64 {
        self.coeffs.iter().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        TypeElement {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, k: u64) -> Self {
        TypeElement {
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }

    /// Componentwise order (the algebraic preorder of the free monoid).
    pub fn dominates(&self, other: &Self) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a >= b)
    }

    fn sub_add(&self, minus: &Self, plus: &Self) -> Self {
        TypeElement {
            coeffs: self
                .coeffs
                .iter()
                .zip(&minus.coeffs)
                .zip(&plus.coeffs)
                .map(|((a, m), p)| a - m + p)
                .collect(),
        }
    }
}

/// Verdict of a bounded search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

/// `⟨atom D-classes | atom-decomposition relations⟩` with the distinguished
/// order-unit `δ(1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypePresentation {
    generator_count: usize,
    /// Atoms of each generator class; empty for hand-built presentations.
    generator_atoms: Vec<Vec<SubsetIdempotent>>,
    relations: Vec<(TypeElement, TypeElement)>,
    unit: TypeElement,
}

impl TypePresentation {
    /// Hand-built presentation, e.g. for injecting extra relations.
    pub fn from_parts(
        generator_count: usize,
        relations: Vec<(TypeElement, TypeElement)>,
        unit: TypeElement,
    ) -> Result<Self> {
        if unit.arity() != generator_count {
            return Err(Error::InvalidInput("unit arity mismatch".into()));
        }
        for (l, r) in &relations {
            if l.arity() != generator_count || r.arity() != generator_count {
                return Err(Error::InvalidInput("relation arity mismatch".into()));
            }
        }
        let relations = relations.into_iter().filter(|(l, r)| l != r).collect();
        Ok(TypePresentation {
            generator_count,
            generator_atoms: Vec::new(),
            relations,
            unit,
        })
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn relations(&self) -> &[(TypeElement, TypeElement)] {
        &self.relations
    }

    pub fn unit(&self) -> &TypeElement {
        &self.unit
    }

    pub fn generator_atoms(&self) -> &[Vec<SubsetIdempotent>] {
        &self.generator_atoms
    }

    /// `δ(e)`: the class-multiset of the atoms below `e`.
    pub fn delta(&self, e: &SubsetIdempotent) -> Result<TypeElement> {
        if self.generator_atoms.is_empty() && self.generator_count > 0 {
            return Err(Error::InvalidInput(
                "presentation carries no atom data".into(),
            ));
        }
        let mut coeffs = vec![0u64; self.generator_count];
        let mut covered = 0u64;
        for (c, atoms) in self.generator_atoms.iter().enumerate() {
            for atom in atoms {
                if atom.leq(e)? {
                    coeffs[c] += 1;
                    covered |= atom.mask();
                }
            }
        }
        if covered != e.mask() {
            return Err(Error::NotAnElement);
        }
        Ok(TypeElement { coeffs })
    }

    /// Explore the rewrite class of `start`, calling `found` on each
    /// member. Vectors of degree above `bound` are not expanded; the
    /// return value reports whether the search was truncated.
    fn explore(
        &self,
        start: &TypeElement,
        bound: u64,
        mut found: impl FnMut(&TypeElement) -> bool,
    ) -> (bool, bool) {
        let mut visited: HashSet<TypeElement> = HashSet::new();
        let mut queue: VecDeque<TypeElement> = VecDeque::new();
        let mut truncated = false;
        visited.insert(start.clone());
        queue.push_back(start.clone());
        while let Some(v) = queue.pop_front() {
            if found(&v) {
                return (true, truncated);
            }
            for (l, r) in &self.relations {
                for (minus, plus) in [(l, r), (r, l)] {
                    if v.dominates(minus) {
                        let next = v.sub_add(minus, plus);
                        if next.degree() > bound {
                            truncated = true;
                            continue;
                        }
                        if visited.insert(next.clone()) {
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
        (false, truncated)
    }

    /// Equality in the presented monoid, by breadth-first rewriting up to
    /// total degree `bound`.
    pub fn equal(&self, x: &TypeElement, y: &TypeElement, bound: u64) -> Decision {
        if x == y {
            return Decision::Yes;
        }
        let (hit, truncated) = self.explore(x, bound, |v| v == y);
        match (hit, truncated) {
            (true, _) => Decision::Yes,
            (false, false) => Decision::No,
            (false, true) => Decision::Unknown,
        }
    }

    /// `x ≤ y` in the algebraic preorder: some member of the rewrite class
    /// of `y` dominates `x` componentwise.
    pub fn leq(&self, x: &TypeElement, y: &TypeElement, bound: u64) -> Decision {
        let (hit, truncated) = self.explore(y, bound, |v| v.dominates(x));
        match (hit, truncated) {
            (true, _) => Decision::Yes,
            (false, false) => Decision::No,
            (false, true) => Decision::Unknown,
        }
    }
}

/// Outcome of scanning for `(n+1)·u ≤ n·u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    /// Least degree at which the collapse is certified, when found.
    pub found: Option<usize>,
    pub n_max: usize,
    pub bound: u64,
    /// Degrees where the bounded search was inconclusive.
    pub inconclusive: Vec<usize>,
}

/// Scan `n = 1..=n_max` for a certified `(n+1)·u ≤ n·u`. Absence is a
/// semi-decision relative to the rewriting bound.
pub fn tarski_obstruction(
    presentation: &TypePresentation,
    n_max: usize,
    bound: u64,
) -> ObstructionReport {
    let u = presentation.unit();
    let mut inconclusive = Vec::new();
    for n in 1..=n_max {
        let lhs = u.scale(n as u64 + 1);
        let rhs = u.scale(n as u64);
        match presentation.leq(&lhs, &rhs, bound) {
            Decision::Yes => {
                return ObstructionReport {
                    found: Some(n),
                    n_max,
                    bound,
                    inconclusive,
                }
            }
            Decision::No => {}
            Decision::Unknown => inconclusive.push(n),
        }
    }
    ObstructionReport {
        found: None,
        n_max,
        bound,
        inconclusive,
    }
}

/// Extract the atom-class presentation of the type monoid of `monoid`.
pub fn present(monoid: &FiniteBIM) -> Result<TypePresentation> {
    let classes = monoid.atom_classes();
    let generator_count = classes.class_count;
    let generator_atoms: Vec<Vec<SubsetIdempotent>> = (0..generator_count)
        .map(|c| classes.atoms_of_class(c))
        .collect();
    let unit = TypeElement::new(classes.class_vector(&monoid.top())?);

    let mut relations: Vec<(TypeElement, TypeElement)> = Vec::new();
    // relations come from D-related idempotent pairs of the monoid itself;
    // skip the scan only when the algebra is too large to enumerate, where
    // blockwise ranks make every such relation trivial anyway
    if let Ok(idempotents) = monoid.idempotents() {
        let mut seen: HashSet<(TypeElement, TypeElement)> = HashSet::new();
        for (a, e) in idempotents.iter().enumerate() {
            for f in idempotents.iter().skip(a + 1) {
                if monoid.d_related(e, f)?.is_some() {
                    let le = TypeElement::new(classes.class_vector(e)?);
                    let lf = TypeElement::new(classes.class_vector(f)?);
                    if le != lf {
                        let key = if le <= lf {
                            (le.clone(), lf.clone())
                        } else {
                            (lf.clone(), le.clone())
                        };
                        if seen.insert(key.clone()) {
                            relations.push(key);
                        }
                    }
                }
            }
        }
    }

    Ok(TypePresentation {
        generator_count,
        generator_atoms,
        relations,
        unit,
    })
}

/// The partial sum `[e] ⊕ [f]`: the class of `e' ∨ f'` over orthogonal
/// D-representatives, when such representatives exist. When two distinct
/// witness pairs are found, well-definedness is asserted by comparing
/// their joins up to D.
pub fn oplus_partial(
    monoid: &FiniteBIM,
    e: &SubsetIdempotent,
    f: &SubsetIdempotent,
) -> Result<Option<SubsetIdempotent>> {
    if let Some(spec) = monoid.semisimple_spec() {
        // blockwise ranks decide representability directly
        let blocks = spec.blocks();
        let rank_in = |s: &SubsetIdempotent, (start, len): (usize, usize)| {
            (start..start + len).filter(|&p| s.contains(p)).count()
        };
        let mut members = Vec::new();
        for &(start, len) in &blocks {
            let re = rank_in(e, (start, len));
            let rf = rank_in(f, (start, len));
            if re + rf > len {
                return Ok(None);
            }
            members.extend(start..start + re + rf);
        }
        return Ok(Some(SubsetIdempotent::from_members(
            monoid.ground(),
            members,
        )?));
    }

    let idempotents = monoid.idempotents()?;
    let mut reps_e = Vec::new();
    let mut reps_f = Vec::new();
    for i in &idempotents {
        if monoid.d_related(e, i)?.is_some() {
            reps_e.push(*i);
        }
        if monoid.d_related(f, i)?.is_some() {
            reps_f.push(*i);
        }
    }
    let mut witnesses = Vec::new();
    'outer: for ep in &reps_e {
        for fp in &reps_f {
            if ep.disjoint(fp)? {
                witnesses.push(ep.join(fp)?);
                if witnesses.len() == 2 {
                    break 'outer;
                }
            }
        }
    }
    match witnesses.as_slice() {
        [] => Ok(None),
        [w] => Ok(Some(*w)),
        [w1, w2, ..] => {
            if monoid.d_related(w1, w2)?.is_none() {
                return Err(Error::InternalInvariantViolation(
                    "orthogonal-representative joins landed in different D-classes".into(),
                ));
            }
            Ok(Some(*w1))
        }
    }
}
