//! Residue-class affine maps on the natural numbers.
//!
//! The idempotents are periodic sets (finite unions of residue classes, in
//! least-modulus canonical form). A map is a finite union of pieces, each
//! piece the order isomorphism between a domain class and an image class;
//! `n ↦ a·n + b` on a class is exactly such a piece, and the class stays
//! closed under composition, inverse, restriction, and compatible joins.
//! Image sets are required to be exactly periodic: a piece whose image
//! would need a finite correction set is rejected at construction.
//!
//! All arithmetic is exact; moduli are capped so every operation stays
//! bounded.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard bound on every modulus handled symbolically.
pub const MODULUS_CAP: u64 = 1_000_000;

fn checked_modulus(m: u128) -> Result<u64> {
    if m == 0 || m > MODULUS_CAP as u128 {
        Err(Error::OverflowGuard(m))
    } else {
        Ok(m as u64)
    }
}

/// The residue class `{x ∈ ℕ : x ≡ residue (mod modulus)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResClass {
    modulus: u64,
    residue: u64,
}

impl ResClass {
    pub fn new(residue: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidInput("modulus must be positive".into()));
        }
        if modulus > MODULUS_CAP {
            return Err(Error::OverflowGuard(modulus as u128));
        }
        if residue >= modulus {
            return Err(Error::InvalidInput(format!(
                "residue {residue} not reduced modulo {modulus}"
            )));
        }
        Ok(ResClass { modulus, residue })
    }

    pub fn naturals() -> Self {
        ResClass { modulus: 1, residue: 0 }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn contains(&self, x: u64) -> bool {
        x % self.modulus == self.residue
    }

    /// The `k`-th element in increasing order.
    pub fn nth(&self, k: u64) -> u64 {
        self.residue + k * self.modulus
    }

    /// Position of `x` within the class, when `x` belongs to it.
    pub fn position(&self, x: u64) -> Option<u64> {
        if self.contains(x) {
            Some((x - self.residue) / self.modulus)
        } else {
            None
        }
    }

    /// `self ⊆ other`.
    pub fn refines(&self, other: &ResClass) -> bool {
        self.modulus.is_multiple_of(other.modulus)
            && self.residue % other.modulus == other.residue
    }

    /// Intersection of two classes: empty or a single class at the lcm of
    /// the moduli (Chinese remaindering).
    pub fn intersect(&self, other: &ResClass) -> Result<Option<ResClass>> {
        let g = self.modulus.gcd(&other.modulus);
        let (hi, lo) = if self.residue >= other.residue {
            (self.residue, other.residue)
        } else {
            (other.residue, self.residue)
        };
        if !(hi - lo).is_multiple_of(g) {
            return Ok(None);
        }
        let lcm = checked_modulus(self.modulus as u128 / g as u128 * other.modulus as u128)?;
        // solve residue + modulus * t ≡ other.residue (mod other.modulus)
        let m1 = (self.modulus / g) as i128;
        let m2 = (other.modulus / g) as i128;
        let diff = (other.residue as i128 - self.residue as i128) / g as i128;
        let (_, inv, _) = ext_gcd(m1, m2);
        let t = (diff % m2 * inv % m2 + m2) % m2;
        let r = (self.residue as i128 + self.modulus as i128 * t) % lcm as i128;
        Ok(Some(ResClass::new(r as u64, lcm)?))
    }
}

/// Extended Euclid: returns `(g, s, t)` with `s·a + t·b = g`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = ext_gcd(b, a % b);
        (g, t, s - (a / b) * t)
    }
}

/// A finite union of residue classes in least-modulus canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PeriodicSet {
    modulus: u64,
    /// Sorted, deduplicated residues below the modulus.
    residues: Vec<u64>,
}

impl PeriodicSet {
    pub fn new(modulus: u64, residues: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidInput("modulus must be positive".into()));
        }
        if modulus > MODULUS_CAP {
            return Err(Error::OverflowGuard(modulus as u128));
        }
        let mut rs: Vec<u64> = residues.into_iter().collect();
        rs.sort_unstable();
        rs.dedup();
        if let Some(&r) = rs.iter().find(|&&r| r >= modulus) {
            return Err(Error::InvalidInput(format!(
                "residue {r} not reduced modulo {modulus}"
            )));
        }
        Ok(PeriodicSet { modulus, residues: rs }.canonicalize())
    }

    /// Reduce to the least modulus representing the same set.
    fn canonicalize(self) -> PeriodicSet {
        if self.residues.is_empty() {
            return PeriodicSet { modulus: 1, residues: Vec::new() };
        }
        let m = self.modulus;
        let member = |r: u64| self.residues.binary_search(&r).is_ok();
        'divisors: for d in 1..=m {
            if !m.is_multiple_of(d) {
                continue;
            }
            // every class mod d must be fully in or fully out
            for r in 0..d {
                let first = member(r);
                let mut l = r;
                while l < m {
                    if member(l) != first {
                        continue 'divisors;
                    }
                    l += d;
                }
            }
            let residues: Vec<u64> = (0..d).filter(|&r| member(r)).collect();
            return PeriodicSet { modulus: d, residues };
        }
        self
    }

    pub fn empty() -> Self {
        PeriodicSet { modulus: 1, residues: Vec::new() }
    }

    pub fn naturals() -> Self {
        PeriodicSet { modulus: 1, residues: vec![0] }
    }

    pub fn from_class(class: ResClass) -> Self {
        PeriodicSet {
            modulus: class.modulus,
            residues: vec![class.residue],
        }
        .canonicalize()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn is_naturals(&self) -> bool {
        self.modulus == 1 && self.residues == [0]
    }

    pub fn contains(&self, x: u64) -> bool {
        self.residues.binary_search(&(x % self.modulus)).is_ok()
    }

    /// Density numerator over the canonical modulus.
    pub fn class_count(&self) -> usize {
        self.residues.len()
    }

    /// The classes of the canonical modulus.
    pub fn classes(&self) -> Vec<ResClass> {
        self.residues
            .iter()
            .map(|&r| ResClass { modulus: self.modulus, residue: r })
            .collect()
    }

    /// Residues at a coarser-to-finer lift of the modulus.
    fn lift_residues(&self, to: u64) -> Vec<u64> {
        debug_assert_eq!(to % self.modulus, 0);
        let mut out = Vec::with_capacity(self.residues.len() * (to / self.modulus) as usize);
        for k in 0..to / self.modulus {
            for &r in &self.residues {
                out.push(r + k * self.modulus);
            }
        }
        out.sort_unstable();
        out
    }

    fn common_modulus(&self, other: &PeriodicSet) -> Result<u64> {
        let g = self.modulus.gcd(&other.modulus);
        checked_modulus(self.modulus as u128 / g as u128 * other.modulus as u128)
    }

    pub fn union(&self, other: &PeriodicSet) -> Result<PeriodicSet> {
        let m = self.common_modulus(other)?;
        let mut rs = self.lift_residues(m);
        rs.extend(other.lift_residues(m));
        PeriodicSet::new(m, rs)
    }

    pub fn intersect(&self, other: &PeriodicSet) -> Result<PeriodicSet> {
        let m = self.common_modulus(other)?;
        let a = self.lift_residues(m);
        let b = other.lift_residues(m);
        PeriodicSet::new(m, a.into_iter().filter(|r| b.binary_search(r).is_ok()))
    }

    pub fn minus(&self, other: &PeriodicSet) -> Result<PeriodicSet> {
        let m = self.common_modulus(other)?;
        let a = self.lift_residues(m);
        let b = other.lift_residues(m);
        PeriodicSet::new(m, a.into_iter().filter(|r| b.binary_search(r).is_err()))
    }

    pub fn complement(&self) -> PeriodicSet {
        let rs: Vec<u64> = (0..self.modulus)
            .filter(|r| self.residues.binary_search(r).is_err())
            .collect();
        PeriodicSet { modulus: self.modulus, residues: rs }.canonicalize()
    }

    pub fn disjoint(&self, other: &PeriodicSet) -> Result<bool> {
        Ok(self.intersect(other)?.is_empty())
    }

    pub fn subset_of(&self, other: &PeriodicSet) -> Result<bool> {
        Ok(self.minus(other)?.is_empty())
    }
}

/// One piece of an affine map: the unique order isomorphism between two
/// residue classes. `n ↦ a·n + b` restricted to a class is exactly this,
/// with the image class read off the slope and offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffinePiece {
    dom: ResClass,
    im: ResClass,
}

impl AffinePiece {
    pub fn new(dom: ResClass, im: ResClass) -> Self {
        AffinePiece { dom, im }
    }

    /// The piece `x ↦ (a·x + b) / div` on the class `dom`. Rejected unless
    /// the image is exactly a full residue class inside ℕ.
    pub fn from_slope(a: u64, b: i64, div: u64, dom: ResClass) -> Result<Self> {
        if a == 0 || div == 0 {
            return Err(Error::InvalidInput("slope and divisor must be positive".into()));
        }
        let step_num = a as u128 * dom.modulus as u128;
        if !step_num.is_multiple_of(div as u128) {
            return Err(Error::InvalidInput(
                "divisor does not divide the image step".into(),
            ));
        }
        let step = checked_modulus(step_num / div as u128)?;
        let first_num = a as i128 * dom.residue as i128 + b as i128;
        if first_num < 0 {
            return Err(Error::InvalidInput("image leaves the naturals".into()));
        }
        if first_num % div as i128 != 0 {
            return Err(Error::InvalidInput(
                "divisor does not divide the image offset".into(),
            ));
        }
        let first = first_num / div as i128;
        if first >= step as i128 {
            return Err(Error::InvalidInput(
                "image is not a full residue class (finite correction sets are rejected)".into(),
            ));
        }
        Ok(AffinePiece {
            dom,
            im: ResClass::new(first as u64, step)?,
        })
    }

    pub fn dom(&self) -> ResClass {
        self.dom
    }

    pub fn im(&self) -> ResClass {
        self.im
    }

    pub fn apply(&self, x: u64) -> Option<u64> {
        self.dom.position(x).map(|k| self.im.nth(k))
    }

    pub fn inverse(&self) -> AffinePiece {
        AffinePiece { dom: self.im, im: self.dom }
    }

    /// Restrict to a subclass of the domain; the image restricts to a full
    /// class again.
    fn restrict_dom(&self, sub: ResClass) -> Result<AffinePiece> {
        debug_assert!(sub.refines(&self.dom));
        let t = sub.modulus / self.dom.modulus;
        let p0 = self.dom.position(sub.residue).expect("sub refines dom");
        let step = checked_modulus(self.im.modulus as u128 * t as u128)?;
        let first = self.im.nth(p0);
        Ok(AffinePiece {
            dom: sub,
            im: ResClass { modulus: step, residue: first },
        })
    }

    fn restrict_im(&self, sub: ResClass) -> Result<AffinePiece> {
        Ok(self.inverse().restrict_dom(sub)?.inverse())
    }

    /// Reduced `(a, b, div)` with the piece equal to `x ↦ (a·x + b)/div`.
    pub fn slope_form(&self) -> (u64, i64, u64) {
        let a = self.im.modulus as i128;
        let b = self.im.residue as i128 * self.dom.modulus as i128
            - self.dom.residue as i128 * self.im.modulus as i128;
        let d = self.dom.modulus as i128;
        let g = gcd_i128(gcd_i128(a, b.abs()), d).max(1);
        ((a / g) as u64, (b / g) as i64, (d / g) as u64)
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd_i128(b, a % b)
    }
}

/// An injective partial map `ℕ ⇀ ℕ` made of finitely many affine pieces
/// with pairwise disjoint domains and pairwise disjoint images, kept in a
/// canonical form: pieces sharing a slope formula are merged over the
/// least modulus of their joined domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineMap {
    pieces: Vec<AffinePiece>,
}

impl AffineMap {
    pub fn new(pieces: impl IntoIterator<Item = AffinePiece>) -> Result<Self> {
        let pieces = canonical_pieces(pieces.into_iter().collect())?;
        // injectivity: pairwise disjoint domains and images
        for (i, p) in pieces.iter().enumerate() {
            for q in pieces.iter().skip(i + 1) {
                if p.dom.intersect(&q.dom)?.is_some() {
                    return Err(Error::NotInjective("overlapping piece domains".into()));
                }
                if p.im.intersect(&q.im)?.is_some() {
                    return Err(Error::NotInjective("overlapping piece images".into()));
                }
            }
        }
        Ok(AffineMap { pieces })
    }

    /// `n ↦ a·n + b` on all of ℕ.
    pub fn total_affine(a: u64, b: i64) -> Result<Self> {
        AffineMap::new([AffinePiece::from_slope(a, b, 1, ResClass::naturals())?])
    }

    pub fn zero() -> Self {
        AffineMap { pieces: Vec::new() }
    }

    pub fn identity() -> Self {
        AffineMap {
            pieces: vec![AffinePiece::new(ResClass::naturals(), ResClass::naturals())],
        }
    }

    pub fn identity_on(set: &PeriodicSet) -> Self {
        AffineMap {
            pieces: set.classes().into_iter().map(|c| AffinePiece::new(c, c)).collect(),
        }
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn domain(&self) -> PeriodicSet {
        self.pieces
            .iter()
            .fold(PeriodicSet::empty(), |acc, p| {
                acc.union(&PeriodicSet::from_class(p.dom)).expect("capped moduli")
            })
    }

    pub fn range(&self) -> PeriodicSet {
        self.pieces
            .iter()
            .fold(PeriodicSet::empty(), |acc, p| {
                acc.union(&PeriodicSet::from_class(p.im)).expect("capped moduli")
            })
    }

    pub fn apply(&self, x: u64) -> Option<u64> {
        self.pieces.iter().find_map(|p| p.apply(x))
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_idempotent(&self) -> bool {
        self.pieces.iter().all(|p| p.dom == p.im)
    }

    pub fn is_identity(&self) -> bool {
        self.pieces.len() == 1
            && self.pieces[0].dom == ResClass::naturals()
            && self.pieces[0].im == ResClass::naturals()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &AffineMap) -> Result<AffineMap> {
        let mut pieces = Vec::new();
        for p in &other.pieces {
            for q in &self.pieces {
                if let Some(mid) = p.im.intersect(&q.dom)? {
                    let p2 = p.restrict_im(mid)?;
                    let q2 = q.restrict_dom(mid)?;
                    pieces.push(AffinePiece::new(p2.dom, q2.im));
                }
            }
        }
        AffineMap::new(pieces)
    }

    pub fn inverse(&self) -> AffineMap {
        AffineMap {
            pieces: {
                let mut ps: Vec<AffinePiece> =
                    self.pieces.iter().map(|p| p.inverse()).collect();
                ps.sort_unstable();
                ps
            },
        }
    }

    /// Domain restriction to a periodic set.
    pub fn restrict(&self, set: &PeriodicSet) -> Result<AffineMap> {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for c in set.classes() {
                if let Some(sub) = p.dom.intersect(&c)? {
                    pieces.push(p.restrict_dom(sub)?);
                }
            }
        }
        AffineMap::new(pieces)
    }

    pub fn powi(&self, k: usize) -> Result<AffineMap> {
        let mut acc = AffineMap::identity();
        for _ in 0..k {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// `d(a) = a⁻¹a`, as a periodic set.
    pub fn domain_set(&self) -> PeriodicSet {
        self.domain()
    }

    /// `a · 1_e · a⁻¹` as a set: the image of `e ∧ d(a)`.
    pub fn conjugate_set(&self, e: &PeriodicSet) -> Result<PeriodicSet> {
        Ok(self.restrict(e)?.range())
    }

    pub fn compatible(&self, other: &AffineMap) -> Result<bool> {
        Ok(self.inverse().compose(other)?.is_idempotent()
            && self.compose(&other.inverse())?.is_idempotent())
    }

    pub fn orthogonal(&self, other: &AffineMap) -> Result<bool> {
        Ok(self.domain().disjoint(&other.domain())?
            && self.range().disjoint(&other.range())?)
    }

    pub fn natural_leq(&self, other: &AffineMap) -> Result<bool> {
        // a ≤ b iff a = b restricted to d(a)
        Ok(*self == other.restrict(&self.domain())?)
    }

    /// Join of a compatible pair.
    pub fn join(&self, other: &AffineMap) -> Result<AffineMap> {
        if !self.compatible(other)? {
            return Err(Error::NotCompatible);
        }
        let fresh = other.restrict(&other.domain().minus(&self.domain())?)?;
        let mut pieces = self.pieces.clone();
        pieces.extend(fresh.pieces);
        AffineMap::new(pieces)
    }
}

/// Merge pieces that share a reduced slope formula over the least modulus
/// of their combined domains, then sort.
fn canonical_pieces(pieces: Vec<AffinePiece>) -> Result<Vec<AffinePiece>> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(u64, i64, u64), PeriodicSet> = BTreeMap::new();
    for p in pieces {
        let key = p.slope_form();
        let dom = PeriodicSet::from_class(p.dom);
        let entry = groups.entry(key).or_insert_with(PeriodicSet::empty);
        *entry = entry.union(&dom)?;
    }
    let mut out = Vec::new();
    for ((a, b, d), dom) in groups {
        for c in dom.classes() {
            let piece = AffinePiece::from_slope(a, b, d, c).map_err(|_| {
                Error::InternalInvariantViolation(
                    "merged piece lost image periodicity".into(),
                )
            })?;
            out.push(piece);
        }
    }
    out.sort_unstable();
    Ok(out)
}

// JSON form: {"pieces": [{"a": 2, "b": 0, "mod": 1, "res": 0}, ...]};
// the optional "div" writes pieces with fractional slope, such as inverses.

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffinePieceJson {
    pub a: u64,
    pub b: i64,
    #[serde(rename = "mod")]
    pub modulus: u64,
    pub res: u64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub div: u64,
}

fn one() -> u64 {
    1
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_one(v: &u64) -> bool {
    *v == 1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineMapJson {
    pub pieces: Vec<AffinePieceJson>,
}

impl TryFrom<AffineMapJson> for AffineMap {
    type Error = Error;
    fn try_from(raw: AffineMapJson) -> Result<AffineMap> {
        let mut pieces = Vec::with_capacity(raw.pieces.len());
        for p in raw.pieces {
            pieces.push(AffinePiece::from_slope(
                p.a,
                p.b,
                p.div,
                ResClass::new(p.res, p.modulus)?,
            )?);
        }
        AffineMap::new(pieces)
    }
}

impl From<AffineMap> for AffineMapJson {
    fn from(map: AffineMap) -> AffineMapJson {
        AffineMapJson {
            pieces: map
                .pieces
                .iter()
                .map(|p| {
                    let (a, b, div) = p.slope_form();
                    AffinePieceJson {
                        a,
                        b,
                        modulus: p.dom.modulus(),
                        res: p.dom.residue(),
                        div,
                    }
                })
                .collect(),
        }
    }
}
