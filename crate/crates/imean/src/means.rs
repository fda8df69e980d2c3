//! Exact invariant-mean computation on finite Boolean inverse monoids.
//!
//! A mean is determined by one non-negative rational per atom D-class: the
//! value extends additively over the atoms of each idempotent, equality on
//! D-related atoms folds the invariance condition into the encoding, and
//! the single normalization constraint `Σ n_c · x_c = 1` cuts out a
//! simplex-like polytope whose vertices are enumerated exactly. No floating
//! point appears anywhere in a feasibility decision.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bim::{AtomClasses, FiniteBIM, Pencil};
use crate::error::{Error, Result};
use crate::pbij::SubsetIdempotent;

/// Default cap on the number of polytope vertices reported by [`solve`].
pub const DEFAULT_VERTEX_CAP: usize = 64;

const ENUMERATION_CAP: usize = 1 << 20;

/// An invariant mean (or a candidate for one): an exact non-negative
/// rational per atom D-class, extended to every idempotent of the algebra
/// by summing over its atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanVector {
    classes: AtomClasses,
    values: Vec<BigRational>,
    normalized: bool,
}

impl MeanVector {
    pub fn new(classes: AtomClasses, values: Vec<BigRational>) -> Result<Self> {
        if values.len() != classes.class_count {
            return Err(Error::InvalidInput(format!(
                "expected {} class values, got {}",
                classes.class_count,
                values.len()
            )));
        }
        if values.iter().any(|v| v.is_negative()) {
            return Err(Error::InvalidInput("mean values must be non-negative".into()));
        }
        Ok(MeanVector {
            classes,
            values,
            normalized: true,
        })
    }

    /// Same, but without the expectation that the total mass is one.
    pub fn new_unnormalized(classes: AtomClasses, values: Vec<BigRational>) -> Result<Self> {
        let mut mv = MeanVector::new(classes, values)?;
        mv.normalized = false;
        Ok(mv)
    }

    pub fn classes(&self) -> &AtomClasses {
        &self.classes
    }

    pub fn class_values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn is_flagged_normalized(&self) -> bool {
        self.normalized
    }

    /// `μ(e) = Σ_{atoms a ≤ e} value[class(a)]`. Errors when `e` is not a
    /// union of algebra atoms.
    pub fn evaluate(&self, e: &SubsetIdempotent) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for i in self.classes.atoms_in(e)? {
            total += &self.values[self.classes.class_of[i]];
        }
        Ok(total)
    }

    pub fn total_mass(&self) -> BigRational {
        let sizes = self.classes.class_sizes();
        let mut total = BigRational::zero();
        for (c, v) in self.values.iter().enumerate() {
            total += v * BigRational::from_integer(BigInt::from(sizes[c]));
        }
        total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Unique,
    Polytope,
    Infeasible,
}

/// The emitted linear constraints, kept for audit.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    /// One variable per atom D-class; entry `c` lists the atoms of class `c`.
    pub variables: Vec<Vec<SubsetIdempotent>>,
    /// Each equation is (coefficients, right-hand side).
    pub equations: Vec<(Vec<BigRational>, BigRational)>,
}

#[derive(Debug, Clone)]
pub struct MeanSolution {
    pub status: SolveStatus,
    pub witness: Option<MeanVector>,
    pub vertices: Vec<MeanVector>,
    /// Affine-hull dimension of the solution set.
    pub dim: usize,
    /// True when more vertices exist than the cap allowed to report.
    pub truncated: bool,
    pub constraint_system: ConstraintSystem,
}

/// Solve for all invariant means of `monoid`, exactly.
pub fn solve(monoid: &FiniteBIM) -> Result<MeanSolution> {
    solve_with_cap(monoid, DEFAULT_VERTEX_CAP)
}

pub fn solve_with_cap(monoid: &FiniteBIM, vertex_cap: usize) -> Result<MeanSolution> {
    let classes = monoid.atom_classes();
    let sizes = classes.class_sizes();
    let coeffs: Vec<BigRational> = sizes
        .iter()
        .map(|&n| BigRational::from_integer(BigInt::from(n)))
        .collect();
    let matrix = vec![coeffs.clone()];
    let rhs = vec![BigRational::one()];

    let (vertex_vecs, truncated) = linsolve::enumerate_vertices(&matrix, &rhs, vertex_cap);
    let rank = linsolve::rank(&matrix);
    let dim = classes.class_count - rank;

    let vertices: Vec<MeanVector> = vertex_vecs
        .into_iter()
        .map(|v| MeanVector::new(classes.clone(), v))
        .collect::<Result<_>>()?;

    let variables: Vec<Vec<SubsetIdempotent>> = (0..classes.class_count)
        .map(|c| classes.atoms_of_class(c))
        .collect();
    let constraint_system = ConstraintSystem {
        variables,
        equations: vec![(coeffs, BigRational::one())],
    };

    let (status, witness) = if vertices.is_empty() {
        (SolveStatus::Infeasible, None)
    } else if dim == 0 {
        (SolveStatus::Unique, Some(vertices[0].clone()))
    } else {
        // barycenter of the reported vertices: feasible, and faithful
        // whenever a faithful mean exists
        let k = BigRational::from_integer(BigInt::from(vertices.len()));
        let mut acc = vec![BigRational::zero(); classes.class_count];
        for v in &vertices {
            for (a, b) in acc.iter_mut().zip(v.class_values()) {
                *a += b;
            }
        }
        for a in acc.iter_mut() {
            *a /= &k;
        }
        (
            SolveStatus::Polytope,
            Some(MeanVector::new(classes.clone(), acc)?),
        )
    };

    Ok(MeanSolution {
        status,
        witness,
        vertices,
        dim,
        truncated,
        constraint_system,
    })
}

/// A failed identity together with printable witnesses.
#[derive(Debug, Clone)]
pub struct AxiomViolation {
    pub law: &'static str,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub checked_elements: usize,
    pub checked_idempotent_pairs: usize,
    pub violation: Option<AxiomViolation>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

macro_rules! violated {
    ($law:expr, $($w:expr),*) => {
        return Ok(AxiomReport {
            checked_elements: 0,
            checked_idempotent_pairs: 0,
            violation: Some(AxiomViolation {
                law: $law,
                witnesses: vec![$(format!("{:?}", $w)),*],
            }),
        })
    };
}

/// Verify the defining identities of an invariant mean over all elements
/// and all idempotent pairs: zero, normalization, invariance, additivity,
/// inclusion-exclusion, monotonicity, the complement law, and closure of
/// the null ideal under restriction, joins, and conjugation.
pub fn check_axioms(monoid: &FiniteBIM, mean: &MeanVector) -> Result<AxiomReport> {
    let zero_subset = SubsetIdempotent::empty(monoid.ground());
    if !mean.evaluate(&zero_subset)?.is_zero() {
        violated!("mu(0) = 0", zero_subset);
    }
    let one = BigRational::one();
    let top = monoid.top();
    if mean.is_flagged_normalized() && mean.evaluate(&top)? != one {
        violated!("mu(1) = 1", mean.evaluate(&top)?);
    }

    let elements = monoid.enumerate_elements(ENUMERATION_CAP)?;
    for s in &elements {
        if mean.evaluate(&s.domain())? != mean.evaluate(&s.range())? {
            violated!("mu(s^-1 s) = mu(s s^-1)", s);
        }
    }

    let idempotents = monoid.idempotents()?;
    let mut pair_count = 0usize;
    for e in &idempotents {
        for f in &idempotents {
            pair_count += 1;
            let me = mean.evaluate(e)?;
            let mf = mean.evaluate(f)?;
            let meet = e.meet(f)?;
            let join = e.join(f)?;
            let mjoin = mean.evaluate(&join)?;
            if e.disjoint(f)? && mjoin != &me + &mf {
                violated!("mu(e v f) = mu(e) + mu(f) for e _|_ f", e, f);
            }
            if mjoin != &me + &mf - mean.evaluate(&meet)? {
                violated!("mu(e v f) = mu(e) + mu(f) - mu(ef)", e, f);
            }
            if e.leq(f)? && me > mf {
                violated!("e <= f implies mu(e) <= mu(f)", e, f);
            }
        }
        if mean.is_flagged_normalized()
            && mean.evaluate(&e.complement())? != &one - mean.evaluate(e)?
        {
            violated!("mu(~e) = 1 - mu(e)", e);
        }
    }

    // the null set {e : mu(e) = 0} is an ideal closed under conjugation
    let null: Vec<&SubsetIdempotent> = {
        let mut v = Vec::new();
        for e in &idempotents {
            if mean.evaluate(e)?.is_zero() {
                v.push(e);
            }
        }
        v
    };
    for e in &null {
        for f in &idempotents {
            if !mean.evaluate(&e.meet(f)?)?.is_zero() {
                violated!("null set closed under meets", e, f);
            }
        }
        for f in &null {
            if !mean.evaluate(&e.join(f)?)?.is_zero() {
                violated!("null set closed under joins", e, f);
            }
        }
        for s in &elements {
            let conj = s.conjugate_subset(e)?;
            if !mean.evaluate(&conj)?.is_zero() {
                violated!("null set closed under s e s^-1", s, e);
            }
        }
    }

    Ok(AxiomReport {
        checked_elements: elements.len(),
        checked_idempotent_pairs: pair_count,
        violation: None,
    })
}

/// A mean is faithful when only the zero idempotent has measure zero,
/// i.e. every atom class carries positive mass.
pub fn is_faithful(mean: &MeanVector) -> bool {
    mean.class_values().iter().all(|v| v.is_positive())
}

/// Renormalize a mean onto the local monoid `eSe`.
#[derive(Debug)]
pub struct RestrictedMean {
    pub monoid: FiniteBIM,
    pub mean: MeanVector,
    /// Local point `i` corresponds to parent point `point_map[i]`.
    pub point_map: Vec<usize>,
}

pub fn restrict(
    monoid: &FiniteBIM,
    mean: &MeanVector,
    e: &SubsetIdempotent,
) -> Result<RestrictedMean> {
    let mass = mean.evaluate(e)?;
    if mass.is_zero() {
        return Err(Error::ZeroMass);
    }
    let (local, point_map) = monoid.local_monoid_with_map(e)?;
    let local_classes = local.atom_classes();
    let mut values = vec![BigRational::zero(); local_classes.class_count];
    for (i, atom) in local_classes.atoms.iter().enumerate() {
        let parent_atom = SubsetIdempotent::from_members(
            monoid.ground(),
            atom.members().map(|p| point_map[p]),
        )?;
        values[local_classes.class_of[i]] = mean.evaluate(&parent_atom)? / &mass;
    }
    let mean = MeanVector::new(local_classes, values)?;
    Ok(RestrictedMean {
        monoid: local,
        mean,
        point_map,
    })
}

#[derive(Debug, Clone)]
pub struct UnitInvarianceReport {
    pub invariant: bool,
    pub failure: Option<String>,
    /// The extension to an invariant mean, present when the checks pass;
    /// cross-checked against the invariance identity on every element.
    pub mean: Option<MeanVector>,
}

/// For a piecewise factorizable monoid, a normalized assignment on the
/// algebra atoms that is invariant under conjugation by units extends to an
/// invariant mean; this checks those conditions and returns the extension.
pub fn check_unit_invariance(
    monoid: &FiniteBIM,
    sigma_atoms: &[BigRational],
) -> Result<UnitInvarianceReport> {
    let elements = monoid.enumerate_elements(ENUMERATION_CAP)?;
    let units: Vec<_> = monoid.units(ENUMERATION_CAP)?;
    let classes = monoid.atom_classes();
    let atoms = &classes.atoms;

    // piecewise factorizability: every element is covered, atom by atom of
    // its domain, by restrictions of units it agrees with
    for s in &elements {
        for (ai, atom) in atoms.iter().enumerate() {
            let _ = ai;
            if !atom.leq(&s.domain())? {
                continue;
            }
            let covered = units.iter().any(|g| {
                atom.members().all(|x| g.apply(x) == s.apply(x))
            });
            if !covered {
                return Err(Error::NotPiecewiseFactorizable);
            }
        }
    }

    if sigma_atoms.len() != atoms.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} atom values, got {}",
            atoms.len(),
            sigma_atoms.len()
        )));
    }
    if sigma_atoms.iter().any(|v| v.is_negative()) {
        return Err(Error::InvalidInput("sigma values must be non-negative".into()));
    }

    let total: BigRational = sigma_atoms.iter().cloned().sum();
    if !total.is_one() {
        return Ok(UnitInvarianceReport {
            invariant: false,
            failure: Some(format!("sigma(1) = {total}, expected 1")),
            mean: None,
        });
    }

    let atom_index = |mask: u64| atoms.iter().position(|a| a.mask() == mask);
    for g in &units {
        for (i, atom) in atoms.iter().enumerate() {
            let image = g.conjugate_subset(atom)?;
            let j = atom_index(image.mask()).ok_or_else(|| {
                Error::InternalInvariantViolation(
                    "unit conjugation left the atom set".into(),
                )
            })?;
            if sigma_atoms[i] != sigma_atoms[j] {
                return Ok(UnitInvarianceReport {
                    invariant: false,
                    failure: Some(format!(
                        "sigma(g e g^-1) != sigma(e) for g = {g:?}, atom {atom:?}"
                    )),
                    mean: None,
                });
            }
        }
    }

    // invariance under units plus piecewise factorization force constancy
    // on atom D-classes, so the extension is expressible per class
    let mut values = vec![None; classes.class_count];
    for (i, _) in atoms.iter().enumerate() {
        let c = classes.class_of[i];
        match &values[c] {
            None => values[c] = Some(sigma_atoms[i].clone()),
            Some(v) => {
                if *v != sigma_atoms[i] {
                    return Ok(UnitInvarianceReport {
                        invariant: false,
                        failure: Some(
                            "sigma is not constant on an atom D-class".into(),
                        ),
                        mean: None,
                    });
                }
            }
        }
    }
    let mean = MeanVector::new(
        classes,
        values.into_iter().map(|v| v.expect("every class has atoms")).collect(),
    )?;

    // cross-check the full invariance identity on every element
    for s in &elements {
        if mean.evaluate(&s.domain())? != mean.evaluate(&s.range())? {
            return Ok(UnitInvarianceReport {
                invariant: false,
                failure: Some(format!("extension fails invariance at {s:?}")),
                mean: None,
            });
        }
    }

    Ok(UnitInvarianceReport {
        invariant: true,
        failure: None,
        mean: Some(mean),
    })
}

/// A pencil of length `n` from the identity to `e` forces `μ(e) ≥ 1/n`.
pub fn large_idempotent_bound(
    monoid: &FiniteBIM,
    mean: &MeanVector,
    e: &SubsetIdempotent,
    pencil: &Pencil,
) -> Result<bool> {
    if pencil.target != monoid.top() {
        return Err(Error::BadPencil("pencil must start at the identity".into()));
    }
    if pencil.bound != *e {
        return Err(Error::BadPencil("pencil bound differs from e".into()));
    }
    pencil.validate(monoid).map_err(|_| Error::BadPencil("pencil invalid".into()))?;
    if pencil.is_empty() {
        return Err(Error::BadPencil("empty pencil".into()));
    }
    let bound = BigRational::new(BigInt::one(), BigInt::from(pencil.len()));
    Ok(mean.evaluate(e)? >= bound)
}

/// Exact rational Gaussian elimination and vertex enumeration for systems
/// `A x = b, x ≥ 0`.
pub(crate) mod linsolve {
    use num_rational::BigRational;
    use num_traits::{Signed, Zero};

    #[allow(clippy::needless_range_loop)] // two rows of `m` in flight
    pub fn rank(matrix: &[Vec<BigRational>]) -> usize {
        let mut m: Vec<Vec<BigRational>> = matrix.to_vec();
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        let mut r = 0usize;
        for c in 0..cols {
            if r == rows {
                break;
            }
            if let Some(pivot) = (r..rows).find(|&i| !m[i][c].is_zero()) {
                m.swap(r, pivot);
                let p = m[r][c].clone();
                for i in 0..rows {
                    if i != r && !m[i][c].is_zero() {
                        let factor = &m[i][c] / &p;
                        for j in c..cols {
                            let sub = &factor * &m[r][j];
                            m[i][j] -= sub;
                        }
                    }
                }
                r += 1;
            }
        }
        r
    }

    /// Solve the column-restricted square system exactly; `None` when the
    /// chosen columns are dependent or the system is inconsistent.
    #[allow(clippy::needless_range_loop)] // two rows of `aug` in flight
    fn solve_basis(
        matrix: &[Vec<BigRational>],
        rhs: &[BigRational],
        basis: &[usize],
    ) -> Option<Vec<BigRational>> {
        let rows = matrix.len();
        let k = basis.len();
        let mut aug: Vec<Vec<BigRational>> = (0..rows)
            .map(|i| {
                let mut row: Vec<BigRational> =
                    basis.iter().map(|&c| matrix[i][c].clone()).collect();
                row.push(rhs[i].clone());
                row
            })
            .collect();
        let mut pivot_row = 0usize;
        let mut pivots = Vec::new();
        for c in 0..k {
            if pivot_row == rows {
                break;
            }
            let p = (pivot_row..rows).find(|&i| !aug[i][c].is_zero())?;
            {
                aug.swap(pivot_row, p);
                let pv = aug[pivot_row][c].clone();
                for cell in aug[pivot_row][c..=k].iter_mut() {
                    *cell /= &pv;
                }
                for i in 0..rows {
                    if i != pivot_row && !aug[i][c].is_zero() {
                        let factor = aug[i][c].clone();
                        for j in c..=k {
                            let sub = &factor * &aug[pivot_row][j];
                            aug[i][j] -= sub;
                        }
                    }
                }
                pivots.push(c);
                pivot_row += 1;
            }
        }
        if pivots.len() < k {
            return None;
        }
        // consistency: remaining rows must be all-zero
        for row in aug.iter().skip(pivot_row) {
            if !row[k].is_zero() {
                return None;
            }
        }
        let mut x = vec![BigRational::zero(); k];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[r][k].clone();
        }
        Some(x)
    }

    /// Vertices (basic feasible solutions) of `A x = b, x ≥ 0`, up to
    /// `cap` many; the flag reports truncation.
    pub fn enumerate_vertices(
        matrix: &[Vec<BigRational>],
        rhs: &[BigRational],
        cap: usize,
    ) -> (Vec<Vec<BigRational>>, bool) {
        let cols = if matrix.is_empty() { 0 } else { matrix[0].len() };
        let r = rank(matrix);
        let mut vertices: Vec<Vec<BigRational>> = Vec::new();
        let mut truncated = false;

        let mut basis: Vec<usize> = Vec::new();
        #[allow(clippy::too_many_arguments)]
        fn recurse(
            matrix: &[Vec<BigRational>],
            rhs: &[BigRational],
            cols: usize,
            r: usize,
            start: usize,
            basis: &mut Vec<usize>,
            vertices: &mut Vec<Vec<BigRational>>,
            truncated: &mut bool,
            cap: usize,
        ) {
            if basis.len() == r {
                if let Some(xb) = solve_basis(matrix, rhs, basis) {
                    if xb.iter().all(|v| !v.is_negative()) {
                        let mut full = vec![BigRational::zero(); cols];
                        for (i, &c) in basis.iter().enumerate() {
                            full[c] = xb[i].clone();
                        }
                        if !vertices.contains(&full) {
                            if vertices.len() == cap {
                                *truncated = true;
                            } else {
                                vertices.push(full);
                            }
                        }
                    }
                }
                return;
            }
            for c in start..cols {
                basis.push(c);
                recurse(matrix, rhs, cols, r, c + 1, basis, vertices, truncated, cap);
                basis.pop();
                if *truncated {
                    return;
                }
            }
        }
        recurse(
            matrix, rhs, cols, r, 0, &mut basis, &mut vertices, &mut truncated, cap,
        );
        (vertices, truncated)
    }
}
