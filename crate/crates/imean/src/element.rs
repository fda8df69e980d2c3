//! The common interface of Boolean inverse monoid elements.
//!
//! Rook matrices and the Tarski search are generic over this trait so the
//! same machinery serves both concrete partial bijections on a finite
//! ground set and the symbolic residue-class maps on the naturals.

use std::fmt::Debug;
use std::hash::Hash;

use crate::error::Result;
use crate::pbij::PartialBijection;

pub trait InverseElement: Clone + Eq + Ord + Hash + Debug {
    /// Semigroup product `self ∘ other` (apply `other` first).
    fn compose(&self, other: &Self) -> Result<Self>;

    fn inverse(&self) -> Self;

    /// `d(x) = x⁻¹x`.
    fn domain_idempotent(&self) -> Self;

    /// `r(x) = xx⁻¹`.
    fn range_idempotent(&self) -> Self;

    fn is_zero(&self) -> bool;

    /// Whether this is the identity of the ambient monoid.
    fn is_identity(&self) -> bool;

    fn is_idempotent(&self) -> bool;

    fn natural_leq(&self, other: &Self) -> Result<bool>;

    fn compatible(&self, other: &Self) -> Result<bool>;

    fn orthogonal(&self, other: &Self) -> Result<bool>;

    /// Join of a compatible pair.
    fn join(&self, other: &Self) -> Result<Self>;
}

impl InverseElement for PartialBijection {
    fn compose(&self, other: &Self) -> Result<Self> {
        PartialBijection::compose(self, other)
    }

    fn inverse(&self) -> Self {
        PartialBijection::inverse(self)
    }

    fn domain_idempotent(&self) -> Self {
        self.domain().to_partial_identity()
    }

    fn range_idempotent(&self) -> Self {
        self.range().to_partial_identity()
    }

    fn is_zero(&self) -> bool {
        PartialBijection::is_zero(self)
    }

    fn is_identity(&self) -> bool {
        PartialBijection::is_identity(self)
    }

    fn is_idempotent(&self) -> bool {
        PartialBijection::is_idempotent(self)
    }

    fn natural_leq(&self, other: &Self) -> Result<bool> {
        PartialBijection::natural_leq(self, other)
    }

    fn compatible(&self, other: &Self) -> Result<bool> {
        PartialBijection::compatible(self, other)
    }

    fn orthogonal(&self, other: &Self) -> Result<bool> {
        PartialBijection::orthogonal(self, other)
    }

    fn join(&self, other: &Self) -> Result<Self> {
        PartialBijection::join(self, other)
    }
}
