use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::perm_algebra::Permutation;
use crate::scalar::Scalar;

/// An element of the group ring `F[Σ_n]`. Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupAlgebraElement<F: Scalar> {
    n: usize,
    terms: BTreeMap<Permutation, F>,
}

impl<F: Scalar> GroupAlgebraElement<F> {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::basis(Permutation::identity(n))
    }

    pub fn basis(p: Permutation) -> Self {
        let n = p.degree();
        let mut terms = BTreeMap::new();
        terms.insert(p, F::one());
        Self { n, terms }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Permutation, F)>) -> Result<Self> {
        let mut out = Self::zero(n);
        for (p, c) in terms {
            if p.degree() != n {
                return Err(Error::DegreeMismatch { expected: n, got: p.degree() });
            }
            out.add_term(p, c);
        }
        Ok(out)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Permutation, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &Permutation) -> F {
        self.terms.get(p).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, p: Permutation, c: F) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(p);
        match e {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-F::one()))
    }

    pub fn scale(&self, s: &F) -> Self {
        if s.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(p, c)| (p.clone(), c.clone() * s.clone())).collect(),
        }
    }

    /// Group-ring product, bilinear extension of [`Permutation::then`].
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.n);
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                out.add_term(p.then(q), a.clone() * b.clone());
            }
        }
        Ok(out)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DegreeMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    /// `Σ_{p ∈ perms} p`.
    pub fn sum_of(n: usize, perms: impl IntoIterator<Item = Permutation>) -> Self {
        let mut out = Self::zero(n);
        for p in perms {
            out.add_term(p, F::one());
        }
        out
    }

    /// `Σ_{p ∈ perms} sign(p) p`.
    pub fn signed_sum_of(n: usize, perms: impl IntoIterator<Item = Permutation>) -> Self {
        let mut out = Self::zero(n);
        for p in perms {
            let s = F::int(p.sign());
            out.add_term(p, s);
        }
        out
    }
}

impl<F: Scalar> fmt::Debug for GroupAlgebraElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (p, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}){p}")?;
        }
        Ok(())
    }
}
