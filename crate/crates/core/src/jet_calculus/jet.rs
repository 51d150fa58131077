use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

use crate::scalar::Scalar;

/// Largest manifold dimension a packed variable can address.
pub const MAX_DIM: usize = 8;
/// Largest derivative order per coordinate direction.
pub const MAX_ORDER: usize = 15;

/// Exponent vector of a partial derivative `∂^α`.
pub type Multi = [u8; MAX_DIM];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JetKind {
    /// `Γ^ω_{μν;α}`.
    Christoffel,
    /// `X_k^ω_{;α}` for the vector field in slot `k`.
    Field,
    /// `Φ^ω_{i₁…i_r;α}` of a generic tensor field.
    Tensor,
}

/// A formal jet variable packed into one word:
/// kind (2 bits) | slot or tensor id (8) | ω (4) | up to four lower indices
/// (4 each, stored `+1`, zero means absent) | `α` (4 bits per direction).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar(u64);

impl JetVar {
    fn pack(kind: u64, id: usize, omega: usize, lower: &[usize], alpha: &Multi) -> Self {
        debug_assert!(id < 256 && omega < 16 && lower.len() <= 4);
        let mut w = kind << 62 | (id as u64) << 54 | (omega as u64) << 50;
        for (k, &l) in lower.iter().enumerate() {
            debug_assert!(l < 15);
            w |= ((l + 1) as u64) << (46 - 4 * k);
        }
        for (k, &a) in alpha.iter().enumerate() {
            w |= (a as u64) << (28 - 4 * k);
        }
        Self(w)
    }

    /// Zero-based indices throughout.
    pub fn christoffel(omega: usize, mu: usize, nu: usize, alpha: &Multi) -> Self {
        Self::pack(0, 0, omega, &[mu, nu], alpha)
    }

    pub fn field(slot: usize, omega: usize, alpha: &Multi) -> Self {
        Self::pack(1, slot, omega, &[], alpha)
    }

    pub fn tensor(id: usize, omega: usize, lower: &[usize], alpha: &Multi) -> Self {
        Self::pack(2, id, omega, lower, alpha)
    }

    pub fn kind(&self) -> JetKind {
        match self.0 >> 62 {
            0 => JetKind::Christoffel,
            1 => JetKind::Field,
            _ => JetKind::Tensor,
        }
    }

    /// Slot of a field variable, id of a tensor variable.
    pub fn id(&self) -> usize {
        (self.0 >> 54 & 0xff) as usize
    }

    pub fn omega(&self) -> usize {
        (self.0 >> 50 & 0xf) as usize
    }

    pub fn lower(&self) -> SmallVec<[usize; 4]> {
        (0..4)
            .map(|k| (self.0 >> (46 - 4 * k) & 0xf) as usize)
            .take_while(|&v| v > 0)
            .map(|v| v - 1)
            .collect()
    }

    pub fn alpha(&self) -> Multi {
        let mut a = [0u8; MAX_DIM];
        for (k, slot) in a.iter_mut().enumerate() {
            *slot = (self.0 >> (28 - 4 * k) & 0xf) as u8;
        }
        a
    }

    /// Total derivative order `|α|`.
    pub fn order(&self) -> usize {
        self.alpha().iter().map(|&a| a as usize).sum()
    }

    pub fn raw(&self) -> u64 {
        self.0
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lower: String = self.lower().iter().map(|i| (i + 1).to_string()).collect();
        let derivs: String = self
            .alpha()
            .iter()
            .enumerate()
            .flat_map(|(k, &a)| std::iter::repeat_n((k + 1).to_string(), a as usize))
            .collect();
        let head = match self.kind() {
            JetKind::Christoffel => "G".to_string(),
            JetKind::Field => format!("X{}", self.id()),
            JetKind::Tensor => format!("P{}", self.id()),
        };
        write!(f, "{head}^{}", self.omega() + 1)?;
        if !lower.is_empty() || !derivs.is_empty() {
            write!(f, "_{{{lower}")?;
            if !derivs.is_empty() {
                write!(f, ";{derivs}")?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A monomial: jet variables with multiplicity, kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[JetVar; 6]>);

impl Monomial {
    pub fn one() -> Self {
        Self(SmallVec::new())
    }

    pub fn var(v: JetVar) -> Self {
        let mut s = SmallVec::new();
        s.push(v);
        Self(s)
    }

    pub fn vars(&self) -> &[JetVar] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self(out)
    }
}

/// Graded lexicographic: total degree first, then variable codes.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Coefficient ring of a jet evaluation: exact polynomials for symbolic
/// runs, plain scalars for random-point runs.
pub trait JetRing<F: Scalar>: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn constant(c: F) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &F) -> Self;

    fn add_assign(&mut self, other: &Self) {
        if !other.is_zero() {
            *self = self.add(other);
        }
    }

    /// `self += a * b`.
    fn add_product(&mut self, a: &Self, b: &Self) {
        if !a.is_zero() && !b.is_zero() {
            *self = self.add(&a.mul(b));
        }
    }
}

impl<F: Scalar> JetRing<F> for F {
    fn zero() -> Self {
        F::zero()
    }
    fn constant(c: F) -> Self {
        c
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
    fn sub(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }
    fn mul(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn scale(&self, c: &F) -> Self {
        self.clone() * c.clone()
    }
    fn add_assign(&mut self, other: &Self) {
        self.add_assign_ref(other);
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        self.add_assign_ref(&(a.clone() * b.clone()));
    }
}

/// Sparse exact polynomial in jet variables. Terms are sorted by
/// [`Monomial`] order and carry no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JetPolynomial<F: Scalar> {
    terms: Vec<(Monomial, F)>,
}

impl<F: Scalar> JetPolynomial<F> {
    pub fn var(v: JetVar) -> Self {
        Self { terms: vec![(Monomial::var(v), F::one())] }
    }

    pub fn terms(&self) -> &[(Monomial, F)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, F)>) -> Self {
        let mut acc: HashMap<Monomial, F> = HashMap::new();
        for (m, c) in terms {
            acc.entry(m).or_insert_with(F::zero).add_assign_ref(&c);
        }
        Self::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, F>) -> Self {
        let mut terms: Vec<(Monomial, F)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Self { terms }
    }

    /// First term in graded lexicographic order.
    pub fn leading_term(&self) -> Option<&(Monomial, F)> {
        self.terms.first()
    }

    /// Largest `|α|` among variables of the given kind, if any occur.
    pub fn max_order(&self, kind: JetKind) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|(m, _)| m.vars().iter())
            .filter(|v| v.kind() == kind)
            .map(|v| v.order())
            .max()
    }

    /// Substitutes scalar values for every variable.
    pub fn evaluate(&self, value: &mut impl FnMut(JetVar) -> F) -> F {
        let mut total = F::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in m.vars() {
                t = t * value(*v);
            }
            total.add_assign_ref(&t);
        }
        total
    }

    /// Renames every variable through `f`.
    pub fn map_vars(&self, f: impl Fn(JetVar) -> JetVar) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| {
            let mono = m.vars().iter().fold(Monomial::one(), |acc, v| acc.mul(&Monomial::var(f(*v))));
            (mono, c.clone())
        }))
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Self { terms: self.terms.iter().filter(|(m, _)| keep(m)).cloned().collect() }
    }
}

impl<F: Scalar> JetRing<F> for JetPolynomial<F> {
    fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    fn constant(c: F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: vec![(Monomial::one(), c)] }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        if other.terms.is_empty() {
            return self.clone();
        }
        if self.terms.is_empty() {
            return other.clone();
        }
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a[i].1.clone() + b[j].1.clone();
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self { terms: out }
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-F::one()))
    }

    fn mul(&self, other: &Self) -> Self {
        if self.terms.is_empty() || other.terms.is_empty() {
            return Self::zero();
        }
        let mut acc: HashMap<Monomial, F> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                acc.entry(ma.mul(mb)).or_insert_with(F::zero).add_assign_ref(&(ca.clone() * cb.clone()));
            }
        }
        Self::from_map(acc)
    }

    fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, x)| (m.clone(), x.clone() * c.clone())).collect() }
    }
}

impl<F: Scalar> fmt::Display for JetPolynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{m}", c.to_pq())?;
        }
        Ok(())
    }
}

impl<F: Scalar> fmt::Debug for JetPolynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Multi-index with `a_k` at direction `k`.
pub fn multi(entries: &[(usize, u8)]) -> Multi {
    let mut a = [0u8; MAX_DIM];
    for &(k, v) in entries {
        a[k] += v;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::Q;

    #[test]
    fn packing_round_trips() {
        let a = multi(&[(0, 2), (2, 1)]);
        let g = JetVar::christoffel(1, 0, 2, &a);
        assert_eq!(g.kind(), JetKind::Christoffel);
        assert_eq!(g.omega(), 1);
        assert_eq!(g.lower().as_slice(), &[0, 2]);
        assert_eq!(g.alpha(), a);
        assert_eq!(g.order(), 3);
        assert_eq!(g.to_string(), "G^2_{13;113}");
        let x = JetVar::field(3, 0, &[0; MAX_DIM]);
        assert_eq!(x.to_string(), "X3^1");
        assert_eq!(x.id(), 3);
        let p = JetVar::tensor(0, 2, &[1, 1, 0], &multi(&[(1, 1)]));
        assert_eq!(p.lower().as_slice(), &[1, 1, 0]);
        assert_eq!(p.to_string(), "P0^3_{221;2}");
    }

    #[test]
    fn ring_laws_on_small_polys() {
        let z = [0u8; MAX_DIM];
        let x = JetPolynomial::<Q>::var(JetVar::field(1, 0, &z));
        let y = JetPolynomial::<Q>::var(JetVar::field(2, 0, &z));
        let two = JetPolynomial::constant(Q::int(2));
        let s = x.add(&y);
        let lhs = s.mul(&s);
        let rhs = x.mul(&x).add(&x.mul(&y).mul(&two)).add(&y.mul(&y));
        assert_eq!(lhs, rhs);
        assert!(s.sub(&s).is_zero());
        assert_eq!(x.mul(&y), y.mul(&x));
    }

    #[test]
    fn terms_are_graded() {
        let z = [0u8; MAX_DIM];
        let x = JetPolynomial::<Q>::var(JetVar::field(1, 0, &z));
        let p = x.mul(&x).add(&JetPolynomial::constant(Q::int(3))).add(&x);
        let degs: Vec<usize> = p.terms().iter().map(|(m, _)| m.degree()).collect();
        assert_eq!(degs, vec![0, 1, 2]);
        assert_eq!(p.to_string(), "3/1*1 + 1/1*X1^1 + 1/1*X1^1*X1^1");
    }
}
