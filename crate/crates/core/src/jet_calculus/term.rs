use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::perm_algebra::{GroupAlgebraElement, Permutation};
use crate::scalar::Scalar;

/// Bound slot names introduced by composition start here, above every
/// argument slot an operator of desk-scale degree uses.
pub const FRESH_BASE: usize = 100;

/// Which connection a node refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Conn {
    /// The connection `Γ` itself.
    Full,
    /// Its symmetrization `Γ̃ = ½(Γ_{μν} + Γ_{νμ})`.
    Sym,
}

/// Operator expression over vector-field slots `X_k`.
///
/// Slots are global names. Operators of degree `n` use `X_1..X_n`;
/// [`Permute`](TensorTerm::Permute) relabels those, while names at or above
/// [`FRESH_BASE`] are only ever bound by `Compose`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TensorTerm<F: Scalar> {
    Slot(usize),
    Bracket(Box<Self>, Box<Self>),
    /// `∇_dir arg` for a vector field (or directional derivative of a scalar).
    CovDerivVF { conn: Conn, dir: Box<Self>, arg: Box<Self> },
    /// `(∇_dir Φ)(…)` where `body` is `Φ` evaluated on its arguments.
    CovDerivTensor { conn: Conn, dir: Box<Self>, body: Box<Self> },
    /// `R(a,b)(c)`.
    Curvature { conn: Conn, a: Box<Self>, b: Box<Self>, c: Box<Self> },
    Torsion(Box<Self>, Box<Self>),
    /// A generic `(1,r)`-tensor field `Φ_id`.
    Generic { id: usize, args: Vec<Self> },
    LinearCombo(Vec<(F, Self)>),
    /// `scalar · value`.
    ScalarMul(Box<Self>, Box<Self>),
    /// Trace over the slot `slot`, which must be of order 0 in `body`.
    Trace { slot: usize, body: Box<Self> },
    /// `outer` with the value of `inner` substituted for `X_slot`.
    Compose { slot: usize, outer: Box<Self>, inner: Box<Self> },
    /// `D·p (X_1..X_n) = D(X_{p(1)}..X_{p(n)})`.
    Permute { perm: Permutation, body: Box<Self> },
    /// Symmetrized iterated covariant derivative of a vector field.
    SymNabla { conn: Conn, dirs: Vec<Self>, field: Box<Self> },
}

/// Vector-valued or function-valued.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Vector,
    Scalar,
}

#[derive(Debug, Clone)]
struct Leaf {
    slot: usize,
    tensorial: bool,
}

impl<F: Scalar> TensorTerm<F> {
    pub fn children(&self) -> Vec<&Self> {
        use TensorTerm::*;
        match self {
            Slot(_) => vec![],
            Bracket(a, b) | Torsion(a, b) | ScalarMul(a, b) => vec![a, b],
            CovDerivVF { dir, arg, .. } => vec![dir, arg],
            CovDerivTensor { dir, body, .. } => vec![dir, body],
            Curvature { a, b, c, .. } => vec![a, b, c],
            Generic { args, .. } => args.iter().collect(),
            LinearCombo(v) => v.iter().map(|(_, t)| t).collect(),
            Trace { body, .. } | Permute { body, .. } => vec![body],
            Compose { outer, inner, .. } => vec![outer, inner],
            SymNabla { dirs, field, .. } => dirs.iter().chain(std::iter::once(&**field)).collect(),
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Self> {
        use TensorTerm::*;
        match self {
            Slot(_) => vec![],
            Bracket(a, b) | Torsion(a, b) | ScalarMul(a, b) => vec![a, b],
            CovDerivVF { dir, arg, .. } => vec![dir, arg],
            CovDerivTensor { dir, body, .. } => vec![dir, body],
            Curvature { a, b, c, .. } => vec![a, b, c],
            Generic { args, .. } => args.iter_mut().collect(),
            LinearCombo(v) => v.iter_mut().map(|(_, t)| t).collect(),
            Trace { body, .. } | Permute { body, .. } => vec![body],
            Compose { outer, inner, .. } => vec![outer, inner],
            SymNabla { dirs, field, .. } => dirs.iter_mut().chain(std::iter::once(&mut **field)).collect(),
        }
    }

    /// Output kind, assuming the term is well formed.
    pub fn kind(&self) -> Kind {
        use TensorTerm::*;
        match self {
            Trace { .. } => Kind::Scalar,
            CovDerivVF { arg, .. } => arg.kind(),
            CovDerivTensor { body, .. } | Permute { body, .. } => body.kind(),
            ScalarMul(_, v) => v.kind(),
            LinearCombo(v) => v.first().map_or(Kind::Vector, |(_, t)| t.kind()),
            Compose { outer, .. } => outer.kind(),
            _ => Kind::Vector,
        }
    }

    /// Free slot names.
    pub fn free_slots(&self) -> BTreeSet<usize> {
        self.leaves().into_iter().map(|l| l.slot).collect()
    }

    /// Largest free slot name below [`FRESH_BASE`], or 0.
    pub fn degree(&self) -> usize {
        self.free_slots().into_iter().filter(|&s| s < FRESH_BASE).max().unwrap_or(0)
    }

    /// Renames every slot (free and bound) through `f`.
    pub fn relabel(&self, f: &impl Fn(usize) -> usize) -> Self {
        use TensorTerm::*;
        let mut out = match self {
            Slot(k) => return Slot(f(*k)),
            Trace { slot, body } => Trace { slot: f(*slot), body: body.clone() },
            Compose { slot, outer, inner } => Compose { slot: f(*slot), outer: outer.clone(), inner: inner.clone() },
            other => other.clone(),
        };
        for c in out.children_mut() {
            *c = c.relabel(f);
        }
        out
    }

    /// Pushes every [`Permute`](TensorTerm::Permute) into the leaves.
    pub fn expand_permutes(&self) -> Self {
        if let TensorTerm::Permute { perm, body } = self {
            let n = perm.degree();
            let p = perm.clone();
            return body.expand_permutes().relabel(&move |k| if (1..=n).contains(&k) { p.image(k) } else { k });
        }
        let mut out = self.clone();
        for c in out.children_mut() {
            *c = c.expand_permutes();
        }
        out
    }

    fn leaves(&self) -> Vec<Leaf> {
        let mut out = Vec::new();
        self.expand_permutes().collect_leaves(true, &mut Vec::new(), &mut out);
        out
    }

    fn collect_leaves(&self, tensorial: bool, bound: &mut Vec<usize>, out: &mut Vec<Leaf>) {
        use TensorTerm::*;
        let visit = |child: &Self, t: bool, bound: &mut Vec<usize>, out: &mut Vec<Leaf>| {
            child.collect_leaves(t, bound, out);
        };
        match self {
            Slot(k) => {
                if !bound.contains(k) {
                    out.push(Leaf { slot: *k, tensorial });
                }
            }
            Bracket(a, b) => {
                visit(a, false, bound, out);
                visit(b, false, bound, out);
            }
            CovDerivVF { dir, arg, .. } => {
                visit(dir, tensorial, bound, out);
                visit(arg, false, bound, out);
            }
            SymNabla { dirs, field, .. } => {
                for d in dirs {
                    visit(d, tensorial, bound, out);
                }
                visit(field, false, bound, out);
            }
            Trace { slot, body } => {
                bound.push(*slot);
                visit(body, tensorial, bound, out);
                bound.pop();
            }
            Compose { slot, outer, inner } => {
                let through = outer.is_tensorial_in(*slot);
                bound.push(*slot);
                visit(outer, tensorial, bound, out);
                bound.pop();
                visit(inner, tensorial && through, bound, out);
            }
            _ => {
                for c in self.children() {
                    visit(c, tensorial, bound, out);
                }
            }
        }
    }

    /// True iff `X_slot` occurs and every occurrence is of differential
    /// order 0 (so traces and compositions in that slot make sense).
    pub fn is_tensorial_in(&self, slot: usize) -> bool {
        let occ: Vec<Leaf> = self.leaves().into_iter().filter(|l| l.slot == slot).collect();
        !occ.is_empty() && occ.iter().all(|l| l.tensorial)
    }

    /// `Σ c_p (self·p)`.
    pub fn act(&self, e: &GroupAlgebraElement<F>) -> Self {
        TensorTerm::LinearCombo(
            e.terms()
                .map(|(p, c)| {
                    let t = if p.is_identity() { self.clone() } else { permute(self.clone(), p.clone()) };
                    (c.clone(), t)
                })
                .collect(),
        )
    }

    pub fn plus(self, other: Self) -> Self {
        combo(vec![(F::one(), self), (F::one(), other)])
    }

    pub fn minus(self, other: Self) -> Self {
        combo(vec![(F::one(), self), (-F::one(), other)])
    }

    pub fn scaled(self, c: F) -> Self {
        combo(vec![(c, self)])
    }

    /// A slot name unused anywhere in the term, at least [`FRESH_BASE`].
    pub fn fresh_slot(&self) -> usize {
        fn max_name<F: Scalar>(t: &TensorTerm<F>) -> usize {
            let own = match t {
                TensorTerm::Slot(k) | TensorTerm::Trace { slot: k, .. } | TensorTerm::Compose { slot: k, .. } => *k,
                _ => 0,
            };
            t.children().into_iter().map(max_name).max().unwrap_or(0).max(own)
        }
        (max_name(self) + 1).max(FRESH_BASE)
    }
}

pub fn x<F: Scalar>(k: usize) -> TensorTerm<F> {
    TensorTerm::Slot(k)
}

pub fn torsion<F: Scalar>(a: TensorTerm<F>, b: TensorTerm<F>) -> TensorTerm<F> {
    TensorTerm::Torsion(Box::new(a), Box::new(b))
}

pub fn curvature<F: Scalar>(a: TensorTerm<F>, b: TensorTerm<F>, c: TensorTerm<F>) -> TensorTerm<F> {
    curvature_with(Conn::Full, a, b, c)
}

pub fn curvature_with<F: Scalar>(conn: Conn, a: TensorTerm<F>, b: TensorTerm<F>, c: TensorTerm<F>) -> TensorTerm<F> {
    TensorTerm::Curvature { conn, a: Box::new(a), b: Box::new(b), c: Box::new(c) }
}

pub fn vnabla<F: Scalar>(dir: TensorTerm<F>, arg: TensorTerm<F>) -> TensorTerm<F> {
    vnabla_with(Conn::Full, dir, arg)
}

pub fn vnabla_with<F: Scalar>(conn: Conn, dir: TensorTerm<F>, arg: TensorTerm<F>) -> TensorTerm<F> {
    TensorTerm::CovDerivVF { conn, dir: Box::new(dir), arg: Box::new(arg) }
}

pub fn tnabla<F: Scalar>(dir: TensorTerm<F>, body: TensorTerm<F>) -> TensorTerm<F> {
    tnabla_with(Conn::Full, dir, body)
}

pub fn tnabla_with<F: Scalar>(conn: Conn, dir: TensorTerm<F>, body: TensorTerm<F>) -> TensorTerm<F> {
    TensorTerm::CovDerivTensor { conn, dir: Box::new(dir), body: Box::new(body) }
}

pub fn bracket<F: Scalar>(a: TensorTerm<F>, b: TensorTerm<F>) -> TensorTerm<F> {
    TensorTerm::Bracket(Box::new(a), Box::new(b))
}

pub fn generic<F: Scalar>(id: usize, args: Vec<TensorTerm<F>>) -> TensorTerm<F> {
    TensorTerm::Generic { id, args }
}

pub fn scalar_mul<F: Scalar>(s: TensorTerm<F>, v: TensorTerm<F>) -> TensorTerm<F> {
    TensorTerm::ScalarMul(Box::new(s), Box::new(v))
}

pub fn permute<F: Scalar>(body: TensorTerm<F>, perm: Permutation) -> TensorTerm<F> {
    TensorTerm::Permute { perm, body: Box::new(body) }
}

/// Rational linear combination; nested combinations are flattened.
pub fn combo<F: Scalar>(terms: Vec<(F, TensorTerm<F>)>) -> TensorTerm<F> {
    let mut flat = Vec::new();
    for (c, t) in terms {
        if c.is_zero() {
            continue;
        }
        match t {
            TensorTerm::LinearCombo(inner) => {
                flat.extend(inner.into_iter().map(|(d, u)| (c.clone() * d, u)));
            }
            t => flat.push((c, t)),
        }
    }
    TensorTerm::LinearCombo(flat)
}

pub fn sym_nabla<F: Scalar>(dirs: Vec<TensorTerm<F>>, field: TensorTerm<F>) -> TensorTerm<F> {
    TensorTerm::SymNabla { conn: Conn::Full, dirs, field: Box::new(field) }
}

/// `Tr` over `X_slot`; rejected unless the body is of order 0 there.
pub fn trace<F: Scalar>(body: TensorTerm<F>, slot: usize) -> Result<TensorTerm<F>> {
    if !body.is_tensorial_in(slot) {
        return Err(Error::OrderZeroViolation { slot });
    }
    if body.kind() != Kind::Vector {
        return Err(Error::InvalidInput("trace of a scalar-valued term".into()));
    }
    Ok(TensorTerm::Trace { slot, body: Box::new(body) })
}

/// `outer ∘_slot inner`; rejected unless `outer` is of order 0 in `X_slot`.
pub fn compose<F: Scalar>(outer: TensorTerm<F>, slot: usize, inner: TensorTerm<F>) -> Result<TensorTerm<F>> {
    if !outer.is_tensorial_in(slot) {
        return Err(Error::OrderZeroViolation { slot });
    }
    if inner.kind() != Kind::Vector {
        return Err(Error::InvalidInput("composition with a scalar-valued term".into()));
    }
    Ok(TensorTerm::Compose { slot, outer: Box::new(outer), inner: Box::new(inner) })
}

/// `make(h)` with the value of `inner` substituted for the hole `h` after
/// any differentiation in `make` has been applied.
pub fn plug<F: Scalar>(make: impl FnOnce(TensorTerm<F>) -> TensorTerm<F>, inner: TensorTerm<F>) -> TensorTerm<F> {
    let k = inner.fresh_slot();
    compose(make(TensorTerm::Slot(k)), k, inner).expect("plug hole must be of order 0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    #[test]
    fn tensorial_bookkeeping() {
        let t: TensorTerm<Q> = vnabla(x(1), x(2));
        assert!(t.is_tensorial_in(1));
        assert!(!t.is_tensorial_in(2));
        assert!(!t.is_tensorial_in(3));
        let b: TensorTerm<Q> = tnabla(x(1), torsion(x(2), x(3)));
        assert!(b.is_tensorial_in(2));
        assert!(trace(vnabla(x::<Q>(1), x(2)), 2).is_err());
        assert!(trace(vnabla(x::<Q>(1), x(2)), 1).is_ok());
    }

    #[test]
    fn permute_relabels_free_slots() {
        let t: TensorTerm<Q> = torsion(x(1), x(2));
        let p = permute(t, Permutation::transposition(2, 1, 2));
        assert_eq!(p.expand_permutes(), torsion(x(2), x(1)));
    }

    #[test]
    fn compose_inner_leaves_inherit_order() {
        let outer: TensorTerm<Q> = vnabla(x(1), x(100));
        assert!(compose(outer, 100, torsion(x(2), x(3))).is_err());
        let outer: TensorTerm<Q> = torsion(x(1), x(100));
        let c = compose(outer, 100, torsion(x(2), x(3))).unwrap();
        assert_eq!(c.free_slots().into_iter().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(c.is_tensorial_in(3));
    }
}
