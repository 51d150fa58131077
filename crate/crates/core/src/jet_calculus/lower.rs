//! Lowering of [`TensorTerm`] into a hash-consed DAG of primitive nodes.
//!
//! Compositions and traces become value substitutions, tensor derivatives
//! become `∇_a(body) − Σ_k body[X_k := ∇_a X_k]`, and every remaining node has a
//! direct coordinate formula in the evaluator.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::jet_calculus::term::{tnabla_with, vnabla_with, Conn, Kind, TensorTerm};
use crate::perm_algebra::Permutation;
use crate::scalar::Scalar;

pub type NodeId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node<F: Scalar> {
    Zero(Kind),
    Slot(usize),
    /// Constant coordinate field `∂/∂x^μ`.
    Basis(usize),
    Torsion(NodeId, NodeId),
    Curvature(Conn, NodeId, NodeId, NodeId),
    Cov(Conn, NodeId, NodeId),
    Bracket(NodeId, NodeId),
    Generic(usize, Vec<NodeId>),
    /// Sorted by node id, no zero coefficients, at least two entries or a
    /// non-unit coefficient.
    Combo(Vec<(F, NodeId)>),
    Mul(NodeId, NodeId),
    Component(usize, NodeId),
}

#[derive(Debug, Default)]
pub struct Arena<F: Scalar> {
    nodes: Vec<Node<F>>,
    kinds: Vec<Kind>,
    index: HashMap<Node<F>, NodeId>,
}

impl<F: Scalar> Arena<F> {
    pub fn new() -> Self {
        Self { nodes: Vec::new(), kinds: Vec::new(), index: HashMap::new() }
    }

    pub fn node(&self, id: NodeId) -> &Node<F> {
        &self.nodes[id as usize]
    }

    pub fn kind(&self, id: NodeId) -> Kind {
        self.kinds[id as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn intern(&mut self, n: Node<F>) -> Result<NodeId> {
        if let Some(&id) = self.index.get(&n) {
            return Ok(id);
        }
        let vector = |a: &Self, id: NodeId| -> Result<()> {
            if a.kind(id) != Kind::Vector {
                return Err(Error::InvalidInput("a vector argument is required here".into()));
            }
            Ok(())
        };
        let kind = match &n {
            Node::Zero(k) => *k,
            Node::Slot(_) | Node::Basis(_) => Kind::Vector,
            Node::Torsion(a, b) | Node::Bracket(a, b) => {
                vector(self, *a)?;
                vector(self, *b)?;
                Kind::Vector
            }
            Node::Curvature(_, a, b, c) => {
                for x in [a, b, c] {
                    vector(self, *x)?;
                }
                Kind::Vector
            }
            Node::Cov(_, a, b) => {
                vector(self, *a)?;
                self.kind(*b)
            }
            Node::Generic(_, args) => {
                for x in args {
                    vector(self, *x)?;
                }
                Kind::Vector
            }
            Node::Combo(v) => {
                let k = self.kind(v[0].1);
                if v.iter().any(|(_, x)| self.kind(*x) != k) {
                    return Err(Error::InvalidInput("linear combination mixes scalars and vectors".into()));
                }
                k
            }
            Node::Mul(s, v) => {
                if self.kind(*s) != Kind::Scalar {
                    return Err(Error::InvalidInput("left factor of a product must be a scalar".into()));
                }
                self.kind(*v)
            }
            Node::Component(_, v) => {
                vector(self, *v)?;
                Kind::Scalar
            }
        };
        let id = self.nodes.len() as NodeId;
        self.nodes.push(n.clone());
        self.kinds.push(kind);
        self.index.insert(n, id);
        Ok(id)
    }

    pub fn zero(&mut self, kind: Kind) -> NodeId {
        self.intern(Node::Zero(kind)).expect("zero is well formed")
    }

    /// Canonical linear combination; collapses to a single node when
    /// possible.
    pub fn combo(&mut self, kind: Kind, terms: Vec<(F, NodeId)>) -> Result<NodeId> {
        let mut acc: Vec<(F, NodeId)> = Vec::new();
        let mut stack: Vec<(F, NodeId)> = terms;
        while let Some((c, id)) = stack.pop() {
            match self.node(id) {
                Node::Zero(_) => {}
                Node::Combo(inner) => {
                    for (d, j) in inner.clone() {
                        stack.push((c.clone() * d, j));
                    }
                }
                _ => acc.push((c, id)),
            }
        }
        acc.sort_by_key(|t| t.1);
        let mut merged: Vec<(F, NodeId)> = Vec::new();
        for (c, id) in acc {
            match merged.last_mut() {
                Some((d, j)) if *j == id => d.add_assign_ref(&c),
                _ => merged.push((c, id)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        match merged.len() {
            0 => Ok(self.zero(kind)),
            1 if merged[0].0.is_one() => Ok(merged[0].1),
            _ => self.intern(Node::Combo(merged)),
        }
    }

    fn is_zero_node(&self, id: NodeId) -> bool {
        matches!(self.node(id), Node::Zero(_))
    }

    /// Interns a node, short-circuiting products and contractions with zero.
    fn make(&mut self, n: Node<F>) -> Result<NodeId> {
        let zero_vec = match &n {
            Node::Torsion(a, b) | Node::Bracket(a, b) => self.is_zero_node(*a) || self.is_zero_node(*b),
            Node::Curvature(_, a, b, c) => [a, b, c].iter().any(|x| self.is_zero_node(**x)),
            Node::Generic(_, args) => args.iter().any(|x| self.is_zero_node(*x)),
            _ => false,
        };
        if zero_vec {
            return Ok(self.zero(Kind::Vector));
        }
        match &n {
            Node::Cov(_, a, b) if self.is_zero_node(*a) || self.is_zero_node(*b) => {
                let k = self.kind(*b);
                return Ok(self.zero(k));
            }
            Node::Mul(s, v) if self.is_zero_node(*s) || self.is_zero_node(*v) => {
                let k = self.kind(*v);
                return Ok(self.zero(k));
            }
            Node::Component(_, v) if self.is_zero_node(*v) => return Ok(self.zero(Kind::Scalar)),
            _ => {}
        }
        self.intern(n)
    }

    /// Replaces the free field `X_slot` by the value of `rep`.
    pub fn subst(&mut self, id: NodeId, slot: usize, rep: NodeId) -> Result<NodeId> {
        let mut memo = HashMap::new();
        self.subst_rec(id, slot, rep, &mut memo)
    }

    fn subst_rec(&mut self, id: NodeId, slot: usize, rep: NodeId, memo: &mut HashMap<NodeId, NodeId>) -> Result<NodeId> {
        if let Some(&r) = memo.get(&id) {
            return Ok(r);
        }
        let n = self.node(id).clone();
        let mut go = |a: &mut Self, x: NodeId| a.subst_rec(x, slot, rep, memo);
        let out = match n {
            Node::Slot(k) if k == slot => rep,
            Node::Zero(_) | Node::Slot(_) | Node::Basis(_) => id,
            Node::Torsion(a, b) => {
                let (a, b) = (go(self, a)?, go(self, b)?);
                self.make(Node::Torsion(a, b))?
            }
            Node::Bracket(a, b) => {
                let (a, b) = (go(self, a)?, go(self, b)?);
                self.make(Node::Bracket(a, b))?
            }
            Node::Curvature(c, a, b, z) => {
                let (a, b, z) = (go(self, a)?, go(self, b)?, go(self, z)?);
                self.make(Node::Curvature(c, a, b, z))?
            }
            Node::Cov(c, a, b) => {
                let (a, b) = (go(self, a)?, go(self, b)?);
                self.make(Node::Cov(c, a, b))?
            }
            Node::Generic(g, args) => {
                let mut v = Vec::with_capacity(args.len());
                for x in args {
                    v.push(go(self, x)?);
                }
                self.make(Node::Generic(g, v))?
            }
            Node::Combo(terms) => {
                let kind = self.kind(id);
                let mut v = Vec::with_capacity(terms.len());
                for (c, x) in terms {
                    v.push((c, go(self, x)?));
                }
                self.combo(kind, v)?
            }
            Node::Mul(s, v) => {
                let (s, v) = (go(self, s)?, go(self, v)?);
                self.make(Node::Mul(s, v))?
            }
            Node::Component(mu, v) => {
                let v = go(self, v)?;
                self.make(Node::Component(mu, v))?
            }
        };
        memo.insert(id, out);
        Ok(out)
    }

    /// Lowers a term for evaluation in dimension `m`.
    pub fn lower(&mut self, term: &TensorTerm<F>, m: usize) -> Result<NodeId> {
        self.lower_rec(&term.expand_permutes(), m)
    }

    fn lower_rec(&mut self, term: &TensorTerm<F>, m: usize) -> Result<NodeId> {
        use TensorTerm as T;
        Ok(match term {
            T::Slot(k) => self.intern(Node::Slot(*k))?,
            T::Bracket(a, b) => {
                let (a, b) = (self.lower_rec(a, m)?, self.lower_rec(b, m)?);
                self.make(Node::Bracket(a, b))?
            }
            T::CovDerivVF { conn, dir, arg } => {
                let (a, b) = (self.lower_rec(dir, m)?, self.lower_rec(arg, m)?);
                self.make(Node::Cov(*conn, a, b))?
            }
            T::CovDerivTensor { conn, dir, body } => {
                let kind = body.kind();
                let d = self.lower_rec(dir, m)?;
                let b = self.lower_rec(body, m)?;
                let mut terms = vec![(F::one(), self.make(Node::Cov(*conn, d, b))?)];
                for k in body.free_slots() {
                    if !body.is_tensorial_in(k) {
                        continue;
                    }
                    let arg = self.intern(Node::Slot(k))?;
                    let moved = self.make(Node::Cov(*conn, d, arg))?;
                    terms.push((-F::one(), self.subst(b, k, moved)?));
                }
                self.combo(kind, terms)?
            }
            T::Curvature { conn, a, b, c } => {
                let (a, b, c) = (self.lower_rec(a, m)?, self.lower_rec(b, m)?, self.lower_rec(c, m)?);
                self.make(Node::Curvature(*conn, a, b, c))?
            }
            T::Torsion(a, b) => {
                let (a, b) = (self.lower_rec(a, m)?, self.lower_rec(b, m)?);
                self.make(Node::Torsion(a, b))?
            }
            T::Generic { id, args } => {
                let mut v = Vec::with_capacity(args.len());
                for x in args {
                    v.push(self.lower_rec(x, m)?);
                }
                self.make(Node::Generic(*id, v))?
            }
            T::LinearCombo(terms) => {
                let kind = term.kind();
                let mut v = Vec::with_capacity(terms.len());
                for (c, t) in terms {
                    v.push((c.clone(), self.lower_rec(t, m)?));
                }
                self.combo(kind, v)?
            }
            T::ScalarMul(s, v) => {
                let (s, v) = (self.lower_rec(s, m)?, self.lower_rec(v, m)?);
                self.make(Node::Mul(s, v))?
            }
            T::Trace { slot, body } => {
                if !body.is_tensorial_in(*slot) {
                    return Err(Error::OrderZeroViolation { slot: *slot });
                }
                let b = self.lower_rec(body, m)?;
                if self.kind(b) != Kind::Vector {
                    return Err(Error::InvalidInput("trace of a scalar-valued term".into()));
                }
                let mut parts = Vec::with_capacity(m);
                for mu in 0..m {
                    let e = self.intern(Node::Basis(mu))?;
                    let v = self.subst(b, *slot, e)?;
                    parts.push((F::one(), self.make(Node::Component(mu, v))?));
                }
                self.combo(Kind::Scalar, parts)?
            }
            T::Compose { slot, outer, inner } => {
                if !outer.is_tensorial_in(*slot) {
                    return Err(Error::OrderZeroViolation { slot: *slot });
                }
                let o = self.lower_rec(outer, m)?;
                let i = self.lower_rec(inner, m)?;
                if self.kind(i) != Kind::Vector {
                    return Err(Error::InvalidInput("composition with a scalar-valued term".into()));
                }
                self.subst(o, *slot, i)?
            }
            T::Permute { .. } => unreachable!("permutations are expanded before lowering"),
            T::SymNabla { conn, dirs, field } => {
                if dirs.is_empty() {
                    return self.lower_rec(field, m);
                }
                let perms = Permutation::all(dirs.len());
                let w = F::one() / F::int(perms.len() as i64);
                let mut parts = Vec::with_capacity(perms.len());
                for p in &perms {
                    let order: Vec<&TensorTerm<F>> = (0..dirs.len()).map(|i| &dirs[p.apply(i)]).collect();
                    let last = order.len() - 1;
                    let mut t = vnabla_with(*conn, order[last].clone(), (**field).clone());
                    for d in order[..last].iter().rev() {
                        t = tnabla_with(*conn, (*d).clone(), t);
                    }
                    parts.push((w.clone(), self.lower_rec(&t, m)?));
                }
                self.combo(Kind::Vector, parts)?
            }
        })
    }
}
