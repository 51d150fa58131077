//! Demand-driven evaluation of lowered terms as truncated Taylor series at
//! the origin of a chart. A node evaluated at order `n` yields every output
//! component up to total degree `n`; derivatives pull one extra order from
//! their arguments.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jet_calculus::jet::{JetPolynomial, JetRing, JetVar, Multi, MAX_DIM, MAX_ORDER};
use crate::jet_calculus::lower::{Arena, Node, NodeId};
use crate::jet_calculus::series::{MonoTable, Series};
use crate::jet_calculus::term::{Conn, Kind};
use crate::scalar::{factorial, Scalar};

/// Supplies the value of each formal jet variable.
pub trait JetSource<F: Scalar, R: JetRing<F>>: Sync {
    fn jet(&self, v: JetVar) -> R;
}

/// Every jet is its own indeterminate.
#[derive(Debug, Clone, Copy, Default)]
pub struct SymbolicJets;

impl<F: Scalar> JetSource<F, JetPolynomial<F>> for SymbolicJets {
    fn jet(&self, v: JetVar) -> JetPolynomial<F> {
        JetPolynomial::var(v)
    }
}

/// Pseudo-random integer jets, a pure function of `(seed, variable)`.
#[derive(Debug, Clone, Copy)]
pub struct RandomJets {
    pub seed: u64,
    pub range: i64,
}

impl RandomJets {
    pub fn new(seed: u64) -> Self {
        Self { seed, range: 50 }
    }
}

impl<F: Scalar> JetSource<F, F> for RandomJets {
    fn jet(&self, v: JetVar) -> F {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(v.raw());
        F::int(rng.gen_range(-self.range..=self.range))
    }
}

/// Static demand analysis: `(jet order, series order)` needed to evaluate
/// `id` at order `need`.
pub fn demand<F: Scalar>(arena: &Arena<F>, id: NodeId, need: usize) -> (usize, usize) {
    fn go<F: Scalar>(a: &Arena<F>, id: NodeId, n: usize, memo: &mut HashMap<(NodeId, usize), (usize, usize)>) -> (usize, usize) {
        if let Some(&r) = memo.get(&(id, n)) {
            return r;
        }
        let join = |x: (usize, usize), y: (usize, usize)| (x.0.max(y.0), x.1.max(y.1));
        let r = match a.node(id) {
            Node::Zero(_) | Node::Basis(_) => (0, n),
            Node::Slot(_) => (n, n),
            Node::Torsion(x, y) => join(join((n, n), go(a, *x, n, memo)), go(a, *y, n, memo)),
            Node::Curvature(_, x, y, z) => {
                let mut r = (n + 1, n + 1);
                for c in [x, y, z] {
                    r = join(r, go(a, *c, n, memo));
                }
                r
            }
            Node::Cov(_, x, y) => join(join((n, n), go(a, *x, n, memo)), go(a, *y, n + 1, memo)),
            Node::Bracket(x, y) => join(go(a, *x, n + 1, memo), go(a, *y, n + 1, memo)),
            Node::Generic(_, args) => args.iter().fold((n, n), |r, c| join(r, go(a, *c, n, memo))),
            Node::Combo(v) => v.iter().fold((0, n), |r, (_, c)| join(r, go(a, *c, n, memo))),
            Node::Mul(x, y) => join(go(a, *x, n, memo), go(a, *y, n, memo)),
            Node::Component(_, x) => go(a, *x, n, memo),
        };
        memo.insert((id, n), r);
        r
    }
    go(arena, id, need, &mut HashMap::new())
}

type Value<R> = Rc<Vec<Series<R>>>;

/// One evaluation session: a fixed jet source, dimension and table.
pub struct Evaluator<'a, F: Scalar, R: JetRing<F>, S: JetSource<F, R>> {
    arena: &'a Arena<F>,
    source: &'a S,
    m: usize,
    symmetric: bool,
    table: Arc<MonoTable>,
    inv_fact: Vec<F>,
    cache: HashMap<(NodeId, usize), Value<R>>,
    gamma: HashMap<(Conn, usize), Value<R>>,
    tensors: HashMap<(usize, usize, usize), Value<R>>,
}

impl<'a, F: Scalar, R: JetRing<F>, S: JetSource<F, R>> Evaluator<'a, F, R, S> {
    /// `max_jet` bounds the derivative order of any jet variable that may be
    /// requested; `order` bounds series truncation.
    pub fn new(arena: &'a Arena<F>, source: &'a S, m: usize, order: usize, symmetric: bool) -> Result<Self> {
        if m == 0 || m > MAX_DIM {
            return Err(Error::InvalidInput(format!("manifold dimension must be in 1..={MAX_DIM}, got {m}")));
        }
        if order > MAX_ORDER {
            return Err(Error::Unsupported(format!("derivative order {order} exceeds {MAX_ORDER}")));
        }
        let table = MonoTable::get(m, order);
        let inv_fact = table
            .exps
            .iter()
            .map(|e| {
                let d = e.iter().fold(F::one(), |acc, &a| acc * factorial::<F>(a as usize));
                F::one() / d
            })
            .collect();
        Ok(Self {
            arena,
            source,
            m,
            symmetric,
            table,
            inv_fact,
            cache: HashMap::new(),
            gamma: HashMap::new(),
            tensors: HashMap::new(),
        })
    }

    fn zero_series(&self, order: usize) -> Series<R> {
        Series::zero(&self.table, order)
    }

    fn jet_series(&self, order: usize, var: impl Fn(&Multi) -> JetVar) -> Series<R> {
        let n = self.table.count(order);
        let c = (0..n).map(|i| self.source.jet(var(&self.table.exps[i])).scale(&self.inv_fact[i])).collect();
        Series::from_coeffs(&self.table, order, c)
    }

    /// `Γ^ω_{μν}` at index `(ω·m + μ)·m + ν`.
    fn gamma(&mut self, conn: Conn, order: usize) -> Value<R> {
        if let Some(v) = self.gamma.get(&(conn, order)) {
            return v.clone();
        }
        let m = self.m;
        let v: Vec<Series<R>> = match conn {
            Conn::Full => {
                let mut out = Vec::with_capacity(m * m * m);
                for w in 0..m {
                    for mu in 0..m {
                        for nu in 0..m {
                            let (a, b) = if self.symmetric && nu < mu { (nu, mu) } else { (mu, nu) };
                            out.push(self.jet_series(order, |al| JetVar::christoffel(w, a, b, al)));
                        }
                    }
                }
                out
            }
            Conn::Sym => {
                let full = self.gamma(Conn::Full, order);
                let half = F::one() / F::int(2);
                let mut out = Vec::with_capacity(m * m * m);
                for w in 0..m {
                    for mu in 0..m {
                        for nu in 0..m {
                            let s = full[(w * m + mu) * m + nu].add(&full[(w * m + nu) * m + mu]);
                            out.push(s.scale(&half));
                        }
                    }
                }
                out
            }
        };
        let v = Rc::new(v);
        self.gamma.insert((conn, order), v.clone());
        v
    }

    /// Components of `Φ_id` of rank `r`, indexed `ω, i₁, …, i_r` row-major.
    fn tensor(&mut self, id: usize, rank: usize, order: usize) -> Value<R> {
        if let Some(v) = self.tensors.get(&(id, rank, order)) {
            return v.clone();
        }
        let m = self.m;
        let total = m.pow(rank as u32 + 1);
        let v: Vec<Series<R>> = (0..total)
            .map(|flat| {
                let mut idx = vec![0usize; rank + 1];
                let mut rest = flat;
                for slot in idx.iter_mut().rev() {
                    *slot = rest % m;
                    rest /= m;
                }
                self.jet_series(order, |al| JetVar::tensor(id, idx[0], &idx[1..], al))
            })
            .collect();
        let v = Rc::new(v);
        self.tensors.insert((id, rank, order), v.clone());
        v
    }

    /// Output components at the origin.
    pub fn eval_root(&mut self, id: NodeId) -> Result<Vec<R>> {
        let v = self.eval(id, 0)?;
        Ok(v.iter().map(|s| s.constant_term().clone()).collect())
    }

    pub fn eval(&mut self, id: NodeId, n: usize) -> Result<Value<R>> {
        if let Some(v) = self.cache.get(&(id, n)) {
            return Ok(v.clone());
        }
        let m = self.m;
        let node = self.arena.node(id).clone();
        let out: Vec<Series<R>> = match node {
            Node::Zero(kind) => {
                let len = if kind == Kind::Vector { m } else { 1 };
                vec![self.zero_series(n); len]
            }
            Node::Basis(mu) => (0..m)
                .map(|w| {
                    if w == mu {
                        Series::constant(&self.table, n, R::constant(F::one()))
                    } else {
                        self.zero_series(n)
                    }
                })
                .collect(),
            Node::Slot(k) => {
                if k > 255 {
                    return Err(Error::InvalidInput(format!("slot X{k} is out of range")));
                }
                (0..m).map(|w| self.jet_series(n, |al| JetVar::field(k, w, al))).collect()
            }
            Node::Torsion(a, b) => {
                let g = self.gamma(Conn::Full, n);
                let (a, b) = (self.eval(a, n)?, self.eval(b, n)?);
                (0..m)
                    .map(|w| {
                        let mut acc = self.zero_series(n);
                        for mu in 0..m {
                            let mut tb = self.zero_series(n);
                            for nu in 0..m {
                                let t = g[(w * m + mu) * m + nu].sub(&g[(w * m + nu) * m + mu]);
                                tb.add_product(&t, &b[nu]);
                            }
                            acc.add_product(&a[mu], &tb);
                        }
                        acc
                    })
                    .collect()
            }
            Node::Cov(conn, a, b) => {
                let av = self.eval(a, n)?;
                let bv = self.eval(b, n + 1)?;
                if self.arena.kind(b) == Kind::Scalar {
                    let mut acc = self.zero_series(n);
                    for mu in 0..m {
                        acc.add_product(&av[mu], &bv[0].deriv(mu));
                    }
                    vec![acc]
                } else {
                    let g = self.gamma(conn, n);
                    let low: Vec<Series<R>> = bv.iter().map(|s| s.truncate(n)).collect();
                    (0..m)
                        .map(|w| {
                            let mut acc = self.zero_series(n);
                            for mu in 0..m {
                                let mut inner = bv[w].deriv(mu);
                                for nu in 0..m {
                                    inner.add_product(&g[(w * m + mu) * m + nu], &low[nu]);
                                }
                                acc.add_product(&av[mu], &inner);
                            }
                            acc
                        })
                        .collect()
                }
            }
            Node::Bracket(a, b) => {
                let av = self.eval(a, n + 1)?;
                let bv = self.eval(b, n + 1)?;
                (0..m)
                    .map(|w| {
                        let mut acc = self.zero_series(n);
                        for mu in 0..m {
                            acc.add_product(&av[mu].truncate(n), &bv[w].deriv(mu));
                            let neg = bv[mu].truncate(n).scale(&-F::one());
                            acc.add_product(&neg, &av[w].deriv(mu));
                        }
                        acc
                    })
                    .collect()
            }
            Node::Curvature(conn, a, b, z) => self.curvature(conn, a, b, z, n)?,
            Node::Generic(gid, args) => {
                let r = args.len();
                let phi = self.tensor(gid, r, n);
                let mut vals = Vec::with_capacity(r);
                for x in &args {
                    vals.push(self.eval(*x, n)?);
                }
                // contract the last index repeatedly
                let mut cur: Vec<Series<R>> = (*phi).clone();
                for k in (0..r).rev() {
                    let next_len = cur.len() / m;
                    let mut next = vec![self.zero_series(n); next_len];
                    for (j, slot) in next.iter_mut().enumerate() {
                        for i in 0..m {
                            slot.add_product(&cur[j * m + i], &vals[k][i]);
                        }
                    }
                    cur = next;
                }
                cur
            }
            Node::Combo(terms) => {
                let kind = self.arena.kind(id);
                let len = if kind == Kind::Vector { m } else { 1 };
                let mut acc = vec![self.zero_series(n); len];
                for (c, x) in &terms {
                    let v = self.eval(*x, n)?;
                    for (slot, s) in acc.iter_mut().zip(v.iter()) {
                        *slot = slot.add(&s.scale(c));
                    }
                }
                acc
            }
            Node::Mul(s, v) => {
                let sv = self.eval(s, n)?;
                let vv = self.eval(v, n)?;
                vv.iter().map(|x| sv[0].mul(x)).collect()
            }
            Node::Component(mu, v) => {
                let vv = self.eval(v, n)?;
                vec![vv[mu].clone()]
            }
        };
        let out = Rc::new(out);
        self.cache.insert((id, n), out.clone());
        Ok(out)
    }

    /// `R(a,b)z = −(∂_μΓ^ω_{νλ} − ∂_νΓ^ω_{μλ} + Γ^ω_{μκ}Γ^κ_{νλ} − Γ^ω_{νκ}Γ^κ_{μλ}) a^μ b^ν z^λ`.
    fn curvature(&mut self, conn: Conn, a: NodeId, b: NodeId, z: NodeId, n: usize) -> Result<Vec<Series<R>>> {
        let m = self.m;
        let g1 = self.gamma(conn, n + 1);
        let g = self.gamma(conn, n);
        let av = self.eval(a, n)?;
        let bv = self.eval(b, n)?;
        let zv = self.eval(z, n)?;
        let idx = |w: usize, mu: usize, nu: usize| (w * m + mu) * m + nu;
        // gz[κ][ν] = Γ^κ_{νλ} z^λ
        let mut gz = vec![self.zero_series(n); m * m];
        for k in 0..m {
            for nu in 0..m {
                for l in 0..m {
                    gz[k * m + nu].add_product(&g[idx(k, nu, l)], &zv[l]);
                }
            }
        }
        let contract_dir = |dir: &[Series<R>], gz: &[Series<R>], zero: Series<R>| -> Vec<Series<R>> {
            (0..m)
                .map(|k| {
                    let mut s = zero.clone();
                    for nu in 0..m {
                        s.add_product(&dir[nu], &gz[k * m + nu]);
                    }
                    s
                })
                .collect()
        };
        let bz = contract_dir(&bv, &gz, self.zero_series(n));
        let az = contract_dir(&av, &gz, self.zero_series(n));
        let mut out = Vec::with_capacity(m);
        for w in 0..m {
            // dz[μ][ν] = ∂_μ Γ^ω_{νλ} z^λ
            let mut dz = vec![self.zero_series(n); m * m];
            for mu in 0..m {
                for nu in 0..m {
                    for l in 0..m {
                        let d = g1[idx(w, nu, l)].deriv(mu);
                        dz[mu * m + nu].add_product(&d, &zv[l]);
                    }
                }
            }
            let mut acc = self.zero_series(n);
            for mu in 0..m {
                if av[mu].is_zero() {
                    continue;
                }
                let mut inner = self.zero_series(n);
                for nu in 0..m {
                    let t = dz[mu * m + nu].sub(&dz[nu * m + mu]);
                    inner.add_product(&t, &bv[nu]);
                }
                for k in 0..m {
                    inner.add_product(&g[idx(w, mu, k)], &bz[k]);
                }
                acc.add_product(&av[mu], &inner);
            }
            for nu in 0..m {
                let mut inner = self.zero_series(n);
                for k in 0..m {
                    inner.add_product(&g[idx(w, nu, k)], &az[k]);
                }
                let neg = inner.scale(&-F::one());
                acc.add_product(&bv[nu], &neg);
            }
            out.push(acc.scale(&-F::one()));
        }
        Ok(out)
    }
}
