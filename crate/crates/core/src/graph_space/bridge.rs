//! Graphs to tensor terms, and the rank of the resulting operators.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph_space::{decorated_space, Graph, Vertex};
use crate::jet_calculus::ideal::{classical_r, classical_t, ideal_l, leading_symbol, psi_term};
use crate::jet_calculus::term::{compose, scalar_mul, sym_nabla, vnabla, x, TensorTerm};
use crate::jet_calculus::{eval_prepared_random, prepare, JetContext};
use crate::linalg::{nullspace, rank};
use crate::perm_algebra::{kernel_basis, right_action, ENaughtElement, GeneratorFamily, GroupAlgebraElement, Permutation};
use crate::scalar::Scalar;

/// Trace slots of generated terms are `TRACE_BASE + j`.
pub const TRACE_BASE: usize = 1000;
/// Composition binders of generated terms start here.
const BINDER_BASE: usize = 20000;

/// Operators realizing each `Kr(s)` basis element: `ops[s][b]` has leading
/// symbol `kernel_basis(s)[b]` and uses slots `X_1..X_s`.
pub struct Realization<F: Scalar> {
    family: GeneratorFamily<F>,
    ops: BTreeMap<usize, Vec<TensorTerm<F>>>,
}

impl<F: Scalar> Realization<F> {
    pub fn new(family: GeneratorFamily<F>) -> Self {
        Self { family, ops: BTreeMap::new() }
    }

    fn generators(&self, s: usize) -> Result<Vec<TensorTerm<F>>> {
        let names = self.family.members(s)?;
        names
            .iter()
            .map(|(name, _)| match (&self.family, name.as_bytes()[0]) {
                (GeneratorFamily::Classical, b'r') => classical_r(s),
                (GeneratorFamily::Classical, _) => classical_t(s),
                (GeneratorFamily::Canonical, _) if s <= 4 => ideal_l(s),
                (GeneratorFamily::Canonical, _) => psi_term(s, &classical_r(s)?, &classical_t(s)?),
                (GeneratorFamily::Custom(_), _) => {
                    Err(Error::Unsupported("custom generator families have no operator realization".into()))
                }
            })
            .collect()
    }

    /// Operators for every basis element of `Kr(s)`.
    pub fn operators(&mut self, s: usize) -> Result<&[TensorTerm<F>]> {
        if !self.ops.contains_key(&s) {
            let ops = self.solve(s)?;
            self.ops.insert(s, ops);
        }
        Ok(&self.ops[&s])
    }

    /// Writes each basis element as `Σ c_{i,p} g_i·p` over the generator
    /// symbols and applies the same combination to the generator operators.
    fn solve(&self, s: usize) -> Result<Vec<TensorTerm<F>>> {
        let gens = self.generators(s)?;
        let symbols = gens.iter().map(|g| leading_symbol(g, s)).collect::<Result<Vec<_>>>()?;
        let perms = Permutation::all(s);
        let mut columns: Vec<(usize, Permutation, Vec<F>)> = Vec::new();
        for (i, sym) in symbols.iter().enumerate() {
            for p in &perms {
                columns.push((i, p.clone(), right_action(sym, p)?.to_dense()));
            }
        }
        let dim = s * (s - 1);
        let mut out = Vec::new();
        for target in kernel_basis::<F>(s)? {
            let t = target.to_dense();
            let rows: Vec<Vec<F>> = (0..dim)
                .map(|r| columns.iter().map(|c| c.2[r].clone()).chain(std::iter::once(-t[r].clone())).collect())
                .collect();
            let sol = nullspace(&rows, columns.len() + 1)
                .into_iter()
                .find(|v| !v[columns.len()].is_zero())
                .ok_or_else(|| Error::InvalidInput(format!("the {} family does not generate Kr({s})", self.family.name())))?;
            let scale = F::one() / sol[columns.len()].clone();
            let mut by_gen: Vec<GroupAlgebraElement<F>> = vec![GroupAlgebraElement::zero(s); gens.len()];
            for ((i, p, _), c) in columns.iter().zip(&sol) {
                if !c.is_zero() {
                    by_gen[*i].add_term(p.clone(), c.clone() * scale.clone());
                }
            }
            let parts = gens
                .iter()
                .zip(&by_gen)
                .filter(|(_, e)| !e.is_zero())
                .flat_map(|(g, e)| match g.act(e) {
                    TensorTerm::LinearCombo(v) => v,
                    other => vec![(F::one(), other)],
                })
                .collect();
            out.push(TensorTerm::LinearCombo(parts));
        }
        Ok(out)
    }
}

struct Builder<'a, F: Scalar> {
    g: &'a Graph,
    offsets: Vec<usize>,
    ops: &'a BTreeMap<usize, Vec<TensorTerm<F>>>,
    cut: Option<(usize, usize)>,
    binder: usize,
}

impl<F: Scalar> Builder<'_, F> {
    fn input(&mut self, slot: usize) -> Result<TensorTerm<F>> {
        if let Some((s, z)) = self.cut {
            if s == slot {
                return Ok(x(z));
            }
        }
        self.value(self.g.wiring[slot])
    }

    fn value(&mut self, v: usize) -> Result<TensorTerm<F>> {
        let off = self.offsets[v];
        match self.g.vertices[v] {
            Vertex::Black { label, arity: 0 } => Ok(x(label)),
            Vertex::Black { label, arity: 1 } => Ok(vnabla(self.input(off)?, x(label))),
            Vertex::Black { label, arity } => {
                let dirs = (0..arity).map(|j| self.input(off + j)).collect::<Result<Vec<_>>>()?;
                Ok(sym_nabla(dirs, x(label)))
            }
            Vertex::Decorated { arity, decoration } => {
                let op = self.ops[&arity][decoration].clone();
                let first = self.binder;
                self.binder += arity;
                let mut t = op.relabel(&|k| if (1..=arity).contains(&k) { first + k } else { k });
                for j in 0..arity {
                    let arg = self.input(off + j)?;
                    let name = first + j + 1;
                    t = match arg {
                        TensorTerm::Slot(k) => t.relabel(&|s| if s == name { k } else { s }),
                        other => compose(t, name, other)?,
                    };
                }
                Ok(t)
            }
            ref other => Err(Error::InvalidInput(format!("vertex {other:?} has no operator realization"))),
        }
    }
}

/// The operator of a decorated graph: the anchor component becomes the
/// vector value, every closed component a trace factor.
pub fn to_tensor_term<F: Scalar>(g: &Graph, realization: &mut Realization<F>) -> Result<TensorTerm<F>> {
    if !g.is_valid() {
        return Err(Error::InvalidInput(format!("invalid graph {g}")));
    }
    for v in &g.vertices {
        if let Vertex::Decorated { arity, .. } = v {
            realization.operators(*arity)?;
        }
    }
    let offsets = g.offsets();
    let mut b = Builder { g, offsets, ops: &realization.ops, cut: None, binder: BINDER_BASE };
    let main = b.input(g.anchor_slot())?;
    let in_main = g.anchor_component();
    let consumer = g.consumer();
    let owner = g.slot_owner();
    let mut done = in_main.clone();
    let mut factors = Vec::new();
    for start in 0..g.vertices.len() {
        if done[start] {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        while !path.contains(&v) {
            path.push(v);
            v = owner[consumer[v]].expect("closed components do not reach the anchor");
        }
        let cycle_start = path.iter().position(|&u| u == v).unwrap();
        let c = *path[cycle_start..].iter().min().unwrap();
        let z = TRACE_BASE + factors.len() + 1;
        b.cut = Some((consumer[c], z));
        let body = b.value(c)?;
        b.cut = None;
        factors.push(TensorTerm::Trace { slot: z, body: Box::new(body) });
        mark_component(g, c, &mut done);
    }
    Ok(factors.into_iter().rev().fold(main, |acc, f| scalar_mul(f, acc)))
}

fn mark_component(g: &Graph, seed: usize, done: &mut [bool]) {
    let owner = g.slot_owner();
    let consumer = g.consumer();
    let n = g.vertices.len();
    // vertices whose downstream path meets `seed`'s cycle
    for (start, flag) in done.iter_mut().enumerate() {
        if *flag {
            continue;
        }
        let mut v = start;
        for _ in 0..=n {
            if v == seed {
                *flag = true;
                break;
            }
            match owner[consumer[v]] {
                Some(next) => v = next,
                None => break,
            }
        }
    }
}

/// Rank over the rationals of the jet evaluations of the `Gr[Kr](d)` basis
/// operators at `trials` random points in dimension `m`.
pub fn independence_rank<F: Scalar>(d: usize, m: usize, trials: usize, family: GeneratorFamily<F>) -> Result<usize> {
    let space = decorated_space::<F>(d)?;
    let mut real = Realization::new(family);
    let terms = space.basis().into_iter().map(|g| to_tensor_term(g, &mut real)).collect::<Result<Vec<_>>>()?;
    let ctx = JetContext::new(m);
    let prepared = prepare(&terms, &ctx)?;
    let mut rows: Vec<Vec<F>> = vec![Vec::new(); terms.len()];
    for t in 0..trials {
        let vals = eval_prepared_random(&prepared, &ctx, t as u64)?;
        for (row, v) in rows.iter_mut().zip(vals) {
            row.extend(v);
        }
    }
    Ok(rank(&rows))
}

/// The symbol of `Kr(s)` basis element `b`, for reports.
pub fn decoration_symbol<F: Scalar>(s: usize, b: usize) -> Result<ENaughtElement<F>> {
    kernel_basis::<F>(s)?
        .into_iter()
        .nth(b)
        .ok_or_else(|| Error::InvalidInput(format!("Kr({s}) has no basis element {b}")))
}
