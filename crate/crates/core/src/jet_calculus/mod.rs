//! Tensor-operator expressions evaluated into exact polynomials in the jets
//! of a linear connection and of vector fields at the origin of a chart.

pub mod eval;
pub mod identities;
pub mod ideal;
pub mod jet;
pub mod lower;
pub mod multilinear;
pub mod series;
pub mod term;

use std::fmt;
use std::thread;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use eval::{demand, Evaluator, JetSource, RandomJets, SymbolicJets};
pub use jet::{JetKind, JetPolynomial, JetRing, JetVar, Monomial};
pub use lower::{Arena, NodeId};
pub use term::{Conn, Kind, TensorTerm};

/// Evaluation settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JetContext {
    /// Manifold dimension.
    pub m: usize,
    /// Truncation order; `None` picks the term's depth plus one.
    pub k: Option<usize>,
    /// Force `Γ^ω_{μν} = Γ^ω_{νμ}` (torsion-free input).
    pub symmetric: bool,
}

impl JetContext {
    pub fn new(m: usize) -> Self {
        Self { m, k: None, symmetric: false }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn symmetric(mut self) -> Self {
        self.symmetric = true;
        self
    }
}

/// Result of a zero test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Zero,
    Nonzero { witness: String },
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, Verdict::Zero)
    }

    pub fn witness(&self) -> Option<&str> {
        match self {
            Verdict::Zero => None,
            Verdict::Nonzero { witness } => Some(witness),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Zero => write!(f, "zero"),
            Verdict::Nonzero { witness } => write!(f, "nonzero ({witness})"),
        }
    }
}

/// A lowered term together with its demand analysis.
pub struct Prepared<F: Scalar> {
    pub arena: Arena<F>,
    pub roots: Vec<NodeId>,
    pub required: usize,
    pub series_order: usize,
}

/// Lower several terms into one shared arena and check truncation.
pub fn prepare<F: Scalar>(terms: &[TensorTerm<F>], ctx: &JetContext) -> Result<Prepared<F>> {
    let mut arena = Arena::new();
    let mut roots = Vec::with_capacity(terms.len());
    for t in terms {
        roots.push(arena.lower(t, ctx.m)?);
    }
    let (mut required, mut series_order) = (0, 0);
    for &r in &roots {
        let (j, s) = demand(&arena, r, 0);
        required = required.max(j);
        series_order = series_order.max(s);
    }
    let available = ctx.k.unwrap_or(required + 1);
    if required > available {
        return Err(Error::TruncationTooSmall { required, available });
    }
    Ok(Prepared { arena, roots, required, series_order })
}

/// Jet depth of `term`: the highest derivative order any jet variable may have.
pub fn required_order<F: Scalar>(term: &TensorTerm<F>, m: usize) -> Result<usize> {
    Ok(prepare(std::slice::from_ref(term), &JetContext::new(m))?.required)
}

/// Exact symbolic evaluation, one polynomial per output component.
pub fn eval<F: Scalar>(term: &TensorTerm<F>, ctx: &JetContext) -> Result<Vec<JetPolynomial<F>>> {
    Ok(eval_many(std::slice::from_ref(term), ctx)?.remove(0))
}

/// Symbolic evaluation of several terms sharing common subterms.
pub fn eval_many<F: Scalar>(terms: &[TensorTerm<F>], ctx: &JetContext) -> Result<Vec<Vec<JetPolynomial<F>>>> {
    let p = prepare(terms, ctx)?;
    let src = SymbolicJets;
    let mut ev = Evaluator::new(&p.arena, &src, ctx.m, p.series_order, ctx.symmetric)?;
    p.roots.iter().map(|&r| ev.eval_root(r)).collect()
}

/// Numeric evaluation at the random jet point determined by `seed`.
pub fn eval_random<F: Scalar>(terms: &[TensorTerm<F>], ctx: &JetContext, seed: u64) -> Result<Vec<Vec<F>>> {
    let p = prepare(terms, ctx)?;
    eval_prepared_random(&p, ctx, seed)
}

pub fn eval_prepared_random<F: Scalar>(p: &Prepared<F>, ctx: &JetContext, seed: u64) -> Result<Vec<Vec<F>>> {
    let src = RandomJets::new(seed);
    let mut ev = Evaluator::new(&p.arena, &src, ctx.m, p.series_order, ctx.symmetric)?;
    p.roots.iter().map(|&r| ev.eval_root(r)).collect()
}

pub fn witness_of<F: Scalar>(components: &[JetPolynomial<F>]) -> Verdict {
    for (w, poly) in components.iter().enumerate() {
        if let Some((mono, c)) = poly.leading_term() {
            return Verdict::Nonzero { witness: format!("[{}] {}*{}", w + 1, c.to_pq(), mono) };
        }
    }
    Verdict::Zero
}

/// `Σ c_p (D·p)` computed on the expansion of `D`: slot `X_i` becomes
/// `X_{p(i)}` in every vector-field jet.
pub fn act_components<F: Scalar>(
    comps: &[JetPolynomial<F>],
    e: &crate::perm_algebra::GroupAlgebraElement<F>,
) -> Vec<JetPolynomial<F>> {
    let mut out = vec![JetPolynomial::zero(); comps.len()];
    for (p, c) in e.terms() {
        let n = p.degree();
        let rename = |v: JetVar| {
            if v.kind() == JetKind::Field && (1..=n).contains(&v.id()) {
                JetVar::field(p.image(v.id()), v.omega(), &v.alpha())
            } else {
                v
            }
        };
        for (slot, poly) in out.iter_mut().zip(comps) {
            slot.add_assign(&poly.map_vars(rename).scale(c));
        }
    }
    out
}

/// Deterministic zero test by full expansion.
pub fn check_zero<F: Scalar>(term: &TensorTerm<F>, ctx: &JetContext) -> Result<Verdict> {
    Ok(witness_of(&eval(term, ctx)?))
}

/// Probabilistic zero test at `trials` random integer jet points.
/// A nonzero verdict is certain; a zero verdict is not a proof.
pub fn check_zero_random<F: Scalar>(term: &TensorTerm<F>, ctx: &JetContext, trials: usize, seed: u64) -> Result<Verdict> {
    let p = prepare(std::slice::from_ref(term), ctx)?;
    let results: Vec<Result<Vec<Vec<F>>>> = thread::scope(|s| {
        let handles: Vec<_> = (0..trials)
            .map(|t| {
                let p = &p;
                s.spawn(move || eval_prepared_random(p, ctx, seed.wrapping_add(t as u64)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("evaluation thread panicked")).collect()
    });
    for (t, r) in results.into_iter().enumerate() {
        let vals = r?.remove(0);
        if let Some(w) = vals.iter().position(|v| !v.is_zero()) {
            return Ok(Verdict::Nonzero {
                witness: format!("[{}] value {} at trial {}", w + 1, vals[w].to_pq(), t),
            });
        }
    }
    Ok(Verdict::Zero)
}

/// `(vf-order, c-order)`: the highest derivative order of vector-field and
/// Christoffel jets occurring in the expansion.
pub fn orders<F: Scalar>(term: &TensorTerm<F>, ctx: &JetContext) -> Result<(usize, usize)> {
    let comps = eval(term, ctx)?;
    let max = |kind| comps.iter().filter_map(|p| p.max_order(kind)).max().unwrap_or(0);
    Ok((max(JetKind::Field), max(JetKind::Christoffel)))
}
