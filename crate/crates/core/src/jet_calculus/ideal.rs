//! Classical generators `∇^{n-3}R`, `∇^{n-2}T`, their streamlined (ideal)
//! versions for `n ≤ 4`, the `Φ`/`Ψ` correspondence between curvature-torsion
//! pairs and canonical tensors, and quasi-symmetry deviations.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::jet_calculus::jet::{JetKind, JetPolynomial, JetVar};
use crate::jet_calculus::term::{combo, curvature, plug, tnabla, torsion, x, TensorTerm};
use crate::jet_calculus::{
    act_components, eval, eval_many, orders, prepare, witness_of, Evaluator, JetContext, JetRing, JetSource, Verdict,
};
use crate::perm_algebra::symbols::{self, SymmetryTag};
use crate::perm_algebra::{quasi_symmetry_check, ENaughtElement, GroupAlgebraElement, Permutation, QuasiSymmetry};
use crate::scalar::Scalar;

fn q<F: Scalar>(p: i64, d: i64) -> F {
    F::frac(p, d)
}

/// `(∇^{k} body)(X_1, …, X_k, …)`: derivative directions `X_1..X_k`, outermost first.
fn iterate_nabla<F: Scalar>(k: usize, body: TensorTerm<F>) -> TensorTerm<F> {
    (1..=k).rev().fold(body, |acc, i| tnabla(x(i), acc))
}

/// `R_n = (∇^{n-3}R)(X_1..X_{n-3}; X_{n-2}, X_{n-1}) X_n`, `n ≥ 3`.
pub fn classical_r<F: Scalar>(n: usize) -> Result<TensorTerm<F>> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("R_n needs n >= 3, got {n}")));
    }
    Ok(iterate_nabla(n - 3, curvature(x(n - 2), x(n - 1), x(n))))
}

/// `T_n = (∇^{n-2}T)(X_1..X_{n-2}; X_{n-1}, X_n)`, `n ≥ 2`.
pub fn classical_t<F: Scalar>(n: usize) -> Result<TensorTerm<F>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("T_n needs n >= 2, got {n}")));
    }
    Ok(iterate_nabla(n - 2, torsion(x(n - 1), x(n))))
}

/// `(R_n, T_n)`; `R_n` is absent for `n = 2`.
pub fn build_classical<F: Scalar>(n: usize) -> Result<(Option<TensorTerm<F>>, TensorTerm<F>)> {
    let r = if n >= 3 { Some(classical_r(n)?) } else { None };
    Ok((r, classical_t(n)?))
}

/// `(∇_{X_a}T)(inner, X_b)`.
fn dt_plug<F: Scalar>(a: usize, inner: TensorTerm<F>, b: usize) -> TensorTerm<F> {
    plug(|s| tnabla(x(a), torsion(s, x(b))), inner)
}

fn t<F: Scalar>(a: TensorTerm<F>, b: TensorTerm<F>) -> TensorTerm<F> {
    torsion(a, b)
}

fn txx<F: Scalar>(a: usize, b: usize) -> TensorTerm<F> {
    torsion(x(a), x(b))
}

/// `(∇_{X_a}T)(X_b, X_c)`.
fn dt<F: Scalar>(a: usize, b: usize, c: usize) -> TensorTerm<F> {
    tnabla(x(a), txx(b, c))
}

/// Streamlined curvature-type tensor, `n ∈ {3, 4}`.
pub fn ideal_r<F: Scalar>(n: usize) -> Result<TensorTerm<F>> {
    match n {
        3 => classical_r(3),
        4 => Ok(combo(vec![
            (F::one(), tnabla(x(1), curvature(x(2), x(3), x(4)))),
            (q(1, 2), curvature(txx(1, 2), x(3), x(4))),
            (q(1, 2), curvature(x(2), txx(1, 3), x(4))),
            (q(-1, 2), t(curvature(x(2), x(3), x(1)), x(4))),
            (q(-1, 2), t(dt(1, 2, 3), x(4))),
            (q(-1, 2), t(t(txx(2, 3), x(1)), x(4))),
            (q(-2, 4), dt_plug(1, txx(2, 3), 4)),
            (q(-1, 4), dt_plug(2, txx(1, 3), 4)),
            (q(1, 4), dt_plug(3, txx(1, 2), 4)),
            (q(1, 8), t(txx(3, 4), txx(1, 2))),
            (q(-1, 8), t(txx(2, 4), txx(1, 3))),
            (q(2, 8), t(txx(2, 3), txx(1, 4))),
        ])),
        _ => Err(Error::Unsupported(format!("no explicit ideal curvature-type tensor for n = {n}"))),
    }
}

/// Streamlined torsion-type tensor, `n ∈ {2, 3, 4}`.
pub fn ideal_t<F: Scalar>(n: usize) -> Result<TensorTerm<F>> {
    match n {
        2 => classical_t(2),
        3 => Ok(combo(vec![(F::one(), dt(1, 2, 3)), (-F::one(), t(x(1), txx(2, 3)))])),
        4 => Ok(combo(vec![
            (q(1, 2), tnabla(x(1), tnabla(x(2), txx(3, 4)))),
            (q(1, 2), tnabla(x(2), tnabla(x(1), txx(3, 4)))),
            (q(-1, 4), curvature(x(1), x(3), txx(4, 2))),
            (q(-1, 4), curvature(x(2), x(3), txx(4, 1))),
            (q(1, 4), curvature(x(1), x(4), txx(3, 2))),
            (q(1, 4), curvature(x(2), x(4), txx(3, 1))),
            (q(3, 4), dt_plug(1, txx(2, 3), 4)),
            (q(3, 4), dt_plug(2, txx(1, 3), 4)),
            (q(-3, 4), dt_plug(1, txx(2, 4), 3)),
            (q(-3, 4), dt_plug(2, txx(1, 4), 3)),
            (q(1, 2), t(dt(1, 2, 3), x(4))),
            (q(1, 2), t(dt(2, 1, 3), x(4))),
            (q(-1, 2), t(dt(1, 2, 4), x(3))),
            (q(-1, 2), t(dt(2, 1, 4), x(3))),
        ])),
        _ => Err(Error::Unsupported(format!("no explicit ideal torsion-type tensor for n = {n}"))),
    }
}

/// The permutation sending slots `n-2, n-1, n` to `a, b, c` (slot form).
fn last_three<F: Scalar>(n: usize, [a, b, c]: [usize; 3]) -> GroupAlgebraElement<F> {
    let mut images: Vec<usize> = (1..=n).collect();
    images[n - 3] = a;
    images[n - 2] = b;
    images[n - 1] = c;
    GroupAlgebraElement::basis(Permutation::new(&images).expect("valid permutation"))
}

/// `Ψ = R·ψ_R + T·ψ_T`, `n ≥ 3`.
pub fn psi_elements<F: Scalar>(n: usize) -> Result<(GroupAlgebraElement<F>, GroupAlgebraElement<F>)> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("Ψ needs n >= 3, got {n}")));
    }
    let id = GroupAlgebraElement::<F>::identity(n);
    let shift = last_three::<F>(n, [n - 1, n, n - 2]);
    let back = last_three::<F>(n, [n, n - 2, n - 1]);
    let r = id.scale(&F::int(-3)).sub(&shift)?.add(&back)?;
    let t = id.scale(&F::int(2)).sub(&shift.scale(&F::int(2)))?;
    Ok((r, t))
}

/// `Φ_R = L·φ_R`, `Φ_T = L·φ_T`, `n ≥ 3`.
pub fn phi_elements<F: Scalar>(n: usize) -> Result<(GroupAlgebraElement<F>, GroupAlgebraElement<F>)> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("Φ needs n >= 3, got {n}")));
    }
    let id = GroupAlgebraElement::<F>::identity(n);
    let sixth = q::<F>(1, 6);
    let swap_r = GroupAlgebraElement::basis(Permutation::transposition(n, n - 2, n - 1));
    let swap_t = GroupAlgebraElement::basis(Permutation::transposition(n, n - 1, n));
    Ok((swap_r.sub(&id)?.scale(&sixth), id.sub(&swap_t)?.scale(&sixth)))
}

/// `Ψ(R, T)` as an operator.
pub fn psi_term<F: Scalar>(n: usize, r: &TensorTerm<F>, t: &TensorTerm<F>) -> Result<TensorTerm<F>> {
    let (pr, pt) = psi_elements::<F>(n)?;
    Ok(combo(vec![(F::one(), r.act(&pr)), (F::one(), t.act(&pt))]))
}

/// `Φ(L)` as a pair of operators.
pub fn phi_term<F: Scalar>(n: usize, l: &TensorTerm<F>) -> Result<(TensorTerm<F>, TensorTerm<F>)> {
    let (pr, pt) = phi_elements::<F>(n)?;
    Ok((l.act(&pr), l.act(&pt)))
}

/// `Ψ(R, T)` on expansions.
pub fn psi_components<F: Scalar>(n: usize, r: &[JetPolynomial<F>], t: &[JetPolynomial<F>]) -> Result<Vec<JetPolynomial<F>>> {
    let (pr, pt) = psi_elements::<F>(n)?;
    let mut out = act_components(r, &pr);
    for (s, x) in out.iter_mut().zip(act_components(t, &pt)) {
        s.add_assign(&x);
    }
    Ok(out)
}

/// Streamlined canonical tensor: `T` for `n = 2`, otherwise `Ψ(iR_n, iT_n)`.
pub fn ideal_l<F: Scalar>(n: usize) -> Result<TensorTerm<F>> {
    if n == 2 {
        return classical_t(2);
    }
    psi_term(n, &ideal_r(n)?, &ideal_t(n)?)
}

/// The ideal operators of degree `n`.
#[derive(Clone, Debug)]
pub struct IdealTensors<F: Scalar> {
    pub n: usize,
    pub r: Option<TensorTerm<F>>,
    pub t: TensorTerm<F>,
    pub l: TensorTerm<F>,
}

/// `(iR_n, iT_n, iL_n)` for `2 ≤ n ≤ 4`.
pub fn build_ideal<F: Scalar>(n: usize) -> Result<IdealTensors<F>> {
    if !(2..=4).contains(&n) {
        return Err(Error::Unsupported(format!("explicit ideal tensors exist only for 2 <= n <= 4, got {n}")));
    }
    let r = if n >= 3 { Some(ideal_r(n)?) } else { None };
    Ok(IdealTensors { n, r, t: ideal_t(n)?, l: ideal_l(n)? })
}

/// `D·e = 0` for every element of the tag, checked in turn.
pub fn check_tag<F: Scalar>(term: &TensorTerm<F>, tag: &SymmetryTag<F>, ctx: &JetContext) -> Result<Verdict> {
    Ok(tag_verdict(&eval(term, ctx)?, tag))
}

fn tag_verdict<F: Scalar>(comps: &[JetPolynomial<F>], tag: &SymmetryTag<F>) -> Verdict {
    for e in &tag.elements {
        let v = witness_of(&act_components(comps, e));
        if !v.is_zero() {
            return v;
        }
    }
    Verdict::Zero
}

fn pair_verdict<F: Scalar>(n: usize, r: &[JetPolynomial<F>], t: &[JetPolynomial<F>]) -> Verdict {
    let a = symbols::aa::<F>(n);
    let mut sum = act_components(r, &a);
    for (s, x) in sum.iter_mut().zip(act_components(t, &a)) {
        s.add_assign(&x);
    }
    witness_of(&sum)
}

/// `R·aa + T·aa = 0`.
pub fn check_pair<F: Scalar>(n: usize, r: &TensorTerm<F>, t: &TensorTerm<F>, ctx: &JetContext) -> Result<Verdict> {
    let v = eval_many(&[r.clone(), t.clone()], ctx)?;
    Ok(pair_verdict(n, &v[0], &v[1]))
}

/// Every applicable identity of the ideal operators of degree `n`, keyed
/// `"<tensor>:<tag>"`.
pub fn verify_ideal_suite<F: Scalar>(n: usize, ctx: &JetContext) -> Result<BTreeMap<String, Verdict>> {
    let ideal = build_ideal::<F>(n)?;
    let mut terms = vec![ideal.t.clone()];
    if let Some(r) = &ideal.r {
        terms.push(r.clone());
    }
    let vals = eval_many(&terms, ctx)?;
    let t = &vals[0];
    // Ψ applied to the expansions equals the expansion of Ψ(iR, iT)
    let l_vals = if n == 2 { t.clone() } else { psi_components(n, &vals[1], t)? };
    let l = &l_vals;
    let mut report = BTreeMap::new();
    if ideal.r.is_some() {
        let r = &vals[1];
        for tag in symbols::r_tags::<F>(n) {
            let name = match tag.name {
                "s1" => "b1",
                "s3" => "b3",
                "s4" => "b4",
                other => other,
            };
            report.insert(format!("iR{n}:{name}"), tag_verdict(r, &tag));
        }
        report.insert(format!("iR{n}+iT{n}:aa"), pair_verdict(n, r, t));
    }
    for tag in symbols::t_tags::<F>(n) {
        report.insert(format!("iT{n}:{}", tag.name), tag_verdict(t, &tag));
    }
    for tag in symbols::l_tags::<F>(n) {
        report.insert(format!("iL{n}:{}", tag.name), tag_verdict(l, &tag));
    }
    Ok(report)
}

/// The couple `(R, ∇T)` against the pair identity at `n = 3`.
pub fn aa_naive<F: Scalar>(ctx: &JetContext) -> Result<Verdict> {
    check_pair(3, &classical_r::<F>(3)?, &classical_t::<F>(3)?, ctx)
}

/// `(R, iT_3)` against the pair identity.
pub fn aa_ideal<F: Scalar>(ctx: &JetContext) -> Result<Verdict> {
    check_pair(3, &classical_r::<F>(3)?, &ideal_t::<F>(3)?, ctx)
}

/// `∇R` against the cyclic symmetry in slots `1, 2, 3`.
pub fn b3_naive<F: Scalar>(ctx: &JetContext) -> Result<Verdict> {
    let tag = SymmetryTag { name: "b3", elements: vec![symbols::b3::<F>(4)] };
    check_tag(&classical_r::<F>(4)?, &tag, ctx)
}

/// Frame fields `X_k = ∂/∂x^k` with symbolic connection jets.
struct FrameJets;

impl<F: Scalar> JetSource<F, JetPolynomial<F>> for FrameJets {
    fn jet(&self, v: JetVar) -> JetPolynomial<F> {
        match v.kind() {
            JetKind::Field => {
                let on = v.order() == 0 && v.omega() + 1 == v.id();
                if on {
                    JetPolynomial::from_terms([(crate::jet_calculus::Monomial::one(), F::one())])
                } else {
                    JetPolynomial::from_terms([])
                }
            }
            _ => JetPolynomial::var(v),
        }
    }
}

/// The leading symbol in `E⁰(n)` of a degree-`n` operator: the part linear
/// in `∂^{n-2}Γ`, read off with `X_k = ∂/∂x^k` in dimension `n`. The basis
/// vector at `σ` stands for `∂_{σ(1)…σ(n-2)} Γ^ω_{σ(n-1) σ(n)}`.
pub fn leading_symbol<F: Scalar>(term: &TensorTerm<F>, n: usize) -> Result<ENaughtElement<F>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("leading symbols need n >= 2, got {n}")));
    }
    let ctx = JetContext::new(n);
    let p = prepare(std::slice::from_ref(term), &ctx)?;
    let src = FrameJets;
    let mut ev = Evaluator::new(&p.arena, &src, n, p.series_order, false)?;
    let comp = ev.eval_root(p.roots[0])?.remove(0);
    let mut out = ENaughtElement::zero(n)?;
    for (mono, c) in comp.terms() {
        let vars = mono.vars();
        if vars.len() != 1 || vars[0].kind() != JetKind::Christoffel || vars[0].order() != n - 2 {
            continue;
        }
        let v = vars[0];
        if v.omega() != 0 {
            continue;
        }
        let mut images = Vec::with_capacity(n);
        for (k, &a) in v.alpha().iter().enumerate().take(n) {
            for _ in 0..a {
                images.push(k + 1);
            }
        }
        let lower = v.lower();
        images.push(lower[0] + 1);
        images.push(lower[1] + 1);
        if let Ok(p) = Permutation::new(&images) {
            out.add_term(&p, c.clone());
        }
    }
    Ok(out)
}

/// Lower-order residual of a quasi-symmetry.
#[derive(Clone, Debug)]
pub struct Deviation<F: Scalar> {
    pub quasi_symmetry: QuasiSymmetry,
    pub residual: TensorTerm<F>,
    pub vf_order: usize,
    pub c_order: usize,
    pub verdict: Verdict,
}

/// `Σ_i D_i·𝔖` for operators `D_i` with leading symbols `α_i`. Requires that
/// `𝔖` annihilate `Σ α_i` at least in `E⁰(n)`.
pub fn deviation<F: Scalar>(
    parts: &[(GroupAlgebraElement<F>, TensorTerm<F>)],
    s: &GroupAlgebraElement<F>,
    ctx: &JetContext,
) -> Result<Deviation<F>> {
    let n = s.degree();
    let mut alpha = GroupAlgebraElement::zero(n);
    for (a, _) in parts {
        alpha = alpha.add(a)?;
    }
    let qs = quasi_symmetry_check(&alpha, s)?;
    if !qs.module {
        return Err(Error::NotQuasiSymmetry);
    }
    let residual = combo(parts.iter().map(|(_, d)| (F::one(), d.act(s))).collect());
    let comps = eval(&residual, ctx)?;
    let verdict = witness_of(&comps);
    let (vf_order, c_order) = if verdict.is_zero() { (0, 0) } else { orders(&residual, ctx)? };
    Ok(Deviation { quasi_symmetry: qs, residual, vf_order, c_order, verdict })
}
