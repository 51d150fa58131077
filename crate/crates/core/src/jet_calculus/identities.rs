//! Residuals of the torsion-corrected Bianchi, Ricci and splitting
//! identities. Each residual is expected to evaluate to zero except the
//! negative controls.

use crate::error::{Error, Result};
use crate::jet_calculus::term::{
    combo, curvature, curvature_with, generic, plug, tnabla, tnabla_with, torsion, x, Conn, TensorTerm,
};
use crate::scalar::Scalar;

/// A named residual together with the context it must be checked in.
#[derive(Clone, Debug)]
pub struct Identity<F: Scalar> {
    pub name: String,
    pub residual: TensorTerm<F>,
    /// Check with a torsion-free connection.
    pub symmetric: bool,
    /// `false` for negative controls.
    pub expect_zero: bool,
}

/// Names accepted by [`identity`].
pub const IDENTITY_NAMES: &[&str] = &[
    "bianchi1",
    "bianchi2",
    "ricci1",
    "ricci2",
    "ricci3",
    "ricci-no-torsion",
    "split14",
    "split15-1",
    "split15-2",
    "split14-torsion-free",
    "split14-extra-term",
];

fn q<F: Scalar>(p: i64, d: i64) -> F {
    F::frac(p, d)
}

/// Sum over the cyclic shifts of slots `a → b → c → a`.
pub fn cyclic_sum<F: Scalar>(t: &TensorTerm<F>, [a, b, c]: [usize; 3]) -> TensorTerm<F> {
    let shift = move |k: usize| {
        if k == a {
            b
        } else if k == b {
            c
        } else if k == c {
            a
        } else {
            k
        }
    };
    let once = t.relabel(&shift);
    let twice = once.relabel(&shift);
    combo(vec![(F::one(), t.clone()), (F::one(), once), (F::one(), twice)])
}

pub fn bianchi1<F: Scalar>() -> TensorTerm<F> {
    let body = combo(vec![
        (F::one(), curvature(x(1), x(2), x(3))),
        (F::one(), tnabla(x(1), torsion(x(2), x(3)))),
        (F::one(), torsion(torsion(x(1), x(2)), x(3))),
    ]);
    cyclic_sum(&body, [1, 2, 3])
}

pub fn bianchi2<F: Scalar>() -> TensorTerm<F> {
    let body = combo(vec![
        (F::one(), tnabla(x(1), curvature(x(2), x(3), x(4)))),
        (F::one(), curvature(torsion(x(1), x(2)), x(3), x(4))),
    ]);
    cyclic_sum(&body, [1, 2, 3])
}

/// `Φ(X_first, …)` for the generic `(1,r)`-tensor `Φ_0`.
fn phi<F: Scalar>(r: usize, first: usize) -> TensorTerm<F> {
    generic(0, (first..first + r).map(x).collect())
}

/// `Σ_j Φ(…, f(X_j), …)` over the arguments of `phi(r, first)`.
fn phi_inner_sum<F: Scalar>(r: usize, first: usize, f: impl Fn(TensorTerm<F>) -> TensorTerm<F>) -> Vec<TensorTerm<F>> {
    (0..r)
        .map(|j| {
            let args = (0..r).map(|i| if i == j { f(x(first + i)) } else { x(first + i) }).collect();
            generic(0, args)
        })
        .collect()
}

/// Ricci identity for a `(1,r)`-tensor; `with_torsion_term = false` drops
/// the `∇_{T(X,Y)}Φ` correction.
pub fn ricci<F: Scalar>(r: usize, with_torsion_term: bool) -> Result<TensorTerm<F>> {
    if !(1..=3).contains(&r) {
        return Err(Error::InvalidInput(format!("Ricci identity is provided for r in 1..=3, got {r}")));
    }
    let body = phi::<F>(r, 3);
    let mut terms = vec![
        (F::one(), tnabla(x(1), tnabla(x(2), body.clone()))),
        (-F::one(), tnabla(x(2), tnabla(x(1), body.clone()))),
        (F::one(), plug(|s| curvature(x(1), x(2), s), body.clone())),
    ];
    for t in phi_inner_sum(r, 3, |z| curvature(x(1), x(2), z)) {
        terms.push((-F::one(), t));
    }
    if with_torsion_term {
        terms.push((F::one(), tnabla(torsion(x(1), x(2)), body)));
    }
    Ok(combo(terms))
}

/// `R` against its expression through `Γ̃` and `T`:
/// `R = R̃ − ½(∇̃_X T)(Y,Z) + ½(∇̃_Y T)(X,Z) − ¼T(X,T(Y,Z)) + ¼T(Y,T(X,Z))`.
pub fn split14<F: Scalar>() -> TensorTerm<F> {
    let (x1, x2, x3) = (x::<F>(1), x::<F>(2), x::<F>(3));
    combo(vec![
        (F::one(), curvature(x1.clone(), x2.clone(), x3.clone())),
        (-F::one(), curvature_with(Conn::Sym, x1.clone(), x2.clone(), x3.clone())),
        (q(1, 2), tnabla_with(Conn::Sym, x1.clone(), torsion(x2.clone(), x3.clone()))),
        (q(-1, 2), tnabla_with(Conn::Sym, x2.clone(), torsion(x1.clone(), x3.clone()))),
        (q(1, 4), torsion(x1.clone(), torsion(x2.clone(), x3.clone()))),
        (q(-1, 4), torsion(x2, torsion(x1, x3))),
    ])
}

/// The same relation with an additional `−½T(T(X,Y),Z)` on the right-hand
/// side; this form does not hold.
pub fn split14_with_extra_term<F: Scalar>() -> TensorTerm<F> {
    combo(vec![(F::one(), split14()), (q(1, 2), torsion(torsion(x(1), x(2)), x(3)))])
}

/// `∇Φ` against `∇̃Φ` plus torsion corrections, for a `(1,r)`-tensor.
pub fn split15<F: Scalar>(r: usize) -> Result<TensorTerm<F>> {
    if !(1..=3).contains(&r) {
        return Err(Error::InvalidInput(format!("splitting identity is provided for r in 1..=3, got {r}")));
    }
    let body = phi::<F>(r, 2);
    let mut terms = vec![
        (F::one(), tnabla(x(1), body.clone())),
        (-F::one(), tnabla_with(Conn::Sym, x(1), body.clone())),
        (q(-1, 2), plug(|s| torsion(x(1), s), body)),
    ];
    for t in phi_inner_sum(r, 2, |y| torsion(x(1), y)) {
        terms.push((q(1, 2), t));
    }
    Ok(combo(terms))
}

/// `R − R̃`, zero only for a torsion-free connection.
pub fn split14_torsion_free<F: Scalar>() -> TensorTerm<F> {
    combo(vec![
        (F::one(), curvature(x(1), x(2), x(3))),
        (-F::one(), curvature_with(Conn::Sym, x(1), x(2), x(3))),
    ])
}

/// Looks up a residual by name.
pub fn identity<F: Scalar>(name: &str) -> Result<Identity<F>> {
    let (residual, symmetric, expect_zero) = match name {
        "bianchi1" => (bianchi1(), false, true),
        "bianchi2" => (bianchi2(), false, true),
        "ricci1" => (ricci(1, true)?, false, true),
        "ricci2" => (ricci(2, true)?, false, true),
        "ricci3" => (ricci(3, true)?, false, true),
        "ricci-no-torsion" => (ricci(1, false)?, false, false),
        "split14" => (split14(), false, true),
        "split15-1" => (split15(1)?, false, true),
        "split15-2" => (split15(2)?, false, true),
        "split14-torsion-free" => (split14_torsion_free(), true, true),
        "split14-extra-term" => (split14_with_extra_term(), false, false),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown identity '{other}'; expected one of {}",
                IDENTITY_NAMES.join(", ")
            )))
        }
    };
    Ok(Identity { name: name.to_string(), residual, symmetric, expect_zero })
}
