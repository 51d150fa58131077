use std::collections::BTreeMap;

use natop::jet_calculus::ideal::{
    build_classical, build_ideal, classical_r, classical_t, deviation, ideal_t, leading_symbol, phi_term,
    verify_ideal_suite, aa_ideal, aa_naive, b3_naive,
};
use natop::jet_calculus::identities::identity;
use natop::jet_calculus::multilinear::{in_fl, in_frt, phi_map, psi_map, random_fl, random_frt, MultilinearMap};
use natop::jet_calculus::term::{
    combo, compose, curvature, permute, scalar_mul, tnabla, torsion, trace, vnabla, x, TensorTerm,
};
use natop::jet_calculus::{
    act_components, check_zero, eval, orders, JetContext, JetKind, JetPolynomial, JetVar, Monomial,
};
use natop::perm_algebra::symbols::{aa, r_symbol, t_symbol};
use natop::perm_algebra::{ENaughtElement, GroupAlgebraElement, Permutation};
use natop::scalar::{One, Scalar, Zero};
use natop::{Error, Q};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const M: usize = 2;

/// Polynomial in the chart coordinates `x^1..x^M`, exponent vector → coefficient.
#[derive(Clone, Debug, Default)]
struct Poly(BTreeMap<[u8; M], Q>);

impl Poly {
    fn constant(c: Q) -> Self {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.0.insert([0; M], c);
        }
        p
    }

    fn random(rng: &mut ChaCha8Rng) -> Self {
        let mut p = Poly::default();
        for a in 0..=2u8 {
            for b in 0..=(2 - a) {
                let c: i64 = rng.gen_range(-3..=3);
                if c != 0 {
                    p.0.insert([a, b], Q::int(c));
                }
            }
        }
        p
    }

    fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.0 {
            let v = out.0.remove(e).unwrap_or_else(Q::zero) + c.clone();
            if !v.is_zero() {
                out.0.insert(*e, v);
            }
        }
        out
    }

    fn scale(&self, s: &Q) -> Poly {
        Poly(self.0.iter().filter(|_| !s.is_zero()).map(|(e, c)| (*e, c.clone() * s.clone())).collect())
    }

    fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&Q::int(-1)))
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::default();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &o.0 {
                let mut e = [0u8; M];
                for k in 0..M {
                    e[k] = e1[k] + e2[k];
                }
                out = out.add(&Poly([(e, c1.clone() * c2.clone())].into_iter().collect()));
            }
        }
        out
    }

    fn deriv(&self, k: usize) -> Poly {
        let mut out = Poly::default();
        for (e, c) in &self.0 {
            if e[k] > 0 {
                let mut f = *e;
                f[k] -= 1;
                out = out.add(&Poly([(f, c.clone() * Q::int(e[k] as i64))].into_iter().collect()));
            }
        }
        out
    }

    fn at_origin(&self) -> Q {
        self.0.get(&[0; M]).cloned().unwrap_or_else(Q::zero)
    }

    /// `∂^α p (0)`.
    fn jet(&self, alpha: &[u8]) -> Q {
        let mut p = self.clone();
        for (k, &a) in alpha.iter().enumerate().take(M) {
            for _ in 0..a {
                p = p.deriv(k);
            }
        }
        p.at_origin()
    }
}

type Field = Vec<Poly>;

/// A connection and vector fields given by explicit polynomials.
struct Model {
    gamma: Vec<Vec<Vec<Poly>>>,
    fields: Vec<Field>,
}

impl Model {
    fn random(seed: u64, slots: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gamma = (0..M).map(|_| (0..M).map(|_| (0..M).map(|_| Poly::random(&mut rng)).collect()).collect()).collect();
        let fields = (0..=slots).map(|_| (0..M).map(|_| Poly::random(&mut rng)).collect()).collect();
        Self { gamma, fields }
    }

    fn field(&self, slot: usize) -> Field {
        self.fields[slot].clone()
    }

    fn nabla(&self, a: &Field, b: &Field) -> Field {
        (0..M)
            .map(|w| {
                let mut acc = Poly::default();
                for mu in 0..M {
                    let mut inner = b[w].deriv(mu);
                    for nu in 0..M {
                        inner = inner.add(&self.gamma[w][mu][nu].mul(&b[nu]));
                    }
                    acc = acc.add(&a[mu].mul(&inner));
                }
                acc
            })
            .collect()
    }

    fn bracket(&self, a: &Field, b: &Field) -> Field {
        (0..M)
            .map(|w| {
                let mut acc = Poly::default();
                for mu in 0..M {
                    acc = acc.add(&a[mu].mul(&b[w].deriv(mu))).sub(&b[mu].mul(&a[w].deriv(mu)));
                }
                acc
            })
            .collect()
    }

    fn torsion(&self, a: &Field, b: &Field) -> Field {
        (0..M)
            .map(|w| {
                let mut acc = Poly::default();
                for mu in 0..M {
                    for nu in 0..M {
                        let g = self.gamma[w][mu][nu].sub(&self.gamma[w][nu][mu]);
                        acc = acc.add(&g.mul(&a[mu]).mul(&b[nu]));
                    }
                }
                acc
            })
            .collect()
    }

    /// `R(a,b)c = ∇_{[a,b]}c − ∇_a∇_b c + ∇_b∇_a c`.
    fn curvature(&self, a: &Field, b: &Field, c: &Field) -> Field {
        let first = self.nabla(&self.bracket(a, b), c);
        let second = self.nabla(a, &self.nabla(b, c));
        let third = self.nabla(b, &self.nabla(a, c));
        (0..M).map(|w| first[w].sub(&second[w]).add(&third[w])).collect()
    }

    /// `(∇_a T)(b, c)`.
    fn nabla_torsion(&self, a: &Field, b: &Field, c: &Field) -> Field {
        let whole = self.nabla(a, &self.torsion(b, c));
        let left = self.torsion(&self.nabla(a, b), c);
        let right = self.torsion(b, &self.nabla(a, c));
        (0..M).map(|w| whole[w].sub(&left[w]).sub(&right[w])).collect()
    }

    fn value(&self, v: JetVar) -> Q {
        let alpha = v.alpha();
        match v.kind() {
            JetKind::Christoffel => {
                let l = v.lower();
                self.gamma[v.omega()][l[0]][l[1]].jet(&alpha)
            }
            JetKind::Field => self.fields[v.id()][v.omega()].jet(&alpha),
            JetKind::Tensor => panic!("no generic tensors in this model"),
        }
    }

    fn evaluate(&self, comps: &[JetPolynomial<Q>]) -> Vec<Q> {
        comps.iter().map(|p| p.evaluate(&mut |v| self.value(v))).collect()
    }
}

fn at_origin(f: &Field) -> Vec<Q> {
    f.iter().map(Poly::at_origin).collect()
}

fn ctx() -> JetContext {
    JetContext::new(M)
}

fn is_zero(t: &TensorTerm<Q>, m: usize) -> bool {
    check_zero(t, &JetContext::new(m)).unwrap().is_zero()
}

#[test]
fn curvature_matches_direct_formula() {
    let comps = eval(&curvature::<Q>(x(1), x(2), x(3)), &ctx()).unwrap();
    for seed in 0..4 {
        let model = Model::random(seed, 3);
        let want = model.curvature(&model.field(1), &model.field(2), &model.field(3));
        assert_eq!(model.evaluate(&comps), at_origin(&want), "seed {seed}");
    }
}

#[test]
fn torsion_and_its_derivative_match_direct_formula() {
    let t = eval(&torsion::<Q>(x(1), x(2)), &ctx()).unwrap();
    let dt = eval(&tnabla::<Q>(x(1), torsion(x(2), x(3))), &ctx()).unwrap();
    for seed in 10..13 {
        let m = Model::random(seed, 3);
        let (a, b, c) = (m.field(1), m.field(2), m.field(3));
        assert_eq!(m.evaluate(&t), at_origin(&m.torsion(&a, &b)));
        assert_eq!(m.evaluate(&dt), at_origin(&m.nabla_torsion(&a, &b, &c)));
    }
}

#[test]
fn torsion_on_frame_fields() {
    for seed in 20..22 {
        let mut model = Model::random(seed, 2);
        for mu in 0..M {
            for nu in 0..M {
                model.fields[1] = (0..M).map(|k| Poly::constant(if k == mu { Q::one() } else { Q::zero() })).collect();
                model.fields[2] = (0..M).map(|k| Poly::constant(if k == nu { Q::one() } else { Q::zero() })).collect();
                let got = model.evaluate(&eval(&torsion::<Q>(x(1), x(2)), &ctx()).unwrap());
                let want: Vec<Q> =
                    (0..M).map(|w| model.gamma[w][mu][nu].at_origin() - model.gamma[w][nu][mu].at_origin()).collect();
                assert_eq!(got, want);
            }
        }
    }
}

fn drop_christoffel(comps: Vec<JetPolynomial<Q>>) -> Vec<JetPolynomial<Q>> {
    comps
        .iter()
        .map(|p| p.filter(|mono| mono.vars().iter().all(|v| v.kind() != JetKind::Christoffel)))
        .collect()
}

#[test]
fn flat_derivative_is_directional() {
    let got = drop_christoffel(eval(&vnabla::<Q>(x(1), x(2)), &ctx()).unwrap());
    let zero = [0u8; 8];
    for (w, poly) in got.iter().enumerate() {
        let want = JetPolynomial::from_terms((0..M).map(|mu| {
            let mut e = zero;
            e[mu] = 1;
            (Monomial::var(JetVar::field(1, mu, &zero)).mul(&Monomial::var(JetVar::field(2, w, &e))), Q::one())
        }));
        assert_eq!(poly, &want);
    }
}

#[test]
fn flat_degeneration() {
    for t in [curvature::<Q>(x(1), x(2), x(3)), torsion(x(1), x(2))] {
        assert!(drop_christoffel(eval(&t, &ctx()).unwrap()).iter().all(JetPolynomial::is_empty));
    }
}

#[test]
fn orders_examples() {
    assert_eq!(orders(&torsion::<Q>(x(1), x(2)), &ctx()).unwrap(), (0, 0));
    assert_eq!(orders(&vnabla::<Q>(x(1), x(2)), &ctx()).unwrap(), (1, 0));
    assert_eq!(orders(&curvature::<Q>(x(1), x(2), x(3)), &ctx()).unwrap(), (0, 1));
}

#[test]
fn truncation_too_small_is_rejected() {
    let t = tnabla::<Q>(x(1), curvature(x(2), x(3), x(4)));
    match eval(&t, &ctx().with_k(0)) {
        Err(Error::TruncationTooSmall { required, .. }) => assert!(required > 0),
        other => panic!("expected a truncation error, got {other:?}"),
    }
}

fn holds(name: &str, m: usize) -> bool {
    let id = identity::<Q>(name).unwrap();
    let ctx = JetContext { symmetric: id.symmetric, ..JetContext::new(m) };
    check_zero(&id.residual, &ctx).unwrap().is_zero()
}

#[test]
fn classical_identities() {
    for m in [2, 3] {
        assert!(holds("bianchi1", m));
    }
    assert!(holds("bianchi2", 2));
    assert!(holds("ricci1", 2));
    assert!(holds("ricci2", 3));
    assert!(!holds("ricci-no-torsion", 2));
    assert!(holds("split14", 2));
    assert!(holds("split15-1", 3));
    assert!(holds("split14-torsion-free", 2));
    assert!(!holds("split14-extra-term", 3));
}

#[test]
fn negative_control_has_a_witness() {
    let v = aa_naive::<Q>(&JetContext::new(3)).unwrap();
    assert!(v.witness().is_some_and(|w| w.contains('G')), "{v}");
    assert!(aa_ideal::<Q>(&JetContext::new(3)).unwrap().is_zero());
}

#[test]
fn naive_curvature_derivative_fails_b3() {
    assert!(!b3_naive::<Q>(&JetContext::new(3)).unwrap().is_zero());
}

fn symbol(g: GroupAlgebraElement<Q>) -> ENaughtElement<Q> {
    ENaughtElement::from_group_algebra(&g).unwrap()
}

#[test]
fn classical_leading_symbols() {
    let (r2, t2) = build_classical::<Q>(2).unwrap();
    assert!(r2.is_none());
    assert_eq!(leading_symbol(&t2, 2).unwrap(), symbol(t_symbol(2).unwrap()));
    let (r3, t3) = build_classical::<Q>(3).unwrap();
    assert_eq!(leading_symbol(&r3.unwrap(), 3).unwrap(), symbol(r_symbol(3).unwrap()));
    assert_eq!(leading_symbol(&t3, 3).unwrap(), symbol(t_symbol(3).unwrap()));
    assert!(build_classical::<Q>(1).is_err());
}

#[test]
fn ideal_tensors() {
    let i3 = build_ideal::<Q>(3).unwrap();
    let want = combo(vec![
        (Q::one(), tnabla(x(1), torsion(x(2), x(3)))),
        (-Q::one(), torsion(x(1), torsion(x(2), x(3)))),
    ]);
    assert!(is_zero(&i3.t.clone().minus(want), 2));
    let i2 = build_ideal::<Q>(2).unwrap();
    assert!(is_zero(&i2.l.minus(torsion(x(1), x(2))), 2));
    // Φ(iL₃) recovers (iR₃, iT₃)
    let (r, t) = phi_term(3, &i3.l).unwrap();
    assert!(is_zero(&r.minus(i3.r.clone().unwrap()), 2));
    assert!(is_zero(&t.minus(i3.t), 2));
    assert!(build_ideal::<Q>(5).is_err());
}

#[test]
fn ideal_suites() {
    for (n, m) in [(3, 2), (3, 3), (4, 2)] {
        let report = verify_ideal_suite::<Q>(n, &JetContext::new(m)).unwrap();
        assert!(!report.is_empty());
        for (k, v) in &report {
            assert!(v.is_zero(), "n={n} m={m} {k}: {v}");
        }
    }
}

#[test]
fn trace_of_derivative_times_slot() {
    let term = scalar_mul(trace(vnabla::<Q>(x(7), x(1)), 7).unwrap(), x(2));
    let comps = eval(&term, &ctx()).unwrap();
    for seed in 30..33 {
        let m = Model::random(seed, 2);
        let y = m.field(1);
        let mut tr = Poly::default();
        for mu in 0..M {
            let mut e: Field = vec![Poly::default(); M];
            e[mu] = Poly::constant(Q::one());
            tr = tr.add(&m.nabla(&e, &y)[mu]);
        }
        let want: Vec<Q> = m.field(2).iter().map(|p| tr.mul(p).at_origin()).collect();
        assert_eq!(m.evaluate(&comps), want);
    }
}

#[test]
fn compose_substitutes() {
    let got = compose(torsion::<Q>(x(9), x(2)), 9, torsion(x(1), x(3))).unwrap();
    let want = torsion(torsion(x(1), x(3)), x(2));
    assert_eq!(eval(&got, &ctx()).unwrap(), eval(&want, &ctx()).unwrap());
}

#[test]
fn order_zero_violations() {
    assert!(matches!(trace(vnabla::<Q>(x(1), x(7)), 7), Err(Error::OrderZeroViolation { slot: 7 })));
    assert!(matches!(compose(vnabla::<Q>(x(1), x(7)), 7, x(2)), Err(Error::OrderZeroViolation { slot: 7 })));
}

#[test]
fn trace_commutes_with_composition() {
    // O′ = R(X_11, X_1)X_3, O″ = ∇_{X_12} X_2
    let o1 = curvature::<Q>(x(11), x(1), x(3));
    let o2 = vnabla::<Q>(x(12), x(2));
    let lhs = trace(compose(o1.clone(), 11, o2.clone()).unwrap(), 12).unwrap();
    let rhs = trace(compose(o2, 12, o1).unwrap(), 11).unwrap();
    let ctx = JetContext::new(3);
    assert_eq!(eval(&lhs, &ctx).unwrap(), eval(&rhs, &ctx).unwrap());
}

#[test]
fn composition_is_associative() {
    let a = torsion::<Q>(x(11), x(1));
    let b = curvature::<Q>(x(2), x(12), x(3));
    let c = vnabla::<Q>(x(4), x(5));
    let left = compose(compose(a.clone(), 11, b.clone()).unwrap(), 12, c.clone()).unwrap();
    let right = compose(a, 11, compose(b, 12, c).unwrap()).unwrap();
    let ctx = JetContext::new(2);
    assert_eq!(eval(&left, &ctx).unwrap(), eval(&right, &ctx).unwrap());
}

#[test]
fn deviation_examples() {
    let ctx = JetContext::new(2);
    let id3 = GroupAlgebraElement::<Q>::identity(3);
    let sym23 = id3.add(&GroupAlgebraElement::basis(Permutation::transposition(3, 2, 3))).unwrap();
    let d = deviation(&[(t_symbol(3).unwrap(), ideal_t::<Q>(3).unwrap())], &sym23, &ctx).unwrap();
    assert!(d.verdict.is_zero());

    let parts = [(r_symbol(3).unwrap(), classical_r::<Q>(3).unwrap()), (t_symbol(3).unwrap(), classical_t::<Q>(3).unwrap())];
    let d = deviation(&parts, &aa(3), &JetContext::new(3)).unwrap();
    assert!(!d.verdict.is_zero());
    assert_eq!((d.vf_order, d.c_order), (0, 0));

    let id2 = GroupAlgebraElement::<Q>::identity(2);
    let sym12 = id2.add(&GroupAlgebraElement::basis(Permutation::transposition(2, 1, 2))).unwrap();
    let d = deviation(&[(t_symbol(2).unwrap(), classical_t::<Q>(2).unwrap())], &sym12, &ctx).unwrap();
    assert!(d.verdict.is_zero());
    assert!(matches!(
        deviation(&[(t_symbol(2).unwrap(), classical_t::<Q>(2).unwrap())], &id2, &ctx),
        Err(Error::NotQuasiSymmetry)
    ));
}

#[test]
fn lemma_round_trips() {
    for n in 3..=5 {
        for dx in 2..=3 {
            for seed in 0..5 {
                let l = random_fl::<Q>(n, dx, 1, seed).unwrap();
                assert!(in_fl(&l).unwrap());
                let (r, t) = phi_map(&l).unwrap();
                assert!(in_frt(&r, &t).unwrap());
                assert_eq!(psi_map(&r, &t).unwrap(), l, "n={n} dx={dx} seed={seed}");

                let (r, t) = random_frt::<Q>(n, dx, 1, seed).unwrap();
                assert!(in_frt(&r, &t).unwrap());
                let l = psi_map(&r, &t).unwrap();
                assert!(in_fl(&l).unwrap());
                assert_eq!(phi_map(&l).unwrap(), (r, t), "n={n} dx={dx} seed={seed}");
            }
        }
    }
}

#[test]
fn lemma_on_zero_and_small_arity() {
    let z = MultilinearMap::<Q>::zero(3, 2, 1);
    let (r, t) = phi_map(&z).unwrap();
    assert!(r.is_zero() && t.is_zero());
    assert!(phi_map(&MultilinearMap::<Q>::zero(2, 2, 1)).is_err());
}

fn base_terms() -> Vec<TensorTerm<Q>> {
    vec![
        curvature(x(1), x(2), x(3)),
        tnabla(x(1), torsion(x(2), x(3))),
        vnabla(x(1), torsion(x(2), x(3))),
        torsion(torsion(x(1), x(2)), x(3)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eval_is_multilinear(which in 0usize..4, slot in 1usize..=3, c in -3i64..=3) {
        let t = base_terms().swap_remove(which);
        prop_assume!(t.is_tensorial_in(slot));
        // X_slot ↦ c·X_slot + X_4
        let split = combo(vec![(Q::int(c), x(slot)), (Q::one(), x(4))]);
        let k = t.fresh_slot();
        let lhs = compose(t.relabel(&|s| if s == slot { k } else { s }), k, split).unwrap();
        let rhs = combo(vec![(Q::int(c), t.clone()), (Q::one(), t.relabel(&|s| if s == slot { 4 } else { s }))]);
        prop_assert!(check_zero(&lhs.minus(rhs), &JetContext::new(2)).unwrap().is_zero());
    }

    #[test]
    fn permute_relabels_slots(which in 0usize..4, i in 0usize..6) {
        let t = base_terms().swap_remove(which);
        let p = Permutation::all(3).swap_remove(i);
        let ctx = JetContext::new(2);
        let direct = eval(&permute(t.clone(), p.clone()), &ctx).unwrap();
        let relabeled = act_components(&eval(&t, &ctx).unwrap(), &GroupAlgebraElement::basis(p));
        prop_assert_eq!(direct, relabeled);
    }
}
