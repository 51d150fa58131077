//! Exact arithmetic in `F[Σ_n]` and in the induced module `E⁰(n)` of
//! leading symbols of `∂^{n-2}Γ`, its symbol map `ϑ` onto the trivial
//! module, the kernel `Kr(n)`, and generator checks.
//!
//! `E⁰(n)` is realized on the right cosets `Σ_{n-2}\Σ_n` with the
//! transversal `Σ'_n` (first `n-2` images increasing). A representative
//! `σ` stands for the jet monomial in which derivative/lower-index position
//! `k` is contracted with slot `σ(k)`.

mod enaught;
mod group_algebra;
mod permutation;
pub mod symbols;

use std::collections::BTreeMap;

use rayon::prelude::*;

pub use enaught::{normalize, ENaughtElement, ENaughtJson, TermJson, Transversal};
pub use group_algebra::GroupAlgebraElement;
pub use permutation::Permutation;
pub use symbols::{GeneratorFamily, SymmetryTag};

use crate::error::{Error, Result};
use crate::linalg::{sparse_rank, SparseVec};
use crate::scalar::Scalar;

/// `e·p`: the basis vector at `σ` goes to the class of `σ * p`.
pub fn right_action<F: Scalar>(e: &ENaughtElement<F>, p: &Permutation) -> Result<ENaughtElement<F>> {
    if e.degree() != p.degree() {
        return Err(Error::DegreeMismatch { expected: e.degree(), got: p.degree() });
    }
    let mut out = ENaughtElement::zero(e.degree())?;
    for (s, c) in e.terms() {
        out.add_term(&s.then(p), c.clone());
    }
    Ok(out)
}

/// Right action of a group-ring element.
pub fn right_action_ga<F: Scalar>(
    e: &ENaughtElement<F>,
    s: &GroupAlgebraElement<F>,
) -> Result<ENaughtElement<F>> {
    let mut out = ENaughtElement::zero(e.degree())?;
    for (p, c) in s.terms() {
        out = out.add(&right_action(e, p)?.scale(c))?;
    }
    Ok(out)
}

/// `ϑ(e) = −Σ coefficients`: every basis vector maps to `−1`.
pub fn theta<F: Scalar>(e: &ENaughtElement<F>) -> F {
    -e.coefficient_sum()
}

/// Basis of `Kr(n) = ker ϑ`: `e_{σ₀} − e_σ` for `σ ≠ σ₀`, where `σ₀` is the
/// first transversal element (the identity). For `n = 2` this is `t₂`.
pub fn kernel_basis<F: Scalar>(n: usize) -> Result<Vec<ENaughtElement<F>>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("Kr(n) needs n >= 2, got {n}")));
    }
    let t = Transversal::get(n);
    let first = &t.reps[0];
    t.reps[1..]
        .iter()
        .map(|s| {
            let mut e = ENaughtElement::basis(first)?;
            e.add_term(s, -F::one());
            Ok(e)
        })
        .collect()
}

/// Coordinates of a kernel element in [`kernel_basis`].
pub fn kernel_coordinates<F: Scalar>(e: &ENaughtElement<F>) -> Result<Vec<F>> {
    if !theta(e).is_zero() {
        return Err(Error::InvalidInput("element is not in the kernel of theta".into()));
    }
    let dense = e.to_dense();
    Ok(dense[1..].iter().map(|c| -c.clone()).collect())
}

/// Rank of the `Σ_n`-submodule generated by `gens`.
pub fn submodule_rank<F: Scalar>(gens: &[ENaughtElement<F>]) -> Result<usize> {
    let Some(first) = gens.first() else {
        return Ok(0);
    };
    let n = first.degree();
    if let Some(bad) = gens.iter().find(|g| g.degree() != n) {
        return Err(Error::DegreeMismatch { expected: n, got: bad.degree() });
    }
    let perms = Permutation::all(n);
    let rows: Vec<SparseVec<F>> = gens
        .par_iter()
        .flat_map_iter(|g| {
            perms
                .iter()
                .map(move |p| right_action(g, p).expect("degrees checked").to_sparse())
        })
        .collect();
    Ok(sparse_rank(rows))
}

/// True iff the members all lie in `Kr(n)` and generate it.
pub fn generates_kernel<F: Scalar>(gens: &[ENaughtElement<F>]) -> Result<bool> {
    let Some(first) = gens.first() else {
        return Ok(false);
    };
    let n = first.degree();
    if gens.iter().any(|g| !theta(g).is_zero()) {
        return Ok(false);
    }
    Ok(submodule_rank(gens)? == n * (n - 1) - 1)
}

/// The tie between curvature and torsion symbols: the cyclic sum over the
/// last three slots of `r_n + t_n` vanishes in `E⁰(n)`.
pub fn check_relation_eq3<F: Scalar>(n: usize) -> Result<bool> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("the curvature symbol needs n >= 3, got {n}")));
    }
    let sum = symbols::r_symbol::<F>(n)?.add(&symbols::t_symbol(n)?)?;
    let e = ENaughtElement::from_group_algebra(&sum)?;
    Ok(right_action_ga(&e, &symbols::aa(n))?.is_zero())
}

/// Outcome of a quasi-symmetry test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuasiSymmetry {
    /// `(Σ α_σ σ)·𝔖 = 0` in the group ring.
    pub group_ring: bool,
    /// The right action of `𝔖` kills the image in `E⁰(n)`.
    pub module: bool,
}

/// Both readings of "𝔖 is a quasi-symmetry of α". The group-ring reading
/// implies the module reading.
pub fn quasi_symmetry_check<F: Scalar>(
    alpha: &GroupAlgebraElement<F>,
    s: &GroupAlgebraElement<F>,
) -> Result<QuasiSymmetry> {
    let product = alpha.mul(s)?;
    let module = if alpha.degree() >= 2 {
        right_action_ga(&ENaughtElement::from_group_algebra(alpha)?, s)?.is_zero()
    } else {
        product.is_zero()
    };
    Ok(QuasiSymmetry { group_ring: product.is_zero(), module })
}

/// Same as [`quasi_symmetry_check`] with the symbol given in `E⁰(n)`,
/// lifted to the transversal.
pub fn quasi_symmetry_check_enaught<F: Scalar>(
    alpha: &ENaughtElement<F>,
    s: &GroupAlgebraElement<F>,
) -> Result<QuasiSymmetry> {
    quasi_symmetry_check(&alpha.to_group_algebra(), s)
}

/// Verifies each listed slot symmetry of the family's symbols as a
/// right-action identity in `E⁰(n)`. Keys are tag names.
pub fn check_symmetry_tags<F: Scalar>(
    family: &GeneratorFamily<F>,
    n: usize,
) -> Result<BTreeMap<String, bool>> {
    let mut report = BTreeMap::new();
    let mut run = |symbol: &GroupAlgebraElement<F>, tags: Vec<SymmetryTag<F>>| -> Result<()> {
        let e = ENaughtElement::from_group_algebra(symbol)?;
        for tag in tags {
            let mut ok = true;
            for el in &tag.elements {
                ok &= right_action_ga(&e, el)?.is_zero();
            }
            report.insert(tag.name.to_string(), ok);
        }
        Ok(())
    };
    match family {
        GeneratorFamily::Classical => {
            if n >= 3 {
                run(&symbols::r_symbol(n)?, symbols::r_tags(n))?;
            }
            run(&symbols::t_symbol(n)?, symbols::t_tags(n))?;
        }
        GeneratorFamily::Canonical => run(&symbols::l_symbol(n)?, symbols::l_tags(n))?,
        GeneratorFamily::Custom(_) => {}
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;
    use crate::scalar::{Scalar, Zero};

    fn e(images: &[usize]) -> ENaughtElement<Q> {
        ENaughtElement::basis(&Permutation::new(images).unwrap()).unwrap()
    }

    #[test]
    fn regular_representation_at_two() {
        let out = right_action(&e(&[1, 2]), &Permutation::transposition(2, 1, 2)).unwrap();
        assert_eq!(out, e(&[2, 1]));
    }

    #[test]
    fn identity_acts_trivially() {
        let mut x = e(&[1, 3, 2]);
        x.add_term(&Permutation::new(&[2, 1, 3]).unwrap(), Q::frac(-3, 7));
        assert_eq!(right_action(&x, &Permutation::identity(3)).unwrap(), x);
    }

    #[test]
    fn degree_mismatch_rejected() {
        assert!(right_action(&e(&[1, 2]), &Permutation::identity(3)).is_err());
    }

    #[test]
    fn coset_normalization_at_four() {
        // oracle: search all 24 permutations for the member of the coset of
        // σ*p whose first two images increase
        let sigma = Permutation::new(&[1, 2, 4, 3]).unwrap();
        let p = Permutation::transposition(4, 1, 2);
        let target = sigma.then(&p);
        let expected: Vec<Permutation> = Permutation::all(4)
            .into_iter()
            .filter(|c| c.image(1) < c.image(2))
            .filter(|c| c.image(3) == target.image(3) && c.image(4) == target.image(4))
            .collect();
        assert_eq!(expected.len(), 1);
        let out = right_action(&ENaughtElement::<Q>::basis(&sigma).unwrap(), &p).unwrap();
        assert_eq!(out, ENaughtElement::basis(&expected[0]).unwrap());
        assert_eq!(expected[0], sigma);
    }

    #[test]
    fn theta_examples() {
        let t2 = ENaughtElement::from_group_algebra(&symbols::t_symbol::<Q>(2).unwrap()).unwrap();
        assert!(theta(&t2).is_zero());
        assert!(theta(&ENaughtElement::<Q>::zero(3).unwrap()).is_zero());
        let ones = ENaughtElement::<Q>::from_dense(3, &vec![Q::int(1); 6]).unwrap();
        assert_eq!(theta(&ones), Q::int(-6));
    }

    #[test]
    fn kernel_dimensions() {
        assert!(kernel_basis::<Q>(1).is_err());
        for (n, d) in [(2, 1), (3, 5), (4, 11)] {
            let b = kernel_basis::<Q>(n).unwrap();
            assert_eq!(b.len(), d);
            assert!(b.iter().all(|v| theta(v).is_zero()));
            let rows: Vec<_> = b.iter().map(|v| v.to_sparse()).collect();
            assert_eq!(sparse_rank(rows), d);
        }
    }

    #[test]
    fn kernel_coordinates_reconstruct() {
        let l = ENaughtElement::from_group_algebra(&symbols::l_symbol::<Q>(4).unwrap()).unwrap();
        let c = kernel_coordinates(&l).unwrap();
        let basis = kernel_basis::<Q>(4).unwrap();
        let mut acc = ENaughtElement::zero(4).unwrap();
        for (b, x) in basis.iter().zip(&c) {
            acc = acc.add(&b.scale(x)).unwrap();
        }
        assert_eq!(acc, l);
        assert!(kernel_coordinates(&e(&[1, 2, 3])).is_err());
    }

    #[test]
    fn generator_ranks() {
        let fam = GeneratorFamily::<Q>::Classical;
        assert_eq!(submodule_rank(&fam.symbols(3).unwrap()).unwrap(), 5);
        let canon = GeneratorFamily::<Q>::Canonical;
        assert_eq!(submodule_rank(&canon.symbols(4).unwrap()).unwrap(), 11);
    }

    #[test]
    fn t3_alone_has_rank_three() {
        // oracle: right ideal of (id − (23)) inside the regular
        // representation of Σ_3, spanned by brute force over all products
        let t = symbols::t_symbol::<Q>(3).unwrap();
        let all = Permutation::all(3);
        let rows: Vec<Vec<Q>> = all
            .iter()
            .map(|p| {
                let prod = t.mul(&GroupAlgebraElement::basis(p.clone())).unwrap();
                all.iter().map(|q| prod.coeff(q)).collect()
            })
            .collect();
        let oracle = crate::linalg::rank(&rows);
        assert_eq!(oracle, 3);
        let sym = ENaughtElement::from_group_algebra(&t).unwrap();
        assert_eq!(submodule_rank(&[sym]).unwrap(), oracle);
    }

    #[test]
    fn mixed_degrees_rejected() {
        let a = ENaughtElement::from_group_algebra(&symbols::t_symbol::<Q>(2).unwrap()).unwrap();
        let b = ENaughtElement::from_group_algebra(&symbols::t_symbol::<Q>(3).unwrap()).unwrap();
        assert!(submodule_rank(&[a, b]).is_err());
    }

    #[test]
    fn relation_eq3() {
        assert!(check_relation_eq3::<Q>(3).unwrap());
        assert!(check_relation_eq3::<Q>(4).unwrap());
        assert!(check_relation_eq3::<Q>(2).is_err());
    }

    #[test]
    fn quasi_symmetry_examples() {
        let id = GroupAlgebraElement::<Q>::identity(2);
        let sym = id.add(&GroupAlgebraElement::basis(Permutation::transposition(2, 1, 2))).unwrap();
        let t2 = symbols::t_symbol::<Q>(2).unwrap();
        assert!(quasi_symmetry_check(&t2, &sym).unwrap().group_ring);
        assert!(!quasi_symmetry_check(&t2, &id).unwrap().group_ring);

        // brute-force group-ring product for r_3 against the slot-(1 2) symmetrizer
        let r3 = symbols::r_symbol::<Q>(3).unwrap();
        let s = GroupAlgebraElement::<Q>::identity(3)
            .add(&GroupAlgebraElement::basis(Permutation::transposition(3, 1, 2)))
            .unwrap();
        let mut brute = std::collections::BTreeMap::<Permutation, Q>::new();
        for (a, x) in r3.terms() {
            for (b, y) in s.terms() {
                let k = a.then(b);
                let v = brute.entry(k).or_insert_with(|| Q::int(0));
                *v += x.clone() * y.clone();
            }
        }
        assert!(brute.values().all(|v| v.is_zero()));
        let q = quasi_symmetry_check(&r3, &s).unwrap();
        assert!(q.group_ring && q.module);
    }

    #[test]
    fn module_reading_is_weaker() {
        // at n = 3 the first slot is a derivative slot with trivial
        // normalization, so use n = 4 where Σ_2 on slots 1,2 is absorbed
        let id = GroupAlgebraElement::<Q>::identity(4);
        let s = id.sub(&GroupAlgebraElement::basis(Permutation::transposition(4, 1, 2))).unwrap();
        let q = quasi_symmetry_check(&id, &s).unwrap();
        assert!(!q.group_ring);
        assert!(q.module);
    }

    #[test]
    fn symmetry_tags() {
        let c4 = check_symmetry_tags(&GeneratorFamily::<Q>::Classical, 4).unwrap();
        for tag in ["s1", "s3", "s4", "t1", "t2"] {
            assert_eq!(c4.get(tag), Some(&true), "{tag}");
        }
        let l4 = check_symmetry_tags(&GeneratorFamily::<Q>::Canonical, 4).unwrap();
        for tag in ["l1", "l2", "l3", "l4"] {
            assert_eq!(l4.get(tag), Some(&true), "{tag}");
        }
        let l2 = check_symmetry_tags(&GeneratorFamily::<Q>::Canonical, 2).unwrap();
        assert_eq!(l2.len(), 1);
        assert_eq!(l2.get("l1"), Some(&true));
    }
}
