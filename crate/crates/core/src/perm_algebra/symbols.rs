//! Leading symbols of the classical and canonical generators, and the slot
//! symmetries they (and the ideal operators) satisfy, all written as
//! group-ring elements acting on argument slots from the right.

use crate::error::{Error, Result};
use crate::perm_algebra::{ENaughtElement, GroupAlgebraElement, Permutation};
use crate::scalar::Scalar;

fn ga<F: Scalar>(p: Permutation) -> GroupAlgebraElement<F> {
    GroupAlgebraElement::basis(p)
}

/// Symbol of `∇^{n-2} T`: `id − (n-1 n)`.
pub fn t_symbol<F: Scalar>(n: usize) -> Result<GroupAlgebraElement<F>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("t_n needs n >= 2, got {n}")));
    }
    GroupAlgebraElement::identity(n).sub(&ga(Permutation::transposition(n, n - 1, n)))
}

/// Symbol of `∇^{n-3} R`: `(n-2 n-1) − id`.
pub fn r_symbol<F: Scalar>(n: usize) -> Result<GroupAlgebraElement<F>> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("r_n needs n >= 3, got {n}")));
    }
    ga(Permutation::transposition(n, n - 2, n - 1)).sub(&GroupAlgebraElement::identity(n))
}

/// Canonical generator: `l_2 = t_2`, and for `n ≥ 3`
/// `6·id − Σ_ω ω` over all permutations `ω` of the last three slots.
pub fn l_symbol<F: Scalar>(n: usize) -> Result<GroupAlgebraElement<F>> {
    match n {
        0 | 1 => Err(Error::InvalidInput(format!("l_n needs n >= 2, got {n}"))),
        2 => t_symbol(2),
        _ => {
            let six = GroupAlgebraElement::identity(n).scale(&F::int(6));
            six.sub(&GroupAlgebraElement::sum_of(n, last_three(n, |_| true)))
        }
    }
}

fn last_three(n: usize, keep: impl Fn(&Permutation) -> bool) -> Vec<Permutation> {
    Permutation::all(3)
        .into_iter()
        .filter(|p| keep(p))
        .map(|p| Permutation::on_points(n, &[n - 2, n - 1, n], &p))
        .collect()
}

fn cyclic_on<F: Scalar>(n: usize, points: [usize; 3]) -> GroupAlgebraElement<F> {
    GroupAlgebraElement::sum_of(
        n,
        [
            Permutation::identity(n),
            Permutation::cycle(n, &points),
            Permutation::cycle(n, &[points[0], points[2], points[1]]),
        ],
    )
}

/// `id − τ` for the adjacent transpositions generating `Σ` on `1..=last`.
fn total_symmetry<F: Scalar>(n: usize, last: usize) -> Vec<GroupAlgebraElement<F>> {
    Permutation::adjacent_transpositions(n, 1, last)
        .into_iter()
        .map(|t| GroupAlgebraElement::identity(n).sub(&ga(t)).unwrap())
        .collect()
}

/// A named symmetry: the operator `D` has it iff `D·e = 0` for each
/// element `e`. An empty element list is a vacuous symmetry.
#[derive(Debug, Clone)]
pub struct SymmetryTag<F: Scalar> {
    pub name: &'static str,
    pub elements: Vec<GroupAlgebraElement<F>>,
}

/// Antisymmetry in `X_{n-2}, X_{n-1}` (`s1` / `b1`).
pub fn b1<F: Scalar>(n: usize) -> GroupAlgebraElement<F> {
    GroupAlgebraElement::identity(n).add(&ga(Permutation::transposition(n, n - 2, n - 1))).unwrap()
}

/// Cyclic sum over `X_{n-3}, X_{n-2}, X_{n-1}` (`s3` / `b3`), `n ≥ 4`.
pub fn b3<F: Scalar>(n: usize) -> GroupAlgebraElement<F> {
    cyclic_on(n, [n - 3, n - 2, n - 1])
}

/// Total symmetry in `X_1..X_{n-3}` (`s4` / `b4`).
pub fn b4<F: Scalar>(n: usize) -> Vec<GroupAlgebraElement<F>> {
    total_symmetry(n, n.saturating_sub(3))
}

/// Antisymmetry in the last two slots.
pub fn t1<F: Scalar>(n: usize) -> GroupAlgebraElement<F> {
    GroupAlgebraElement::identity(n).add(&ga(Permutation::transposition(n, n - 1, n))).unwrap()
}

/// Total symmetry in `X_1..X_{n-2}`.
pub fn t2<F: Scalar>(n: usize) -> Vec<GroupAlgebraElement<F>> {
    total_symmetry(n, n.saturating_sub(2))
}

/// Cyclic sum over the last three slots; the pair identity reads
/// `R·aa + T·aa = 0`.
pub fn aa<F: Scalar>(n: usize) -> GroupAlgebraElement<F> {
    cyclic_on(n, [n - 2, n - 1, n])
}

/// Full symmetrization over the last three slots (antisymmetry for `n = 2`).
pub fn l1<F: Scalar>(n: usize) -> GroupAlgebraElement<F> {
    if n == 2 {
        return t1(2);
    }
    GroupAlgebraElement::sum_of(n, last_three(n, |_| true))
}

/// Antisymmetrization over `X_{n-3}, X_{n-2}, X_{n-1}`, `n ≥ 4`.
pub fn l2<F: Scalar>(n: usize) -> GroupAlgebraElement<F> {
    GroupAlgebraElement::signed_sum_of(
        n,
        Permutation::all(3)
            .into_iter()
            .map(|p| Permutation::on_points(n, &[n - 3, n - 2, n - 1], &p)),
    )
}

/// Total symmetry in `X_1..X_{n-3}`.
pub fn l3<F: Scalar>(n: usize) -> Vec<GroupAlgebraElement<F>> {
    total_symmetry(n, n.saturating_sub(3))
}

/// `(id − (n-3 n-2))(id − (n-1 n))`, `n ≥ 4`.
pub fn l4<F: Scalar>(n: usize) -> GroupAlgebraElement<F> {
    let a = GroupAlgebraElement::identity(n).sub(&ga(Permutation::transposition(n, n - 3, n - 2))).unwrap();
    let b = GroupAlgebraElement::identity(n).sub(&ga(Permutation::transposition(n, n - 1, n))).unwrap();
    a.mul(&b).unwrap()
}

/// Symmetry tags of the curvature-type generator at degree `n ≥ 3`.
pub fn r_tags<F: Scalar>(n: usize) -> Vec<SymmetryTag<F>> {
    let mut v = vec![SymmetryTag { name: "s1", elements: vec![b1(n)] }];
    if n >= 4 {
        v.push(SymmetryTag { name: "s3", elements: vec![b3(n)] });
        v.push(SymmetryTag { name: "s4", elements: b4(n) });
    }
    v
}

/// Symmetry tags of the torsion-type generator at degree `n ≥ 2`.
pub fn t_tags<F: Scalar>(n: usize) -> Vec<SymmetryTag<F>> {
    let mut v = vec![SymmetryTag { name: "t1", elements: vec![t1(n)] }];
    if n >= 3 {
        v.push(SymmetryTag { name: "t2", elements: t2(n) });
    }
    v
}

/// Symmetry tags of the canonical generator at degree `n ≥ 2`.
pub fn l_tags<F: Scalar>(n: usize) -> Vec<SymmetryTag<F>> {
    let mut v = vec![SymmetryTag { name: "l1", elements: vec![l1(n)] }];
    if n >= 4 {
        v.push(SymmetryTag { name: "l2", elements: vec![l2(n)] });
        v.push(SymmetryTag { name: "l3", elements: l3(n) });
        v.push(SymmetryTag { name: "l4", elements: vec![l4(n)] });
    }
    v
}

/// Which generator family parametrizes the leading terms.
#[derive(Debug, Clone)]
pub enum GeneratorFamily<F: Scalar> {
    /// `{t_2}` and `{r_n, t_n}` for `n ≥ 3`.
    Classical,
    /// `{l_n}`.
    Canonical,
    /// Arbitrary symbols, keyed by degree.
    Custom(Vec<ENaughtElement<F>>),
}

impl<F: Scalar> GeneratorFamily<F> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Classical => "classical",
            Self::Canonical => "canonical",
            Self::Custom(_) => "custom",
        }
    }

    /// Named group-ring symbols of the family members of degree `n`.
    pub fn members(&self, n: usize) -> Result<Vec<(String, GroupAlgebraElement<F>)>> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("generators need n >= 2, got {n}")));
        }
        Ok(match self {
            Self::Classical if n == 2 => vec![("t2".into(), t_symbol(2)?)],
            Self::Classical => vec![(format!("r{n}"), r_symbol(n)?), (format!("t{n}"), t_symbol(n)?)],
            Self::Canonical => vec![(format!("l{n}"), l_symbol(n)?)],
            Self::Custom(list) => list
                .iter()
                .filter(|e| e.degree() == n)
                .enumerate()
                .map(|(i, e)| (format!("g{n}_{i}"), e.to_group_algebra()))
                .collect(),
        })
    }

    /// Member symbols as elements of `E⁰(n)`.
    pub fn symbols(&self, n: usize) -> Result<Vec<ENaughtElement<F>>> {
        self.members(n)?
            .iter()
            .map(|(_, g)| ENaughtElement::from_group_algebra(g))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;
    use crate::scalar::{Scalar, Zero};

    #[test]
    fn t2_symbol_is_antisymmetrizer() {
        let t = t_symbol::<Q>(2).unwrap();
        assert_eq!(t.coeff(&Permutation::identity(2)), Q::int(1));
        assert_eq!(t.coeff(&Permutation::transposition(2, 1, 2)), Q::int(-1));
    }

    #[test]
    fn l_symbol_has_zero_sum() {
        for n in 3..=6 {
            let l = ENaughtElement::from_group_algebra(&l_symbol::<Q>(n).unwrap()).unwrap();
            assert!(l.coefficient_sum().is_zero());
        }
    }

    #[test]
    fn r_symbol_is_normalized() {
        let r = r_symbol::<Q>(5).unwrap();
        for (p, _) in r.terms() {
            assert_eq!(&crate::perm_algebra::normalize(p), p);
        }
    }

    #[test]
    fn tag_lists_depend_on_degree() {
        assert_eq!(r_tags::<Q>(3).len(), 1);
        assert_eq!(r_tags::<Q>(4).len(), 3);
        assert_eq!(l_tags::<Q>(2).len(), 1);
        assert_eq!(l_tags::<Q>(4).len(), 4);
        assert!(b4::<Q>(4).is_empty());
        assert_eq!(t2::<Q>(5).len(), 2);
    }
}
