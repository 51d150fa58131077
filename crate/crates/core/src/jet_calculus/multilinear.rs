//! Dense `n`-linear maps `χ^{⊗n} → V` and the `Φ`/`Ψ` correspondence
//! between maps with the canonical symmetries and curvature-torsion pairs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jet_calculus::ideal::{phi_elements, psi_elements};
use crate::linalg::{sparse_nullspace, SparseVec};
use crate::perm_algebra::symbols::{self, SymmetryTag};
use crate::perm_algebra::{GroupAlgebraElement, Permutation};
use crate::scalar::Scalar;

/// `L(e_{i_1}, …, e_{i_n})^a` stored at `((i_1·d_χ + i_2)… )·d_V + a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearMap<F: Scalar> {
    pub n: usize,
    pub dx: usize,
    pub dv: usize,
    pub table: Vec<F>,
}

impl<F: Scalar> MultilinearMap<F> {
    pub fn zero(n: usize, dx: usize, dv: usize) -> Self {
        Self { n, dx, dv, table: vec![F::zero(); dx.pow(n as u32) * dv] }
    }

    pub fn from_table(n: usize, dx: usize, dv: usize, table: Vec<F>) -> Result<Self> {
        let want = dx.pow(n as u32) * dv;
        if table.len() != want {
            return Err(Error::InvalidInput(format!("table of length {} where {want} was expected", table.len())));
        }
        Ok(Self { n, dx, dv, table })
    }

    fn inputs(&self) -> usize {
        self.dx.pow(self.n as u32)
    }

    fn decode(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.dx;
            flat /= self.dx;
        }
        idx
    }

    fn encode(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dx + i)
    }

    pub fn get(&self, idx: &[usize], a: usize) -> &F {
        &self.table[self.encode(idx) * self.dv + a]
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let table = self.table.iter().zip(&other.table).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Self { table, ..*self })
    }

    pub fn scale(&self, s: &F) -> Self {
        Self { table: self.table.iter().map(|a| a.clone() * s.clone()).collect(), ..*self }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if (self.n, self.dx, self.dv) != (other.n, other.dx, other.dv) {
            return Err(Error::DegreeMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    /// Source position of each entry of `L·p`: `(L·p)(i_1..i_n) = L(i_{p(1)}..i_{p(n)})`.
    fn permuted_index(&self, flat: usize, p: &Permutation) -> usize {
        let idx = self.decode(flat);
        let moved: Vec<usize> = (1..=self.n).map(|k| idx[p.image(k) - 1]).collect();
        self.encode(&moved)
    }

    pub fn act(&self, p: &Permutation) -> Result<Self> {
        if p.degree() != self.n {
            return Err(Error::DegreeMismatch { expected: self.n, got: p.degree() });
        }
        let mut out = Self::zero(self.n, self.dx, self.dv);
        for flat in 0..self.inputs() {
            let src = self.permuted_index(flat, p);
            for a in 0..self.dv {
                out.table[flat * self.dv + a] = self.table[src * self.dv + a].clone();
            }
        }
        Ok(out)
    }

    /// `Σ c_p L·p`.
    pub fn act_ga(&self, e: &GroupAlgebraElement<F>) -> Result<Self> {
        let mut out = Self::zero(self.n, self.dx, self.dv);
        for (p, c) in e.terms() {
            out = out.add(&self.act(p)?.scale(c))?;
        }
        Ok(out)
    }

    fn satisfies(&self, tags: &[SymmetryTag<F>]) -> Result<bool> {
        for tag in tags {
            for e in &tag.elements {
                if !self.act_ga(e)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn check_arity(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("the Φ/Ψ correspondence needs arity >= 3, got {n}")));
    }
    Ok(())
}

fn pair_tags<F: Scalar>(n: usize) -> (Vec<SymmetryTag<F>>, Vec<SymmetryTag<F>>) {
    (symbols::r_tags(n), symbols::t_tags(n))
}

/// Membership in `F_L`.
pub fn in_fl<F: Scalar>(l: &MultilinearMap<F>) -> Result<bool> {
    check_arity(l.n)?;
    l.satisfies(&symbols::l_tags(l.n))
}

/// Membership in `F_(R,T)`.
pub fn in_frt<F: Scalar>(r: &MultilinearMap<F>, t: &MultilinearMap<F>) -> Result<bool> {
    check_arity(r.n)?;
    r.same_shape(t)?;
    let (rt, tt) = pair_tags::<F>(r.n);
    let aa = symbols::aa::<F>(r.n);
    Ok(r.satisfies(&rt)? && t.satisfies(&tt)? && r.act_ga(&aa)?.add(&t.act_ga(&aa)?)?.is_zero())
}

pub fn phi_map<F: Scalar>(l: &MultilinearMap<F>) -> Result<(MultilinearMap<F>, MultilinearMap<F>)> {
    check_arity(l.n)?;
    let (pr, pt) = phi_elements::<F>(l.n)?;
    Ok((l.act_ga(&pr)?, l.act_ga(&pt)?))
}

pub fn psi_map<F: Scalar>(r: &MultilinearMap<F>, t: &MultilinearMap<F>) -> Result<MultilinearMap<F>> {
    check_arity(r.n)?;
    r.same_shape(t)?;
    let (pr, pt) = psi_elements::<F>(r.n)?;
    r.act_ga(&pr)?.add(&t.act_ga(&pt)?)
}

/// One row per input index of `Σ_b (x_b · e_b)(i) = 0`, where `x_b` is the
/// scalar table stored in column block `b`.
fn constraint_rows<F: Scalar>(n: usize, dx: usize, parts: &[(usize, &GroupAlgebraElement<F>)]) -> Vec<SparseVec<F>> {
    let shape = MultilinearMap::<F>::zero(n, dx, 1);
    let size = shape.inputs();
    let mut rows = Vec::new();
    for flat in 0..size {
        let mut acc: BTreeMap<usize, F> = BTreeMap::new();
        for &(block, e) in parts {
            for (p, c) in e.terms() {
                let col = block * size + shape.permuted_index(flat, p);
                acc.entry(col).or_insert_with(F::zero).add_assign_ref(c);
            }
        }
        let row: SparseVec<F> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if !row.is_empty() {
            rows.push(row);
        }
    }
    rows
}

fn random_combination<F: Scalar>(basis: &[Vec<F>], len: usize, rng: &mut ChaCha8Rng) -> Vec<F> {
    let mut v = vec![F::zero(); len];
    for b in basis {
        let c = F::int(rng.gen_range(-5..=5));
        if c.is_zero() {
            continue;
        }
        for (slot, x) in v.iter_mut().zip(b) {
            slot.add_assign_ref(&(x.clone() * c.clone()));
        }
    }
    v
}

/// Basis of the scalar-valued (`d_V = 1`) part of `F_L`.
pub fn fl_basis<F: Scalar>(n: usize, dx: usize) -> Result<Vec<Vec<F>>> {
    check_arity(n)?;
    let mut rows = Vec::new();
    for tag in symbols::l_tags::<F>(n) {
        for e in &tag.elements {
            rows.extend(constraint_rows(n, dx, &[(0, e)]));
        }
    }
    Ok(sparse_nullspace(&rows, dx.pow(n as u32)))
}

/// Basis of the scalar-valued part of `F_(R,T)`, as concatenated `R ‖ T` tables.
pub fn frt_basis<F: Scalar>(n: usize, dx: usize) -> Result<Vec<Vec<F>>> {
    check_arity(n)?;
    let (rt, tt) = pair_tags::<F>(n);
    let mut rows = Vec::new();
    for (block, tags) in [(0, &rt), (1, &tt)] {
        for tag in tags {
            for e in &tag.elements {
                rows.extend(constraint_rows(n, dx, &[(block, e)]));
            }
        }
    }
    let aa = symbols::aa::<F>(n);
    rows.extend(constraint_rows(n, dx, &[(0, &aa), (1, &aa)]));
    Ok(sparse_nullspace(&rows, 2 * dx.pow(n as u32)))
}

/// A pseudo-random element of `F_L`, one random combination of basis maps
/// per output coordinate.
pub fn random_fl<F: Scalar>(n: usize, dx: usize, dv: usize, seed: u64) -> Result<MultilinearMap<F>> {
    let basis = fl_basis::<F>(n, dx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = dx.pow(n as u32);
    let cols: Vec<Vec<F>> = (0..dv).map(|_| random_combination(&basis, size, &mut rng)).collect();
    let mut table = Vec::with_capacity(size * dv);
    for i in 0..size {
        for c in &cols {
            table.push(c[i].clone());
        }
    }
    MultilinearMap::from_table(n, dx, dv, table)
}

/// A pseudo-random element of `F_(R,T)`.
pub fn random_frt<F: Scalar>(n: usize, dx: usize, dv: usize, seed: u64) -> Result<(MultilinearMap<F>, MultilinearMap<F>)> {
    let basis = frt_basis::<F>(n, dx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = dx.pow(n as u32);
    let cols: Vec<Vec<F>> = (0..dv).map(|_| random_combination(&basis, 2 * size, &mut rng)).collect();
    let mut r = Vec::with_capacity(size * dv);
    let mut t = Vec::with_capacity(size * dv);
    for i in 0..size {
        for c in &cols {
            r.push(c[i].clone());
            t.push(c[size + i].clone());
        }
    }
    Ok((MultilinearMap::from_table(n, dx, dv, r)?, MultilinearMap::from_table(n, dx, dv, t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    #[test]
    fn zero_maps_to_zero() {
        let l = MultilinearMap::<Q>::zero(3, 2, 1);
        let (r, t) = phi_map(&l).unwrap();
        assert!(r.is_zero() && t.is_zero());
    }

    #[test]
    fn action_is_a_right_action() {
        let l = MultilinearMap::from_table(3, 2, 1, (0..8).map(Q::int).collect()).unwrap();
        let p = Permutation::new(&[2, 3, 1]).unwrap();
        let q = Permutation::new(&[2, 1, 3]).unwrap();
        assert_eq!(l.act(&p).unwrap().act(&q).unwrap(), l.act(&p.then(&q)).unwrap());
    }

    #[test]
    fn round_trip_small() {
        let l = random_fl::<Q>(3, 3, 1, 7).unwrap();
        assert!(!l.is_zero());
        assert!(in_fl(&l).unwrap());
        let (r, t) = phi_map(&l).unwrap();
        assert!(in_frt(&r, &t).unwrap());
        assert_eq!(psi_map(&r, &t).unwrap(), l);
    }

    #[test]
    fn arity_two_is_rejected() {
        assert!(phi_map(&MultilinearMap::<Q>::zero(2, 2, 1)).is_err());
    }
}
