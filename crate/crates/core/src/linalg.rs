//! Exact linear algebra: sparse incremental echelon forms, ranks and null
//! spaces over any [`Scalar`].

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Sparse vector: `(column, value)` pairs, strictly increasing columns,
/// no stored zeros.
pub type SparseVec<F> = Vec<(usize, F)>;

/// Builds a sparse vector from unsorted entries, merging duplicates.
pub fn sparse_from_entries<F: Scalar>(entries: impl IntoIterator<Item = (usize, F)>) -> SparseVec<F> {
    let mut acc: BTreeMap<usize, F> = BTreeMap::new();
    for (c, v) in entries {
        let slot = acc.entry(c).or_insert_with(F::zero);
        slot.add_assign_ref(&v);
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// `a + s * b` for sparse vectors.
fn axpy<F: Scalar>(a: &SparseVec<F>, s: &F, b: &SparseVec<F>) -> SparseVec<F> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, s.clone() * b[j].1.clone()));
            j += 1;
        } else {
            let v = a[i].1.clone() + s.clone() * b[j].1.clone();
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row echelon form built one row at a time. Pivot rows are normalized to a
/// leading coefficient of one. Insertion order does not affect the rank or
/// the set of pivot columns of the spanned space once fully reduced, but
/// pivot columns *do* depend on the column order, which callers fix.
#[derive(Debug, Clone)]
pub struct SparseEchelon<F: Scalar> {
    pivots: BTreeMap<usize, SparseVec<F>>,
}

impl<F: Scalar> Default for SparseEchelon<F> {
    fn default() -> Self {
        Self { pivots: BTreeMap::new() }
    }
}

impl<F: Scalar> SparseEchelon<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the current pivots; the result is zero iff
    /// `row` lies in the span.
    pub fn reduce(&self, mut row: SparseVec<F>) -> SparseVec<F> {
        let mut start = 0usize;
        loop {
            let Some(pos) = row.iter().position(|(c, _)| *c >= start) else {
                return row;
            };
            let (col, lead) = row[pos].clone();
            match self.pivots.get(&col) {
                Some(p) => {
                    row = axpy(&row, &(-lead), p);
                }
                None => start = col + 1,
            }
        }
    }

    /// Inserts a row; returns `true` when it increased the rank.
    pub fn insert(&mut self, row: SparseVec<F>) -> bool {
        let mut row = row;
        loop {
            let Some((col, lead)) = row.first().cloned() else {
                return false;
            };
            match self.pivots.get(&col) {
                Some(p) => row = axpy(&row, &(-lead), p),
                None => {
                    let inv = F::one() / lead;
                    for e in row.iter_mut() {
                        e.1 = e.1.clone() * inv.clone();
                    }
                    self.pivots.insert(col, row);
                    return true;
                }
            }
        }
    }

    /// Leading columns of the pivot rows, ascending.
    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.keys().copied().collect()
    }

    pub fn contains(&self, row: SparseVec<F>) -> bool {
        self.reduce(row).is_empty()
    }
}

/// Rank of a family of sparse rows.
pub fn sparse_rank<F: Scalar>(rows: impl IntoIterator<Item = SparseVec<F>>) -> usize {
    let mut ech = SparseEchelon::new();
    for r in rows {
        ech.insert(r);
    }
    ech.rank()
}

fn dense_to_sparse<F: Scalar>(row: &[F]) -> SparseVec<F> {
    row.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (c, v.clone()))
        .collect()
}

/// Rank of a dense matrix given as rows.
pub fn rank<F: Scalar>(rows: &[Vec<F>]) -> usize {
    sparse_rank(rows.iter().map(|r| dense_to_sparse(r)))
}

/// Reduced row echelon form (in place); returns the pivot columns.
pub fn rref<F: Scalar>(rows: &mut Vec<Vec<F>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r >= rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = F::one() / rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{x : A x = 0}` for the matrix with the given rows and `ncols`
/// columns. One vector per free column, with a `1` in that column.
pub fn nullspace<F: Scalar>(rows: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![F::zero(); ncols];
        v[free] = F::one();
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Null space of a sparse system, computed through a dense copy.
pub fn sparse_nullspace<F: Scalar>(rows: &[SparseVec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut ech = SparseEchelon::new();
    for r in rows {
        ech.insert(r.clone());
    }
    let dense: Vec<Vec<F>> = ech
        .pivots
        .values()
        .map(|r| {
            let mut d = vec![F::zero(); ncols];
            for (c, v) in r {
                d[*c] = v.clone();
            }
            d
        })
        .collect();
    nullspace(&dense, ncols)
}
