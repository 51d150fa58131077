//! Truncated Taylor series in the chart coordinates `x¹..x^m` at the origin.
//! Monomials are stored in graded order, so truncating to a lower order is
//! taking a prefix.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::jet_calculus::jet::{JetRing, Multi, MAX_DIM};
use crate::scalar::Scalar;

const NONE: u32 = u32::MAX;

/// Monomial bookkeeping for `m` variables up to total degree `order`.
#[derive(Debug)]
pub struct MonoTable {
    pub m: usize,
    pub order: usize,
    pub exps: Vec<Multi>,
    degs: Vec<usize>,
    /// `counts[n]` = number of monomials of degree `≤ n`.
    counts: Vec<usize>,
    mul: Vec<u32>,
    up: Vec<[u32; MAX_DIM]>,
}

impl MonoTable {
    fn build(m: usize, order: usize) -> Self {
        let mut exps: Vec<Multi> = Vec::new();
        let mut counts = Vec::with_capacity(order + 1);
        for d in 0..=order {
            let mut cur = [0u8; MAX_DIM];
            push_degree(m, 0, d, &mut cur, &mut exps);
            counts.push(exps.len());
        }
        let degs: Vec<usize> = exps.iter().map(|e| e.iter().map(|&a| a as usize).sum()).collect();
        let index: HashMap<Multi, u32> = exps.iter().enumerate().map(|(i, e)| (*e, i as u32)).collect();
        let len = exps.len();
        let mut mul = vec![NONE; len * len];
        for i in 0..len {
            for j in 0..len {
                if degs[i] + degs[j] <= order {
                    let mut s = exps[i];
                    for k in 0..m {
                        s[k] += exps[j][k];
                    }
                    mul[i * len + j] = index[&s];
                }
            }
        }
        let up = exps
            .iter()
            .map(|e| {
                let mut row = [NONE; MAX_DIM];
                for (k, slot) in row.iter_mut().enumerate().take(m) {
                    let mut s = *e;
                    s[k] += 1;
                    if let Some(&i) = index.get(&s) {
                        *slot = i;
                    }
                }
                row
            })
            .collect();
        Self { m, order, exps, degs, counts, mul, up }
    }

    /// Cached table for `(m, order)`.
    pub fn get(m: usize, order: usize) -> Arc<MonoTable> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<MonoTable>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        guard.entry((m, order)).or_insert_with(|| Arc::new(MonoTable::build(m, order))).clone()
    }

    pub fn count(&self, order: usize) -> usize {
        self.counts[order]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degs[i]
    }
}

fn push_degree(m: usize, k: usize, left: usize, cur: &mut Multi, out: &mut Vec<Multi>) {
    if k + 1 == m {
        cur[k] = left as u8;
        out.push(*cur);
        cur[k] = 0;
        return;
    }
    for a in (0..=left).rev() {
        cur[k] = a as u8;
        push_degree(m, k + 1, left - a, cur, out);
    }
    cur[k] = 0;
}

/// A series truncated at total degree `order`.
#[derive(Clone, Debug)]
pub struct Series<R> {
    table: Arc<MonoTable>,
    order: usize,
    pub c: Vec<R>,
}

impl<R> Series<R> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn table(&self) -> &Arc<MonoTable> {
        &self.table
    }
}

impl<R> Series<R> {
    pub fn zero<F: Scalar>(table: &Arc<MonoTable>, order: usize) -> Self
    where
        R: JetRing<F>,
    {
        Self { table: table.clone(), order, c: vec![R::zero(); table.count(order)] }
    }

    pub fn constant<F: Scalar>(table: &Arc<MonoTable>, order: usize, value: R) -> Self
    where
        R: JetRing<F>,
    {
        let mut s = Self::zero(table, order);
        s.c[0] = value;
        s
    }

    pub fn from_coeffs(table: &Arc<MonoTable>, order: usize, c: Vec<R>) -> Self {
        debug_assert_eq!(c.len(), table.count(order));
        Self { table: table.clone(), order, c }
    }

    pub fn is_zero<F: Scalar>(&self) -> bool
    where
        R: JetRing<F>,
    {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self
    where
        R: Clone,
    {
        assert!(order <= self.order, "cannot extend a truncated series");
        Self { table: self.table.clone(), order, c: self.c[..self.table.count(order)].to_vec() }
    }

    pub fn add<F: Scalar>(&self, other: &Self) -> Self
    where
        R: JetRing<F>,
    {
        let order = self.order.min(other.order);
        let n = self.table.count(order);
        Self {
            table: self.table.clone(),
            order,
            c: (0..n).map(|i| self.c[i].add(&other.c[i])).collect(),
        }
    }

    pub fn sub<F: Scalar>(&self, other: &Self) -> Self
    where
        R: JetRing<F>,
    {
        let order = self.order.min(other.order);
        let n = self.table.count(order);
        Self {
            table: self.table.clone(),
            order,
            c: (0..n).map(|i| self.c[i].sub(&other.c[i])).collect(),
        }
    }

    pub fn scale<F: Scalar>(&self, s: &F) -> Self
    where
        R: JetRing<F>,
    {
        Self { table: self.table.clone(), order: self.order, c: self.c.iter().map(|x| x.scale(s)).collect() }
    }

    /// `self += a * b`, truncated at `self.order`.
    pub fn add_product<F: Scalar>(&mut self, a: &Self, b: &Self)
    where
        R: JetRing<F>,
    {
        let t = &self.table;
        let len = t.exps.len();
        let na = t.count(self.order.min(a.order));
        let nb = t.count(self.order.min(b.order));
        for i in 0..na {
            if a.c[i].is_zero() {
                continue;
            }
            let di = t.degs[i];
            for j in 0..nb {
                if di + t.degs[j] > self.order {
                    break;
                }
                if b.c[j].is_zero() {
                    continue;
                }
                let k = t.mul[i * len + j] as usize;
                self.c[k].add_product(&a.c[i], &b.c[j]);
            }
        }
    }

    pub fn mul<F: Scalar>(&self, other: &Self) -> Self
    where
        R: JetRing<F>,
    {
        let mut out = Self::zero(&self.table, self.order.min(other.order));
        out.add_product(self, other);
        out
    }

    /// `∂/∂x^k`, lowering the order by one.
    pub fn deriv<F: Scalar>(&self, k: usize) -> Self
    where
        R: JetRing<F>,
    {
        assert!(self.order >= 1, "derivative of an order-0 truncation");
        let t = &self.table;
        let order = self.order - 1;
        let c = (0..t.count(order))
            .map(|i| {
                let j = t.up[i][k] as usize;
                let a = t.exps[i][k] as i64 + 1;
                self.c[j].scale(&F::int(a))
            })
            .collect();
        Self { table: self.table.clone(), order, c }
    }

    pub fn constant_term(&self) -> &R {
        &self.c[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn poly(t: &Arc<MonoTable>, order: usize, f: impl Fn(&Multi) -> i64) -> Series<Q> {
        let c = t.exps[..t.count(order)].iter().map(|e| Q::int(f(e))).collect();
        Series::from_coeffs(t, order, c)
    }

    #[test]
    fn table_counts_are_binomial() {
        let t = MonoTable::get(3, 4);
        // C(n+3, 3)
        assert_eq!((0..=4).map(|n| t.count(n)).collect::<Vec<_>>(), vec![1, 4, 10, 20, 35]);
        assert!(t.exps[..4].iter().skip(1).all(|e| e.iter().map(|&a| a as usize).sum::<usize>() == 1));
    }

    #[test]
    fn leibniz_rule() {
        let t = MonoTable::get(2, 5);
        let a = poly(&t, 5, |e| 1 + e[0] as i64 * 2 - e[1] as i64);
        let b = poly(&t, 5, |e| 3 - e[0] as i64 + e[1] as i64 * e[1] as i64);
        for k in 0..2 {
            let lhs = a.mul(&b).deriv(k);
            let rhs = a.deriv(k).mul(&b.truncate(4)).add(&a.truncate(4).mul(&b.deriv(k)));
            assert_eq!(lhs.c, rhs.c);
        }
    }

    #[test]
    fn derivatives_commute() {
        let t = MonoTable::get(3, 4);
        let a = poly(&t, 4, |e| (e[0] as i64 + 2) * (e[2] as i64 - 1) + e[1] as i64);
        assert_eq!(a.deriv(0).deriv(2).c, a.deriv(2).deriv(0).c);
    }
}
