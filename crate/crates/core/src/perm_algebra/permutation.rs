use std::fmt;

use crate::error::{Error, Result};

/// A permutation of `{1..n}`, stored zero-based.
///
/// Products follow the right-action convention used throughout the crate:
/// `p.then(q)` (also `p * q`) is the map `i ↦ q(p(i))`. With operators
/// permuted by `D·p (X_1..X_n) = D(X_{p(1)},..,X_{p(n)})`, leading symbols
/// transform by `σ ↦ σ * p`, so acting by `p` and then by `q` is acting by
/// `p * q`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    /// From one-based images.
    pub fn new(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::InvalidInput("permutation of degree 0".into()));
        }
        let mut seen = vec![false; n];
        for &i in images {
            if i == 0 || i > n || seen[i - 1] {
                return Err(Error::InvalidInput(format!(
                    "{images:?} is not a bijection of 1..{n}"
                )));
            }
            seen[i - 1] = true;
        }
        Ok(Self { images: images.iter().map(|&i| (i - 1) as u8).collect() })
    }

    pub(crate) fn from_zero_based(images: Vec<u8>) -> Self {
        debug_assert!({
            let mut s = images.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &v)| v as usize == i)
        });
        Self { images }
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (0..n as u8).collect() }
    }

    /// Transposition of the one-based points `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a - 1, b - 1);
        p
    }

    /// The cycle `points[0] → points[1] → … → points[0]` (one-based).
    pub fn cycle(n: usize, points: &[usize]) -> Self {
        let mut p = Self::identity(n);
        for (k, &a) in points.iter().enumerate() {
            let b = points[(k + 1) % points.len()];
            p.images[a - 1] = (b - 1) as u8;
        }
        p
    }

    /// Embeds a permutation of `points.len()` letters onto the given
    /// one-based points, fixing everything else.
    pub fn on_points(n: usize, points: &[usize], local: &Permutation) -> Self {
        let mut p = Self::identity(n);
        for (k, &a) in points.iter().enumerate() {
            p.images[a - 1] = (points[local.images[k] as usize] - 1) as u8;
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Zero-based image of a zero-based point.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    /// One-based image of a one-based point.
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1] as usize + 1
    }

    pub fn images_one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize + 1).collect()
    }

    pub(crate) fn images_raw(&self) -> &[u8] {
        &self.images
    }

    /// `i ↦ other(self(i))`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "permutation degree mismatch");
        Self { images: self.images.iter().map(|&i| other.images[i as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Self { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i64 {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.images[j] as usize;
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All permutations of degree `n` in lexicographic order of images.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..n as u8).collect();
        loop {
            out.push(Self { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }

    /// Adjacent transpositions `(k k+1)` for `k` in `first..last` (one-based,
    /// `last` exclusive); together they generate the symmetric group on
    /// `first..=last`.
    pub fn adjacent_transpositions(n: usize, first: usize, last: usize) -> Vec<Permutation> {
        (first..last).map(|k| Self::transposition(n, k, k + 1)).collect()
    }
}

impl std::ops::Mul for &Permutation {
    type Output = Permutation;
    fn mul(self, rhs: &Permutation) -> Permutation {
        self.then(rhs)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, i) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(&[1, 1]).is_err());
        assert!(Permutation::new(&[0, 1]).is_err());
        assert!(Permutation::new(&[]).is_err());
        assert!(Permutation::new(&[2, 3, 1]).is_ok());
    }

    #[test]
    fn product_convention() {
        let p = Permutation::transposition(3, 1, 2);
        let q = Permutation::cycle(3, &[1, 2, 3]);
        // i ↦ q(p(i)): 1 → 2 → 3
        assert_eq!((&p * &q).image(1), 3);
        assert_eq!(p.then(&p), Permutation::identity(3));
        assert_eq!(q.then(&q.inverse()), Permutation::identity(3));
    }

    #[test]
    fn enumeration_and_signs() {
        let all = Permutation::all(4);
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        let even = all.iter().filter(|p| p.sign() == 1).count();
        assert_eq!(even, 12);
        assert_eq!(Permutation::cycle(3, &[1, 2, 3]).sign(), 1);
    }

    #[test]
    fn embedding_on_points() {
        let local = Permutation::new(&[2, 1]).unwrap();
        let p = Permutation::on_points(4, &[2, 4], &local);
        assert_eq!(p, Permutation::transposition(4, 2, 4));
    }
}
