use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseVec;
use crate::perm_algebra::{GroupAlgebraElement, Permutation};
use crate::scalar::Scalar;

/// The transversal `Σ'_n = {σ : σ(1) < … < σ(n-2)}` in lexicographic order,
/// with its inverse index.
#[derive(Debug)]
pub struct Transversal {
    pub n: usize,
    pub reps: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
}

impl Transversal {
    fn build(n: usize) -> Self {
        let reps: Vec<Permutation> = Permutation::all(n)
            .into_iter()
            .filter(|p| p.images_raw()[..n - 2].windows(2).all(|w| w[0] < w[1]))
            .collect();
        let index = reps.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        Self { n, reps, index }
    }

    /// Cached transversal for degree `n ≥ 2`.
    pub fn get(n: usize) -> Arc<Transversal> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Transversal>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        guard.entry(n).or_insert_with(|| Arc::new(Transversal::build(n))).clone()
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn index_of(&self, p: &Permutation) -> usize {
        self.index[&normalize(p)]
    }
}

/// Representative of the coset `Σ_{n-2} σ`: the first `n-2` images sorted.
pub fn normalize(p: &Permutation) -> Permutation {
    let n = p.degree();
    let mut im = p.images_raw().to_vec();
    if n >= 2 {
        im[..n - 2].sort_unstable();
    }
    Permutation::from_zero_based(im)
}

/// An element of the induced module `E⁰(n)`: coefficients on `Σ'_n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ENaughtElement<F: Scalar> {
    n: usize,
    coeffs: BTreeMap<Permutation, F>,
}

impl<F: Scalar> ENaughtElement<F> {
    pub fn zero(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("E0(n) needs n >= 2, got {n}")));
        }
        Ok(Self { n, coeffs: BTreeMap::new() })
    }

    /// Basis vector at the class of `p` (any coset member is accepted).
    pub fn basis(p: &Permutation) -> Result<Self> {
        let mut e = Self::zero(p.degree())?;
        e.add_term(p, F::one());
        Ok(e)
    }

    /// Image of a group-ring element under `σ ↦ (1 ⊗ id)σ`.
    pub fn from_group_algebra(a: &GroupAlgebraElement<F>) -> Result<Self> {
        let mut e = Self::zero(a.degree())?;
        for (p, c) in a.terms() {
            e.add_term(p, c.clone());
        }
        Ok(e)
    }

    /// Lifts onto the transversal inside the group ring.
    pub fn to_group_algebra(&self) -> GroupAlgebraElement<F> {
        GroupAlgebraElement::from_terms(self.n, self.coeffs.iter().map(|(p, c)| (p.clone(), c.clone())))
            .expect("degrees agree")
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// `n(n-1)`.
    pub fn ambient_dimension(&self) -> usize {
        self.n * (self.n - 1)
    }

    pub fn add_term(&mut self, p: &Permutation, c: F) {
        if c.is_zero() {
            return;
        }
        let key = normalize(p);
        let slot = self.coeffs.entry(key.clone()).or_insert_with(F::zero);
        slot.add_assign_ref(&c);
        if slot.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Permutation, &F)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, p: &Permutation) -> F {
        self.coeffs.get(&normalize(p)).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DegreeMismatch { expected: self.n, got: other.n });
        }
        let mut out = self.clone();
        for (p, c) in &other.coeffs {
            out.add_term(p, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &F) -> Self {
        let mut out = Self { n: self.n, coeffs: BTreeMap::new() };
        for (p, c) in &self.coeffs {
            out.add_term(p, c.clone() * s.clone());
        }
        out
    }

    /// Coefficient vector in transversal order.
    pub fn to_dense(&self) -> Vec<F> {
        let t = Transversal::get(self.n);
        let mut v = vec![F::zero(); t.len()];
        for (p, c) in &self.coeffs {
            v[t.index_of(p)] = c.clone();
        }
        v
    }

    pub fn to_sparse(&self) -> SparseVec<F> {
        let t = Transversal::get(self.n);
        let mut v: SparseVec<F> = self.coeffs.iter().map(|(p, c)| (t.index_of(p), c.clone())).collect();
        v.sort_by_key(|e| e.0);
        v
    }

    pub fn from_dense(n: usize, v: &[F]) -> Result<Self> {
        let t = Transversal::get(n);
        if v.len() != t.len() {
            return Err(Error::InvalidInput(format!(
                "E0({n}) has dimension {}, got {} coefficients",
                t.len(),
                v.len()
            )));
        }
        let mut e = Self::zero(n)?;
        for (p, c) in t.reps.iter().zip(v) {
            e.add_term(p, c.clone());
        }
        Ok(e)
    }

    pub fn coefficient_sum(&self) -> F {
        self.coeffs.values().cloned().fold(F::zero(), |a, b| a + b)
    }

    pub fn to_json(&self) -> ENaughtJson {
        ENaughtJson {
            n: self.n,
            terms: self
                .coeffs
                .iter()
                .map(|(p, c)| TermJson { images: p.images_one_based(), coeff: c.to_pq() })
                .collect(),
        }
    }

    pub fn from_json(j: &ENaughtJson) -> Result<Self> {
        let mut e = Self::zero(j.n)?;
        for t in &j.terms {
            let p = Permutation::new(&t.images)?;
            if p.degree() != j.n {
                return Err(Error::DegreeMismatch { expected: j.n, got: p.degree() });
            }
            if normalize(&p) != p {
                return Err(Error::InvalidInput(format!("{p} is not a transversal representative")));
            }
            let c = F::parse_pq(&t.coeff)
                .ok_or_else(|| Error::InvalidInput(format!("bad rational {:?}", t.coeff)))?;
            e.add_term(&p, c);
        }
        Ok(e)
    }
}

/// Wire form: `{"n": int, "terms": [{"images": [...], "coeff": "p/q"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ENaughtJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub images: Vec<usize>,
    pub coeff: String,
}
