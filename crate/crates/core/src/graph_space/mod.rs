//! Graph models of the operator space `Con × T^{⊗d} → T`: the decorated
//! space `Gr[Kr](d)`, the raw slice `Gr⁰(d) → Gr¹(d)` of the horizontal
//! differential, contraction schemes, and the bridge to tensor terms.
//!
//! Every space is the span of rigid configurations (graphs with ordered
//! inputs) modulo relators `c − c·g` for the input symmetries of each vertex
//! and the exchange of interchangeable vertices. Quotients are computed by
//! exact sparse elimination.

pub mod bridge;
pub mod graph;

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{sparse_from_entries, SparseEchelon, SparseVec};
use crate::perm_algebra::{kernel_basis, kernel_coordinates, right_action, GeneratorFamily, Permutation};
use crate::scalar::Scalar;

pub use bridge::{independence_rank, to_tensor_term, Realization};
pub use graph::{all_wirings, arity_partitions, black_arities, ContractionScheme, DecoratedGraph, Graph, RawGraph, Vertex};

/// Right action of adjacent transpositions on `Kr(s)` in kernel-basis
/// coordinates: `act[j][b]` are the coordinates of `ξ_b · (j+1 j+2)`.
struct KrAction<F: Scalar> {
    act: Vec<Vec<Vec<F>>>,
}

fn kr_action<F: Scalar>(s: usize) -> Result<KrAction<F>> {
    let basis = kernel_basis::<F>(s)?;
    let mut act = Vec::with_capacity(s - 1);
    for j in 1..s {
        let p = Permutation::transposition(s, j, j + 1);
        let row = basis
            .iter()
            .map(|b| kernel_coordinates(&right_action(b, &p)?))
            .collect::<Result<Vec<_>>>()?;
        act.push(row);
    }
    Ok(KrAction { act })
}

/// Which symmetries a space quotients by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Flavor {
    Decorated,
    Raw,
    Scheme,
}

/// A span of rigid configurations modulo symmetry relators.
pub struct GraphSpace<F: Scalar> {
    pub configs: Vec<Graph>,
    index: HashMap<Graph, usize>,
    relators: SparseEchelon<F>,
}

impl<F: Scalar> GraphSpace<F> {
    fn build(configs: Vec<Graph>, flavor: Flavor) -> Result<Self> {
        let index: HashMap<Graph, usize> = configs.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        let mut actions: BTreeMap<usize, KrAction<F>> = BTreeMap::new();
        if flavor == Flavor::Decorated {
            for g in &configs {
                for v in &g.vertices {
                    if let Vertex::Decorated { arity, .. } = v {
                        if !actions.contains_key(arity) {
                            actions.insert(*arity, kr_action(*arity)?);
                        }
                    }
                }
            }
        }
        let rows: Vec<SparseVec<F>> = if flavor == Flavor::Scheme {
            Vec::new()
        } else {
            configs
                .par_iter()
                .enumerate()
                .map(|(i, g)| relators(i, g, &index, &actions))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect()
        };
        let mut echelon = SparseEchelon::new();
        for r in rows {
            echelon.insert(r);
        }
        Ok(Self { configs, index, relators: echelon })
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn index_of(&self, g: &Graph) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Dimension of the quotient.
    pub fn dimension(&self) -> usize {
        self.configs.len() - self.relators.rank()
    }

    /// Configurations whose classes form a basis of the quotient.
    pub fn basis(&self) -> Vec<&Graph> {
        let pivots: std::collections::HashSet<usize> = self.relators.pivot_columns().into_iter().collect();
        (0..self.configs.len()).filter(|i| !pivots.contains(i)).map(|i| &self.configs[i]).collect()
    }

    pub(crate) fn relator_echelon(&self) -> &SparseEchelon<F> {
        &self.relators
    }
}

fn lookup(index: &HashMap<Graph, usize>, g: &Graph) -> Result<usize> {
    index
        .get(g)
        .copied()
        .ok_or_else(|| Error::InvalidInput(format!("configuration {g} is outside the enumerated space")))
}

fn relators<F: Scalar>(
    i: usize,
    g: &Graph,
    index: &HashMap<Graph, usize>,
    actions: &BTreeMap<usize, KrAction<F>>,
) -> Result<Vec<SparseVec<F>>> {
    let mut out = Vec::new();
    let simple = |h: &Graph| -> Result<SparseVec<F>> {
        Ok(sparse_from_entries([(i, F::one()), (lookup(index, h)?, -F::one())]))
    };
    for (v, vert) in g.vertices.iter().enumerate() {
        let symmetric = match *vert {
            Vertex::Black { arity, .. } | Vertex::White { arity } => arity,
            Vertex::Nabla { k } => k,
            _ => 0,
        };
        for j in 1..symmetric {
            out.push(simple(&g.permute_inputs(v, &Permutation::transposition(vert.arity(), j, j + 1)))?);
        }
        if let Vertex::Decorated { arity, decoration } = *vert {
            let act = &actions[&arity];
            for j in 1..arity {
                let moved = g.permute_inputs(v, &Permutation::transposition(arity, j, j + 1));
                let mut entries = vec![(i, F::one())];
                for (b, c) in act.act[j - 1][decoration].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mut h = moved.clone();
                    h.vertices[v] = Vertex::Decorated { arity, decoration: b };
                    entries.push((lookup(index, &h)?, -c.clone()));
                }
                out.push(sparse_from_entries(entries));
            }
        }
    }
    for a in 0..g.vertices.len().saturating_sub(1) {
        if g.vertices[a].same_shape(&g.vertices[a + 1]) {
            out.push(simple(&g.swap_vertices(a, a + 1))?);
        }
    }
    out.retain(|r| !r.is_empty());
    Ok(out)
}

fn check_d(d: usize) -> Result<()> {
    if d < 1 {
        return Err(Error::InvalidInput("graph spaces need d >= 1".into()));
    }
    Ok(())
}

fn decorated_configs(d: usize) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for us in black_arities(d) {
        let r = d - 1 - us.iter().sum::<usize>();
        for parts in arity_partitions(r) {
            let dims: Vec<usize> = parts.iter().map(|s| s * (s - 1) - 1).collect();
            for choice in product(&dims) {
                let mut vs = graph::blacks(&us);
                vs.extend(parts.iter().zip(&choice).map(|(&s, &b)| Vertex::Decorated { arity: s, decoration: b }));
                out.extend(all_wirings(&vs));
            }
        }
    }
    Ok(out)
}

fn raw_configs(d: usize, white: bool) -> Vec<Graph> {
    let mut out = Vec::new();
    for us in black_arities(d) {
        let r = d - 1 - us.iter().sum::<usize>();
        for parts in arity_partitions(r) {
            if !white {
                let mut vs = graph::blacks(&us);
                vs.extend(parts.iter().map(|&s| Vertex::Nabla { k: s - 2 }));
                out.extend(all_wirings(&vs));
                continue;
            }
            for (w, &s) in parts.iter().enumerate() {
                if w > 0 && parts[w - 1] == s {
                    continue;
                }
                let mut vs = graph::blacks(&us);
                vs.extend(parts.iter().enumerate().filter(|&(i, _)| i != w).map(|(_, &t)| Vertex::Nabla { k: t - 2 }));
                vs.push(Vertex::White { arity: s });
                out.extend(all_wirings(&vs));
            }
        }
    }
    out
}

/// All index tuples `0 ≤ c_i < dims[i]`.
fn product(dims: &[usize]) -> Vec<Vec<usize>> {
    dims.iter().fold(vec![Vec::new()], |acc, &n| {
        acc.into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect()
    })
}

/// `Gr[Kr](d)`.
pub fn decorated_space<F: Scalar>(d: usize) -> Result<GraphSpace<F>> {
    check_d(d)?;
    GraphSpace::build(decorated_configs(d)?, Flavor::Decorated)
}

/// `Gr[Kr](d)` assembled from the configurations in a shuffled order.
pub fn decorated_space_shuffled<F: Scalar>(d: usize, seed: u64) -> Result<GraphSpace<F>> {
    check_d(d)?;
    let mut configs = decorated_configs(d)?;
    configs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    GraphSpace::build(configs, Flavor::Decorated)
}

/// `Gr⁰(d)` (no white vertex) or the one-white-vertex part of `Gr¹(d)`.
pub fn raw_space<F: Scalar>(d: usize, white: bool) -> Result<GraphSpace<F>> {
    check_d(d)?;
    GraphSpace::build(raw_configs(d, white), Flavor::Raw)
}

/// Dimension of `Gr[Kr](d)`.
pub fn enumerate_decorated<F: Scalar>(d: usize) -> Result<usize> {
    Ok(decorated_space::<F>(d)?.dimension())
}

/// `δ_h g`: every `∇`-vertex in turn becomes a white vertex, with sign `−1`.
/// The white vertex is moved to the end of the vertex list.
pub fn delta_h(g: &Graph) -> Vec<(i64, Graph)> {
    let mut out = Vec::new();
    for (v, vert) in g.vertices.iter().enumerate() {
        if let Vertex::Nabla { k } = *vert {
            let mut h = g.clone();
            h.vertices[v] = Vertex::White { arity: k + 2 };
            let order: Vec<usize> = (0..g.vertices.len()).filter(|&i| i != v).chain(std::iter::once(v)).collect();
            out.push((-1, h.reorder(&order)));
        }
    }
    out
}

/// `dim Ker(δ_h : Gr⁰(d) → Gr¹(d))` on the symmetry quotients.
pub fn dim_h0_via_delta_h<F: Scalar>(d: usize) -> Result<usize> {
    let g0 = raw_space::<F>(d, false)?;
    let g1 = raw_space::<F>(d, true)?;
    let images: Vec<SparseVec<F>> = g0
        .configs
        .par_iter()
        .map(|g| -> Result<SparseVec<F>> {
            let mut entries = Vec::new();
            for (c, h) in delta_h(g) {
                entries.push((lookup(&g1.index, &h)?, F::int(c)));
            }
            Ok(sparse_from_entries(entries))
        })
        .collect::<Result<_>>()?;
    let mut ech = g1.relator_echelon().clone();
    let base = ech.rank();
    for r in images {
        ech.insert(r);
    }
    Ok(g0.dimension() - (ech.rank() - base))
}

/// Basis sizes of `Gr[Kr](d)` by vf-order.
pub fn vforder_profile<F: Scalar>(d: usize) -> Result<BTreeMap<usize, usize>> {
    let space = decorated_space::<F>(d)?;
    let mut out = BTreeMap::new();
    for g in space.basis() {
        *out.entry(g.vforder()).or_insert(0) += 1;
    }
    Ok(out)
}

/// Outcome of the vf-order bound check over contraction schemes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub d: usize,
    pub a: usize,
    pub family: String,
    /// Schemes of vf-order `≤ a` inspected.
    pub schemes: usize,
    /// Largest `q_1 + … + q_t − t − a` seen; the bound holds iff `≤ 0`.
    pub max_excess: i64,
    /// Whether any scheme of vf-order 0 has a `v_n` with `n ≥ 1`.
    pub vf_zero_uses_v: bool,
    pub pass: bool,
}

/// Contraction schemes built from `family` with all black arities given.
pub fn contraction_schemes<F: Scalar>(d: usize, family: &GeneratorFamily<F>, max_vforder: usize) -> Result<Vec<Graph>> {
    check_d(d)?;
    let mut out = Vec::new();
    for us in black_arities(d) {
        let vf: usize = us.iter().sum();
        if vf > max_vforder {
            continue;
        }
        for parts in arity_partitions(d - 1 - vf) {
            let dims = parts.iter().map(|&s| Ok(family.members(s)?.len())).collect::<Result<Vec<_>>>()?;
            for choice in product(&dims) {
                let mut vs = graph::blacks(&us);
                vs.extend(parts.iter().zip(&choice).map(|(&s, &i)| Vertex::Generator { arity: s, index: i }));
                out.extend(all_wirings(&vs));
            }
        }
    }
    Ok(out)
}

/// For every contraction scheme of vf-order `≤ a` with vertices
/// `v_{q_1}..v_{q_t}` (`q_i ≥ 2`): `q_1 + … + q_t ≤ a + t`, and no `v_n`
/// with `n ≥ 1` at vf-order 0.
pub fn check_vforder_bound<F: Scalar>(d: usize, a: usize, family: &GeneratorFamily<F>) -> Result<BoundReport> {
    let schemes = contraction_schemes(d, family, a)?;
    let mut max_excess = i64::MIN;
    let mut vf_zero_uses_v = false;
    for g in &schemes {
        let qs: Vec<usize> = g.vertices.iter().map(Vertex::vforder).filter(|&q| q >= 2).collect();
        let excess = qs.iter().sum::<usize>() as i64 - qs.len() as i64 - a as i64;
        max_excess = max_excess.max(excess);
        let p_sum: usize = g.vertices.iter().map(Vertex::vforder).sum();
        debug_assert!(p_sum <= g.vforder());
        if g.vforder() == 0 && g.vertices.iter().any(|v| v.vforder() >= 1) {
            vf_zero_uses_v = true;
        }
    }
    Ok(BoundReport {
        d,
        a,
        family: family.name().to_string(),
        schemes: schemes.len(),
        max_excess,
        vf_zero_uses_v,
        pass: max_excess <= 0 && !vf_zero_uses_v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    #[test]
    fn small_dimensions() {
        assert_eq!(enumerate_decorated::<Q>(1).unwrap(), 1);
        assert_eq!(enumerate_decorated::<Q>(2).unwrap(), 7);
        assert_eq!(dim_h0_via_delta_h::<Q>(1).unwrap(), 1);
        assert_eq!(dim_h0_via_delta_h::<Q>(2).unwrap(), 7);
    }

    #[test]
    fn d_zero_is_rejected() {
        assert!(enumerate_decorated::<Q>(0).is_err());
    }

    #[test]
    fn vforder_profile_d2() {
        let p = vforder_profile::<Q>(2).unwrap();
        assert_eq!(p, BTreeMap::from([(0, 3), (1, 4)]));
    }

    #[test]
    fn delta_h_of_nabla_xy() {
        // ∇_{X_2} X_1 realized by Γ: one ∇-vertex fed by both blacks
        let g = Graph {
            vertices: vec![
                Vertex::Black { label: 1, arity: 0 },
                Vertex::Black { label: 2, arity: 0 },
                Vertex::Nabla { k: 0 },
            ],
            wiring: vec![1, 0, 2],
        };
        let img = delta_h(&g);
        assert_eq!(img.len(), 1);
        assert_eq!(img[0].0, -1);
        assert_eq!(img[0].1.vertices[2], Vertex::White { arity: 2 });
    }

    #[test]
    fn bound_holds_small() {
        let fam = GeneratorFamily::<Q>::Classical;
        for (d, a) in [(2, 0), (2, 1), (3, 0)] {
            let r = check_vforder_bound(d, a, &fam).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}
