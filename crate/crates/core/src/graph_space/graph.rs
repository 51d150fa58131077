use std::fmt;

use serde::Serialize;

use crate::perm_algebra::Permutation;

/// A vertex with one output and `arity` ordered input slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Vertex {
    /// `b_u`: the `u`-th derivative of the field `X_label`. Inputs are
    /// symmetric in every graph space except contraction schemes.
    Black { label: usize, arity: usize },
    /// A `Kr(arity)` vertex decorated by the basis element `decoration`.
    Decorated { arity: usize, decoration: usize },
    /// `∂^k Γ`: symmetric in the first `k` inputs.
    Nabla { k: usize },
    /// Fully symmetric, at most one per graph.
    White { arity: usize },
    /// Generator `d^i_n` of a contraction scheme.
    Generator { arity: usize, index: usize },
}

impl Vertex {
    pub fn arity(&self) -> usize {
        match *self {
            Vertex::Black { arity, .. }
            | Vertex::Decorated { arity, .. }
            | Vertex::White { arity }
            | Vertex::Generator { arity, .. } => arity,
            Vertex::Nabla { k } => k + 2,
        }
    }

    pub fn vforder(&self) -> usize {
        match *self {
            Vertex::Black { arity, .. } => arity,
            _ => 0,
        }
    }

    /// Vertices of the same shape may be exchanged by a graph isomorphism.
    pub(crate) fn same_shape(&self, other: &Self) -> bool {
        match (self, other) {
            (Vertex::Decorated { arity: a, .. }, Vertex::Decorated { arity: b, .. }) => a == b,
            (Vertex::Generator { .. }, _) | (Vertex::Black { .. }, _) => false,
            (a, b) => a == b,
        }
    }
}

/// Vertices plus a wiring. Input slots are numbered vertex by vertex in
/// list order, the anchor input last; `wiring[slot]` is the vertex whose
/// output feeds `slot`. Every vertex output is used exactly once.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Graph {
    pub vertices: Vec<Vertex>,
    pub wiring: Vec<usize>,
}

pub type DecoratedGraph = Graph;
pub type RawGraph = Graph;
pub type ContractionScheme = Graph;

impl Graph {
    /// First input slot of each vertex, followed by the anchor slot.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.vertices.len() + 1);
        let mut acc = 0;
        for v in &self.vertices {
            out.push(acc);
            acc += v.arity();
        }
        out.push(acc);
        out
    }

    pub fn anchor_slot(&self) -> usize {
        self.wiring.len() - 1
    }

    /// Owner of each input slot; `None` for the anchor.
    pub fn slot_owner(&self) -> Vec<Option<usize>> {
        let mut out = Vec::with_capacity(self.wiring.len());
        for (i, v) in self.vertices.iter().enumerate() {
            out.extend(std::iter::repeat_n(Some(i), v.arity()));
        }
        out.push(None);
        out
    }

    /// Slot consuming each vertex's output.
    pub fn consumer(&self) -> Vec<usize> {
        let mut out = vec![0; self.vertices.len()];
        for (slot, &src) in self.wiring.iter().enumerate() {
            out[src] = slot;
        }
        out
    }

    pub fn vforder(&self) -> usize {
        self.vertices.iter().map(Vertex::vforder).sum()
    }

    /// Outputs and inputs balance and the wiring is a bijection.
    pub fn is_valid(&self) -> bool {
        let n = self.vertices.len();
        if self.wiring.len() != n || self.offsets()[n] + 1 != n {
            return false;
        }
        let mut seen = vec![false; n];
        self.wiring.iter().all(|&s| s < n && !std::mem::replace(&mut seen[s], true))
    }

    /// Reorders the inputs of vertex `v`: new local slot `j` receives what
    /// old local slot `p(j)` received.
    pub fn permute_inputs(&self, v: usize, p: &Permutation) -> Graph {
        let off = self.offsets()[v];
        let mut g = self.clone();
        for j in 1..=p.degree() {
            g.wiring[off + j - 1] = self.wiring[off + p.image(j) - 1];
        }
        g
    }

    /// Exchanges list positions `a` and `b`, keeping the graph itself.
    pub fn swap_vertices(&self, a: usize, b: usize) -> Graph {
        let order: Vec<usize> = (0..self.vertices.len())
            .map(|i| if i == a { b } else if i == b { a } else { i })
            .collect();
        self.reorder(&order)
    }

    /// The same graph with vertex list `order.map(|old| vertices[old])`.
    pub fn reorder(&self, order: &[usize]) -> Graph {
        let offsets = self.offsets();
        let mut new_index = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let mut vertices = Vec::with_capacity(order.len());
        let mut wiring = Vec::with_capacity(self.wiring.len());
        for &old in order {
            let v = &self.vertices[old];
            vertices.push(v.clone());
            for s in offsets[old]..offsets[old] + v.arity() {
                wiring.push(new_index[self.wiring[s]]);
            }
        }
        wiring.push(new_index[self.wiring[self.anchor_slot()]]);
        Graph { vertices, wiring }
    }

    /// Vertices whose output path reaches the anchor.
    pub fn anchor_component(&self) -> Vec<bool> {
        let owner = self.slot_owner();
        let consumer = self.consumer();
        let n = self.vertices.len();
        let mut state = vec![None::<bool>; n];
        for start in 0..n {
            let mut path = Vec::new();
            let mut v = start;
            let hit = loop {
                if let Some(known) = state[v] {
                    break known;
                }
                if path.contains(&v) {
                    break false;
                }
                path.push(v);
                match owner[consumer[v]] {
                    None => break true,
                    Some(next) => v = next,
                }
            };
            for p in path {
                state[p] = Some(hit);
            }
        }
        state.into_iter().map(|s| s.unwrap_or(false)).collect()
    }
}

impl fmt::Display for Graph {
    /// `b1[1] b2[0] k2[0] | 1 2 0`: vertex shapes, then the wiring.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .vertices
            .iter()
            .map(|v| match v {
                Vertex::Black { label, arity } => format!("b{label}[{arity}]"),
                Vertex::Decorated { arity, decoration } => format!("k{arity}[{decoration}]"),
                Vertex::Nabla { k } => format!("n{k}"),
                Vertex::White { arity } => format!("w{arity}"),
                Vertex::Generator { arity, index } => format!("d{arity}[{index}]"),
            })
            .collect();
        let wires: Vec<String> = self.wiring.iter().map(|w| w.to_string()).collect();
        write!(f, "{} | {}", parts.join(" "), wires.join(" "))
    }
}

/// Every wiring of `vertices`, in lexicographic order.
pub fn all_wirings(vertices: &[Vertex]) -> Vec<Graph> {
    let n = vertices.len();
    let inputs: usize = vertices.iter().map(Vertex::arity).sum();
    if inputs + 1 != n {
        return Vec::new();
    }
    Permutation::all(n)
        .into_iter()
        .map(|p| Graph { vertices: vertices.to_vec(), wiring: (1..=n).map(|i| p.image(i) - 1).collect() })
        .collect()
}

/// Black arity tuples `(u_1..u_d)` with `Σu ≤ d − 1`.
pub fn black_arities(d: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, budget: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for u in 0..=budget {
            cur.push(u);
            rec(left - 1, budget - u, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d.saturating_sub(1), &mut Vec::new(), &mut out);
    out
}

/// Non-decreasing arity lists `s_1 ≤ … ≤ s_k`, `s_i ≥ 2`, with `Σ(s_i − 1) = r`.
pub fn arity_partitions(r: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for s in min..=left + 1 {
            cur.push(s);
            rec(left - (s - 1), s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(r, 2, &mut Vec::new(), &mut out);
    out
}

pub fn blacks(arities: &[usize]) -> Vec<Vertex> {
    arities.iter().enumerate().map(|(i, &a)| Vertex::Black { label: i + 1, arity: a }).collect()
}
