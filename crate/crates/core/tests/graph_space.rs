use std::collections::BTreeMap;

use natop::graph_space::bridge::decoration_symbol;
use natop::graph_space::{
    all_wirings, black_arities, check_vforder_bound, decorated_space, decorated_space_shuffled, delta_h,
    dim_h0_via_delta_h, enumerate_decorated, independence_rank, raw_space, to_tensor_term, vforder_profile, Graph,
    Realization, Vertex,
};
use natop::jet_calculus::ideal::leading_symbol;
use natop::jet_calculus::term::{scalar_mul, torsion, trace, vnabla, x, TensorTerm};
use natop::jet_calculus::{check_zero, eval_random, JetContext};
use natop::linalg::rank;
use natop::perm_algebra::{GeneratorFamily, Permutation};
use natop::Q;

fn b(label: usize, arity: usize) -> Vertex {
    Vertex::Black { label, arity }
}

fn k2() -> Vertex {
    Vertex::Decorated { arity: 2, decoration: 0 }
}

#[test]
fn dimensions_agree_for_small_d() {
    for (d, want) in [(1, 1), (2, 7)] {
        assert_eq!(enumerate_decorated::<Q>(d).unwrap(), want);
        assert_eq!(dim_h0_via_delta_h::<Q>(d).unwrap(), want);
    }
    assert!(enumerate_decorated::<Q>(0).is_err());
}

#[test]
fn d2_profile_by_vforder() {
    assert_eq!(vforder_profile::<Q>(2).unwrap(), BTreeMap::from([(0, 3), (1, 4)]));
}

#[test]
fn shuffled_enumeration_gives_the_same_dimension() {
    for seed in 0..4 {
        assert_eq!(decorated_space_shuffled::<Q>(2, seed).unwrap().dimension(), 7);
    }
}

#[test]
fn relabeling_inputs_keeps_the_class() {
    // T(X₁,X₂) and T(X₂,X₁) are proportional in the quotient
    let space = decorated_space::<Q>(2).unwrap();
    let g = Graph { vertices: vec![b(1, 0), b(2, 0), k2()], wiring: vec![0, 1, 2] };
    let h = g.permute_inputs(2, &Permutation::transposition(2, 1, 2));
    assert_ne!(g, h);
    assert!(space.index_of(&g).is_some() && space.index_of(&h).is_some());
}

#[test]
fn balance_law_bounds_the_decorated_vertices() {
    for d in 1..=4 {
        for us in black_arities(d) {
            assert!(us.iter().sum::<usize>() < d);
        }
    }
    for g in decorated_space::<Q>(3).unwrap().basis() {
        let inputs: usize = g.vertices.iter().map(Vertex::arity).sum();
        assert_eq!(inputs + 1, g.vertices.len());
        assert!(g.is_valid());
    }
}

#[test]
fn delta_h_on_the_connection_vertex() {
    let g = Graph { vertices: vec![b(1, 0), b(2, 0), Vertex::Nabla { k: 0 }], wiring: vec![1, 0, 2] };
    let img = delta_h(&g);
    assert_eq!(img.len(), 1);
    let (sign, h) = &img[0];
    assert_eq!(*sign, -1);
    assert_eq!(h.vertices.iter().filter(|v| matches!(v, Vertex::White { arity: 2 })).count(), 1);
    assert!(raw_space::<Q>(2, true).unwrap().index_of(h).is_some());
    assert!(delta_h(&Graph { vertices: vec![b(1, 0)], wiring: vec![0] }).is_empty());
}

#[test]
fn vforder_examples() {
    let t = Graph { vertices: vec![b(1, 0), b(2, 0), k2()], wiring: vec![0, 1, 2] };
    assert_eq!(t.vforder(), 0);
    let n = Graph { vertices: vec![b(1, 1), b(2, 0)], wiring: vec![1, 0] };
    assert_eq!(n.vforder(), 1);
}

#[test]
fn vforder_bound() {
    let fam = GeneratorFamily::<Q>::Classical;
    for (d, a) in [(1, 0), (2, 0), (2, 1), (3, 0)] {
        let r = check_vforder_bound(d, a, &fam).unwrap();
        assert!(r.pass, "{r:?}");
        if a == 0 {
            assert!(!r.vf_zero_uses_v);
        }
    }
}

#[test]
fn all_wirings_counts() {
    // two inputs, three vertices, one anchor: 3! bijections
    assert_eq!(all_wirings(&[b(1, 0), b(2, 0), k2()]).len(), 6);
}

fn classical() -> Realization<Q> {
    Realization::new(GeneratorFamily::Classical)
}

fn same_operator(a: TensorTerm<Q>, b: TensorTerm<Q>) -> bool {
    check_zero(&a.minus(b), &JetContext::new(3)).unwrap().is_zero()
}

#[test]
fn bridge_examples() {
    let g = Graph { vertices: vec![b(1, 0), b(2, 0), k2()], wiring: vec![0, 1, 2] };
    assert!(same_operator(to_tensor_term(&g, &mut classical()).unwrap(), torsion(x(1), x(2))));

    let g = Graph { vertices: vec![b(1, 0), b(2, 0), k2()], wiring: vec![2, 1, 0] };
    let want = scalar_mul(trace(torsion(x(9), x(2)), 9).unwrap(), x(1));
    assert!(same_operator(to_tensor_term(&g, &mut classical()).unwrap(), want));

    let g = Graph { vertices: vec![b(1, 1), b(2, 0)], wiring: vec![1, 0] };
    assert!(same_operator(to_tensor_term(&g, &mut classical()).unwrap(), vnabla(x(2), x(1))));

    let g = Graph { vertices: vec![Vertex::Nabla { k: 0 }, b(1, 0)], wiring: vec![1, 1, 0] };
    assert!(to_tensor_term(&g, &mut classical()).is_err());
}

#[test]
fn realized_decorations_have_the_right_symbols() {
    for fam in [GeneratorFamily::<Q>::Classical, GeneratorFamily::Canonical] {
        let mut real = Realization::new(fam);
        for s in 2..=4 {
            for (i, op) in real.operators(s).unwrap().to_vec().iter().enumerate() {
                assert_eq!(leading_symbol(op, s).unwrap(), decoration_symbol(s, i).unwrap());
            }
        }
    }
}

/// The seven operators listed for two vector fields.
fn listed_d2() -> Vec<TensorTerm<Q>> {
    let tr = |t: TensorTerm<Q>| trace(t, 9).unwrap();
    vec![
        vnabla(x(1), x(2)),
        vnabla(x(2), x(1)),
        scalar_mul(tr(vnabla(x(9), x(2))), x(1)),
        scalar_mul(tr(vnabla(x(9), x(1))), x(2)),
        torsion(x(1), x(2)),
        scalar_mul(tr(torsion(x(9), x(2))), x(1)),
        scalar_mul(tr(torsion(x(9), x(1))), x(2)),
    ]
}

fn evaluation_rank(terms: &[TensorTerm<Q>], m: usize, trials: u64) -> usize {
    let ctx = JetContext::new(m);
    let mut rows = vec![Vec::new(); terms.len()];
    for seed in 0..trials {
        for (row, v) in rows.iter_mut().zip(eval_random(terms, &ctx, seed).unwrap()) {
            row.extend(v);
        }
    }
    rank(&rows)
}

#[test]
fn d2_basis_spans_the_listed_operators() {
    let space = decorated_space::<Q>(2).unwrap();
    let mut real = classical();
    let basis: Vec<_> = space.basis().into_iter().map(|g| to_tensor_term(g, &mut real).unwrap()).collect();
    let listed = listed_d2();
    assert_eq!(evaluation_rank(&listed, 3, 8), 7);
    let both: Vec<_> = basis.iter().chain(&listed).cloned().collect();
    assert_eq!(evaluation_rank(&both, 3, 8), 7);
}

#[test]
fn independence_ranks() {
    let fam = || GeneratorFamily::<Q>::Classical;
    assert_eq!(independence_rank(1, 1, 3, fam()).unwrap(), 1);
    assert_eq!(independence_rank(2, 3, 8, fam()).unwrap(), 7);
    let low = independence_rank(2, 2, 8, fam()).unwrap();
    assert!(low <= 7);
    assert_eq!(low, 6, "regression value below the stable range");
    assert_eq!(independence_rank(2, 3, 8, GeneratorFamily::<Q>::Canonical).unwrap(), 7);
}
