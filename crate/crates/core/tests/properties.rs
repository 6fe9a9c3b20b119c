mod common;

use lapbounds::generators::{gen_random_complex, gen_random_graph};
use lapbounds::{
    boundary_matrix, evaluate_bound, laplacian, BoundId, Instance, LaplacianKind, SimplicialComplex,
};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = SimplicialComplex> {
    (2usize..=7, 1usize..=3, 0.0f64..=1.0, any::<u64>())
        .prop_filter("r < n", |(n, r, _, _)| r < n)
        .prop_map(|(n, r, p, seed)| gen_random_complex(n, r, p, seed, 0).unwrap())
}

fn graph() -> impl Strategy<Value = SimplicialComplex> {
    (1usize..=9, 0.0f64..=1.0, any::<u64>())
        .prop_map(|(n, p, seed)| gen_random_graph(n, p, seed, 0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_squares_to_zero(x in complex()) {
        for r in 2..=x.dim() as usize {
            let a = boundary_matrix(&x, r - 1, true).unwrap();
            let b = boundary_matrix(&x, r, true).unwrap();
            prop_assert!((&a.entries * &b.entries).iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn matches_reference_operator(x in complex()) {
        for r in 1..=x.dim() as usize {
            for (kind, signed) in [(LaplacianKind::Upper, true), (LaplacianKind::SignlessUpper, false)] {
                let ours = common::eig_desc(&laplacian(&x, kind, r).unwrap().entries);
                let theirs = common::eig_desc(&common::upper(&x, r, signed));
                prop_assert!(common::max_diff(&ours, &theirs) < 1e-9);
            }
        }
    }

    #[test]
    fn spectrum_ignores_vertex_order(x in complex(), shift in 0usize..7) {
        let mut order = x.labels().to_vec();
        order.reverse();
        let len = order.len();
        order.rotate_left(shift % len);
        let y = x.with_vertex_order(&order).unwrap();
        for r in 1..=x.dim() as usize {
            let a = common::eig_desc(&laplacian(&x, LaplacianKind::Upper, r).unwrap().entries);
            let b = common::eig_desc(&laplacian(&y, LaplacianKind::Upper, r).unwrap().entries);
            prop_assert!(common::max_diff(&a, &b) < 1e-9);
        }
    }

    #[test]
    fn degree_sum_rhs_grows_with_k(x in complex()) {
        let inst = Instance::new("x", x.clone());
        for r in 1..=x.dim() as usize {
            let kmax = x.f(r as isize - 1) / (r + 1);
            let rhs: Vec<f64> = (1..=kmax)
                .map(|k| evaluate_bound(BoundId::DegreeSumMain, &inst, r, k, 1e-7).unwrap().rhs)
                .collect();
            prop_assert!(rhs.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn cone_f_vector(x in complex(), m in 1usize..=3) {
        let base = x.labels().iter().max().unwrap() + 1;
        let sigma: Vec<u32> = (base..base + m as u32).collect();
        let y = x.join_cone(&sigma).unwrap();
        let f = |i: isize| if i == -1 { 1 } else { x.f(i) };
        for i in 0..=y.dim() {
            let want: usize = (0..=m).filter(|j| *j as isize <= i + 1).map(|j| common::binom(m, j) * f(i - j as isize)).sum();
            prop_assert_eq!(y.f(i), want);
        }
    }

    #[test]
    fn complement_is_an_involution(g in graph()) {
        let back = g.complement_graph().unwrap().complement_graph().unwrap();
        prop_assert_eq!(common::graph_edges(&g), common::graph_edges(&back));
        prop_assert_eq!(g.n_vertices(), back.n_vertices());
    }

    #[test]
    fn file_round_trip(x in complex()) {
        let inst = Instance::new("x", x.clone());
        let text = serde_json::to_string(&inst.to_file()).unwrap();
        let back = lapbounds::ComplexFile::parse(&text).unwrap().into_instance("x").unwrap();
        prop_assert_eq!(back.complex.f_vector(), x.f_vector());
        for r in 1..=x.dim() as usize {
            let a = common::eig_desc(&laplacian(&x, LaplacianKind::Upper, r).unwrap().entries);
            let b = common::eig_desc(&laplacian(&back.complex, LaplacianKind::Upper, r).unwrap().entries);
            prop_assert!(common::max_diff(&a, &b) < 1e-9);
        }
    }

    #[test]
    fn theorem_tier_holds_on_random_graphs(g in graph()) {
        let inst = Instance::new("g", g);
        let ev = lapbounds::Evaluator::new(&inst, 1e-7);
        for id in BoundId::all() {
            if ev.tier(id, 1) != lapbounds::Tier::Theorem || !ev.applicable(id, 1) {
                continue;
            }
            for k in ev.k_range(id, 1).unwrap() {
                let rep = ev.evaluate(id, 1, k).unwrap();
                prop_assert!(rep.holds, "{:?}", rep);
            }
        }
    }
}
