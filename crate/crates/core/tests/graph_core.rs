//! Boundary-space matrices and subspace intersections on random graphs.

use proptest::prelude::*;
use qgraph_core::campaign::instance_rng;
use qgraph_core::graph::{
    canonical_subspace, intersect_dim, transfer_matrix, BoundaryMatrices, GraphSpec,
    InternalEdgeSpec, Subspace, SubspaceKind,
};
use qgraph_core::linalg::{hermitian_eigen, identity, max_abs, RankTol, C64};
use qgraph_core::random::{random_graph, random_instance, GraphParams};
use qgraph_core::{Error, MetricGraph};

fn graph_from_seed(seed: u64) -> MetricGraph {
    random_graph(&mut instance_rng(seed, 0), &GraphParams::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn internal_transfer_block_is_unitary(seed in any::<u64>(), k in 0.0f64..60.0) {
        let g = graph_from_seed(seed);
        let n = g.n_internal();
        let t = transfer_matrix(&g, C64::new(k, 0.0));
        let t_int = t.view((0, 0), (2 * n, 2 * n)).into_owned();
        prop_assert!(max_abs(&(&t_int * t_int.adjoint() - identity(2 * n))) < 1e-12);
        // External block vanishes.
        prop_assert_eq!(max_abs(&t.view((2 * n, 2 * n), (g.n_external(), g.n_external())).into_owned()), 0.0);
    }

    #[test]
    fn g_is_minus_v_times_c_pseudo_inverse_on_m(seed in any::<u64>()) {
        let g = graph_from_seed(seed);
        let bm = BoundaryMatrices::new(&g);
        let pm = canonical_subspace(&g, SubspaceKind::M).projector();
        let lhs = &bm.g * &pm;
        let rhs = -(&bm.v * &bm.c_mbp_inv) * &pm;
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn g_is_psd_with_kernel_sy_plus_zero(seed in any::<u64>()) {
        let g = graph_from_seed(seed);
        let bm = BoundaryMatrices::new(&g);
        let tol = RankTol::default();
        let (vals, _) = hermitian_eigen(&bm.g);
        prop_assert!(vals.iter().all(|&v| v > -1e-12));
        let ker = Subspace::kernel(&bm.g, tol);
        let expected = canonical_subspace(&g, SubspaceKind::Sy)
            .sum(&canonical_subspace(&g, SubspaceKind::Zero), tol)
            .unwrap();
        prop_assert!(ker.same_span(&expected, tol).unwrap());
        prop_assert!(max_abs(&(&bm.g * expected.basis())) < 1e-12);
    }

    #[test]
    fn intersect_dim_symmetric_bounded_and_stable(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 1);
        let inst = random_instance(&mut rng, &GraphParams::default());
        let tol = inst.vc.tol();
        let spaces = [
            canonical_subspace(&inst.graph, SubspaceKind::Sy),
            canonical_subspace(&inst.graph, SubspaceKind::Asy),
            canonical_subspace(&inst.graph, SubspaceKind::Zero),
            canonical_subspace(&inst.graph, SubspaceKind::M),
            Subspace::kernel(inst.vc.q(), tol),
            Subspace::span(inst.vc.q(), tol),
            Subspace::span(inst.vc.p(), tol),
        ];
        for a in &spaces {
            for b in &spaces {
                let ab = intersect_dim(a, b, tol).unwrap();
                prop_assert_eq!(ab, intersect_dim(b, a, tol).unwrap());
                prop_assert!(ab <= a.dim().min(b.dim()));
                prop_assert_eq!(ab, intersect_dim(a, b, tol.halved()).unwrap());
            }
        }
    }
}

#[test]
fn canonical_subspace_dimensions() {
    for seed in 0..100 {
        let g = graph_from_seed(seed);
        let (n, m) = (g.n_internal(), g.n_external());
        let dims = [SubspaceKind::Sy, SubspaceKind::Asy, SubspaceKind::Zero, SubspaceKind::M]
            .map(|k| canonical_subspace(&g, k).dim());
        assert_eq!(dims, [n, n, m, 2 * n]);
        let tol = RankTol::default();
        let sy = canonical_subspace(&g, SubspaceKind::Sy);
        let asy = canonical_subspace(&g, SubspaceKind::Asy);
        assert_eq!(intersect_dim(&sy, &asy, tol).unwrap(), 0);
        assert!(sy.sum(&asy, tol).unwrap().same_span(&canonical_subspace(&g, SubspaceKind::M), tol).unwrap());
    }
}

#[test]
fn boundary_order_follows_declaration() {
    let spec = GraphSpec {
        vertices: vec!["a".into(), "b".into()],
        internal_edges: vec![
            InternalEdgeSpec { id: "e10".into(), tail: "a".into(), head: "b".into(), length: 1.0 },
            InternalEdgeSpec { id: "e2".into(), tail: "b".into(), head: "a".into(), length: 2.0 },
        ],
        external_edges: vec![],
    };
    let g = MetricGraph::new(&spec).unwrap();
    assert_eq!(g.lengths(), vec![1.0, 2.0]);
    assert_eq!(g.boundary_vertex(g.start_index(1)), 1);
    assert_eq!(g.boundary_vertex(g.end_index(1)), 0);
    assert_eq!(g.vertex_boundary_indices(0), vec![0, 3]);
}

#[test]
fn invalid_graphs_name_the_problem() {
    let bad_len = GraphSpec {
        vertices: vec!["a".into()],
        internal_edges: vec![InternalEdgeSpec { id: "loop".into(), tail: "a".into(), head: "a".into(), length: 0.0 }],
        external_edges: vec![],
    };
    assert!(matches!(
        MetricGraph::new(&bad_len),
        Err(Error::InvalidLength { ref edge, .. }) if edge == "loop"
    ));
    let dangling = GraphSpec {
        vertices: vec!["a".into()],
        internal_edges: vec![InternalEdgeSpec { id: "e".into(), tail: "a".into(), head: "z".into(), length: 1.0 }],
        external_edges: vec![],
    };
    assert!(matches!(MetricGraph::new(&dangling), Err(Error::DanglingEndpoint { .. })));
}
