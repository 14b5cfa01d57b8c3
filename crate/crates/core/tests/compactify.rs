//! Closing external edges: scattering blocks, zero-mode counts and the
//! trace and gamma identities.

mod common;

use proptest::prelude::*;
use qgraph_core::campaign::instance_rng;
use qgraph_core::compactify::{
    compactify, default_new_lengths, gamma_and_theorem300, generalized_dims, g_tilde_0_direct,
    trace_identity_sq, Flavor,
};
use qgraph_core::graph::{canonical_subspace, intersect_dim, Subspace, SubspaceKind};
use qgraph_core::linalg::{max_abs, C64};
use qgraph_core::random::{random_instance, random_boundary_projector, Instance};
use qgraph_core::spectral::{algebraic_n, zero_modes_direct};
use qgraph_core::{Error, MetricGraph, VertexConditions};
use rand::Rng;

fn ker_q_perp_dims(inst: &Instance) -> (usize, usize) {
    let tol = inst.vc.tol();
    let perp = Subspace::kernel(inst.vc.q(), tol).orthogonal_complement(tol);
    let asy = canonical_subspace(&inst.graph, SubspaceKind::Asy);
    let asy_zero = asy.sum(&canonical_subspace(&inst.graph, SubspaceKind::Zero), tol).unwrap();
    (
        intersect_dim(&perp, &asy, tol).unwrap(),
        intersect_dim(&perp, &asy_zero, tol).unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_scattering_matrix_is_block_diagonal(seed in any::<u64>(), k in 0.1f64..30.0, neumann in any::<bool>()) {
        let mut rng = instance_rng(seed, 0);
        let inst = random_instance(&mut rng, &common::non_compact());
        let (g, vc) = (&inst.graph, &inst.vc);
        let flavor = if neumann { Flavor::Neumann } else { Flavor::Dirichlet };
        let lengths: Vec<f64> = (0..g.n_external()).map(|_| rng.random_range(0.5..5.0)).collect();
        let c = compactify(g, vc, flavor, &lengths).unwrap();
        prop_assert!(c.graph_hat.is_compact());
        prop_assert_eq!(c.graph_hat.n_internal(), g.n_internal() + g.n_external());

        let kc = C64::new(k, 0.0);
        let s = vc.s_matrix(kc).unwrap();
        let s_hat = c.vc_hat.s_matrix(kc).unwrap();
        let e = g.dim();
        let sign = if neumann { 1.0 } else { -1.0 };
        let new: Vec<usize> = (0..c.graph_hat.dim()).filter(|i| !c.embedding.contains(i)).collect();
        for i in 0..e {
            for j in 0..e {
                prop_assert!((s_hat[(c.embedding[i], c.embedding[j])] - s[(i, j)]).norm() < 1e-12);
            }
            for &j in &new {
                prop_assert!(s_hat[(c.embedding[i], j)].norm() < 1e-12);
                prop_assert!(s_hat[(j, c.embedding[i])].norm() < 1e-12);
            }
        }
        for &i in &new {
            for &j in &new {
                let expected = if i == j { sign } else { 0.0 };
                prop_assert!((s_hat[(i, j)] - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
        let m = g.n_external() as i64;
        prop_assert_eq!(c.vc_hat.trace_s0(), vc.trace_s0() + sign as i64 * m);
    }

    #[test]
    fn closure_trace_identity_holds(seed in any::<u64>(), neumann in any::<bool>()) {
        let inst = random_instance(&mut instance_rng(seed, 1), &common::non_compact());
        let flavor = if neumann { Flavor::Neumann } else { Flavor::Dirichlet };
        let lengths = default_new_lengths(&inst.graph, &inst.vc);
        let c = compactify(&inst.graph, &inst.vc, flavor, &lengths).unwrap();
        let t = trace_identity_sq(c.vc_hat.q(), &c.graph_hat).unwrap();
        prop_assert!(t.holds(), "{:?}", t);
    }

    #[test]
    fn trace_identity_on_structured_projectors(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 2);
        let inst = random_instance(&mut rng, &common::compact());
        let q = random_boundary_projector(&mut rng, &inst.graph);
        let t = trace_identity_sq(&q, &inst.graph).unwrap();
        prop_assert!(t.holds(), "{:?}", t);
    }
}

#[test]
fn closure_zero_mode_counts() {
    let population = common::collect(31, 100, &common::non_compact(), common::small_tau);
    for (idx, inst) in population.iter().enumerate() {
        let (g, vc) = (&inst.graph, &inst.vc);
        let dims = generalized_dims(g, vc, None).unwrap();
        assert!(dims.tau_hat_d < 1.0 && dims.tau_hat_n < 1.0, "instance {idx}: {dims:?}");
        assert_eq!(dims.g0_hat_d, dims.g0, "instance {idx}");
        assert_eq!(dims.g_tilde_0, g_tilde_0_direct(g, vc).unwrap(), "instance {idx}");
        assert_eq!(dims.g0, dims.g_tilde_0 - dims.g_tilde_p0, "instance {idx}");
        let n = algebraic_n(g, vc).unwrap();
        let (asy, asy_zero) = ker_q_perp_dims(inst);
        assert_eq!(dims.n_hat_d + asy, n + asy_zero, "instance {idx}: {dims:?}");
        assert_eq!(dims.n_hat_n, dims.g_tilde_0 + asy, "instance {idx}: {dims:?}");
    }
}

#[test]
fn gamma_identity_on_compact_graphs_is_a_quarter_trace() {
    let population = common::collect(32, 300, &common::compact(), common::small_tau);
    for inst in &population {
        let gi = gamma_and_theorem300(&inst.graph, &inst.vc).unwrap();
        assert_eq!(gi.g_tilde_p0, 0);
        assert_eq!(gi.residual_quarters, 0, "{gi:?}");
        assert_eq!(4.0 * gi.gamma, gi.trace_s0 as f64);
    }
}

#[test]
fn gamma_identity_on_non_compact_graphs() {
    let population = common::collect(33, 100, &common::non_compact(), common::small_tau);
    for inst in &population {
        let gi = gamma_and_theorem300(&inst.graph, &inst.vc).unwrap();
        assert_eq!(gi.residual_quarters, 0, "{gi:?}");
        assert_eq!(gi.external_count, inst.graph.n_external());
    }
}

#[test]
fn half_line_closures_follow_the_end_condition() {
    let g = MetricGraph::half_line();
    for (vc, g0_hat_n) in [(VertexConditions::neumann(1), 1), (VertexConditions::dirichlet(1), 0)] {
        let dims = generalized_dims(&g, &vc, Some(&[4.0])).unwrap();
        assert_eq!(dims.g0, 0);
        assert_eq!(dims.g0_hat_n, g0_hat_n);
        assert_eq!(dims.g0_hat_d, 0);
        let d = compactify(&g, &vc, Flavor::Dirichlet, &[4.0]).unwrap();
        assert_eq!(zero_modes_direct(&d.graph_hat, &d.vc_hat).unwrap().g0, 0);
    }
}

#[test]
fn compactify_rejects_mismatched_inputs() {
    let g = MetricGraph::star(2);
    let vc = VertexConditions::neumann(2);
    assert!(matches!(
        compactify(&g, &vc, Flavor::Neumann, &[1.0]),
        Err(Error::LengthCount { expected: 2, got: 1 })
    ));
    assert!(matches!(
        compactify(&g, &VertexConditions::neumann(3), Flavor::Neumann, &[1.0, 1.0]),
        Err(Error::DimensionMismatch { .. })
    ));
    let interval = MetricGraph::interval(1.0).unwrap();
    let q = VertexConditions::neumann(2);
    assert!(matches!(trace_identity_sq(q.q(), &g), Err(Error::NotCompact)));
    assert!(max_abs(q.q()) == 0.0);
    assert!(trace_identity_sq(q.q(), &interval).unwrap().holds());
}
