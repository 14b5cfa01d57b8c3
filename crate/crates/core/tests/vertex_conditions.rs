//! Scattering matrices of random vertex conditions.

use proptest::prelude::*;
use qgraph_core::campaign::{self, instance_rng};
use qgraph_core::conditions::{locality_decompose, mbp_inverse, Locality, VertexBlock};
use qgraph_core::graph::{GraphSpec, InternalEdgeSpec};
use qgraph_core::linalg::{identity, max_abs, zeros, RankTol, C64};
use qgraph_core::random::{random_hermitian, random_pl, random_instance, GraphParams};
use qgraph_core::{Error, MetricGraph, VertexConditions};
use rand::Rng;

fn random_vc(seed: u64) -> VertexConditions {
    let mut rng = instance_rng(seed, 0);
    let d = rng.random_range(1..=10);
    let (p, l) = random_pl(&mut rng, d);
    VertexConditions::validate(p, l).unwrap()
}

#[test]
fn s_matrix_unitary_on_1000_pairs() {
    let worst = campaign::run(11, 1000, |_, rng| {
        let d = rng.random_range(1..=10);
        let (p, l) = random_pl(rng, d);
        let vc = VertexConditions::validate(p, l).unwrap();
        let k = rng.random_range(0.1..50.0);
        let s = vc.s_matrix(C64::new(k, 0.0)).unwrap();
        max_abs(&(&s * s.adjoint() - identity(d)))
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    assert!(worst < 1e-10, "{worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn limits_and_involutions(seed in any::<u64>()) {
        let vc = random_vc(seed);
        let e = vc.dim();
        let (s_inf, s0) = vc.s_limits();
        prop_assert!(max_abs(&(vc.s_matrix(C64::new(1e6, 0.0)).unwrap() - &s_inf)) < 1e-4);
        prop_assert!(max_abs(&(vc.s_matrix(C64::new(1e-6, 0.0)).unwrap() - &s0)) < 1e-4);
        prop_assert!(max_abs(&(&s0 * &s0 - identity(e))) < 1e-12);
        prop_assert!(max_abs(&(&s_inf * &s_inf - identity(e))) < 1e-12);
        prop_assert!(max_abs(&(vc.s_matrix(C64::new(0.0, 0.0)).unwrap() - &s0)) == 0.0);
    }

    #[test]
    fn trace_s0_counts_rank_q(seed in any::<u64>()) {
        let vc = random_vc(seed);
        let (_, s0) = vc.s_limits();
        let tr = (0..vc.dim()).map(|i| s0[(i, i)]).sum::<C64>();
        let expected = vc.dim() as i64 - 2 * vc.rank_q() as i64;
        prop_assert_eq!(vc.trace_s0(), expected);
        prop_assert!((tr.re - expected as f64).abs() < 1e-10 && tr.im.abs() < 1e-10);
    }

    #[test]
    fn pseudo_inverse_products_give_range_projector(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 2);
        let d = rng.random_range(1..=8);
        // Random rank: compress a hermitian matrix onto a random subspace.
        let h = random_hermitian(&mut rng, d);
        let (p, _) = random_pl(&mut rng, d);
        let l = (identity(d) - &p) * h * (identity(d) - &p);
        let tol = RankTol::default();
        let li = mbp_inverse(&l, tol).unwrap();
        let vc = VertexConditions::validate(p, l.clone()).unwrap();
        prop_assert!(max_abs(&(&li * &l - vc.p_ran_l())) < 1e-10);
        prop_assert!(max_abs(&(&l * &li - vc.p_ran_l())) < 1e-10);
    }

    #[test]
    fn s_derivative_matches_finite_difference(seed in any::<u64>(), k in 0.2f64..20.0) {
        let vc = random_vc(seed);
        let h = 1e-6;
        let fd = (vc.s_matrix(C64::new(k + h, 0.0)).unwrap() - vc.s_matrix(C64::new(k - h, 0.0)).unwrap())
            * C64::new(0.5 / h, 0.0);
        prop_assert!(max_abs(&(vc.s_derivative(C64::new(k, 0.0)).unwrap() - fd)) < 1e-6);
    }
}

#[test]
fn robin_scattering_is_scalar_phase() {
    let (lambda, k) = (1.0, 0.7);
    let vc = VertexConditions::robin(2, lambda);
    let s = vc.s_matrix(C64::new(k, 0.0)).unwrap();
    let i = C64::new(0.0, 1.0);
    let expected = -(C64::new(lambda, 0.0) - i * k) / (C64::new(lambda, 0.0) + i * k);
    assert!(max_abs(&(s - identity(2) * expected)) < 1e-14);
    assert_eq!(VertexConditions::dirichlet(3).trace_s0(), -3);
    assert_eq!(VertexConditions::neumann(3).trace_s0(), 3);
}

#[test]
fn robin_pole_is_reported() {
    let vc = VertexConditions::robin(2, 1.0);
    assert!(matches!(vc.s_matrix(C64::new(0.0, 1.0)), Err(Error::Pole { .. })));
}

#[test]
fn vertex_blocks_assemble_block_diagonal() {
    let g = MetricGraph::new(&GraphSpec {
        vertices: ["c", "v1", "v2", "v3"].map(String::from).to_vec(),
        internal_edges: (1..=3)
            .map(|i| InternalEdgeSpec {
                id: format!("e{i}"),
                tail: "c".into(),
                head: format!("v{i}"),
                length: i as f64,
            })
            .collect(),
        external_edges: vec![],
    })
    .unwrap();
    let blocks = vec![
        VertexBlock { vertex: "c".into(), p: zeros(3, 3), l: identity(3) * C64::new(2.0, 0.0) },
        VertexBlock { vertex: "v1".into(), p: identity(1), l: zeros(1, 1) },
        VertexBlock { vertex: "v2".into(), p: zeros(1, 1), l: zeros(1, 1) },
        VertexBlock { vertex: "v3".into(), p: zeros(1, 1), l: identity(1) * C64::new(-0.5, 0.0) },
    ];
    let vc = VertexConditions::from_vertex_blocks(&g, &blocks).unwrap();
    // Centre holds the three start points, leaves the three ends.
    for i in 0..6 {
        for j in 0..6 {
            let same = g.boundary_vertex(i) == g.boundary_vertex(j);
            if !same {
                assert_eq!(vc.p()[(i, j)], C64::new(0.0, 0.0));
                assert_eq!(vc.l()[(i, j)], C64::new(0.0, 0.0));
            }
        }
    }
    assert_eq!(vc.p()[(g.end_index(0), g.end_index(0))], C64::new(1.0, 0.0));
    assert_eq!(vc.l()[(g.end_index(2), g.end_index(2))], C64::new(-0.5, 0.0));
    assert!(matches!(locality_decompose(&g, &vc).unwrap(), Locality::Local { .. }));
}

#[test]
fn generic_global_conditions_are_nonlocal() {
    let mut nonlocal = 0;
    for seed in 0..50 {
        let inst = random_instance(&mut instance_rng(seed, 3), &GraphParams::default());
        if inst.graph.vertices().len() < 2 || inst.vc.blocks().is_some() {
            continue;
        }
        if let Locality::NonLocal { magnitude, .. } = locality_decompose(&inst.graph, &inst.vc).unwrap() {
            assert!(magnitude > 1e-10);
            nonlocal += 1;
        }
    }
    assert!(nonlocal > 0);
    let local = (0..50)
        .map(|seed| random_instance(&mut instance_rng(seed, 3), &GraphParams::default()))
        .filter(|i| i.vc.blocks().is_some())
        .all(|i| matches!(locality_decompose(&i.graph, &i.vc), Ok(Locality::Local { .. })));
    assert!(local);
}

#[test]
fn validation_rejects_bad_pairs() {
    let half = identity(2) * C64::new(0.5, 0.0);
    assert!(matches!(VertexConditions::validate(half, zeros(2, 2)), Err(Error::NotProjector { .. })));
    let mut skew = zeros(2, 2);
    skew[(0, 1)] = C64::new(1.0, 0.0);
    assert!(matches!(VertexConditions::validate(zeros(2, 2), skew), Err(Error::NotHermitian { .. })));
    assert!(matches!(
        VertexConditions::validate(identity(2), identity(2)),
        Err(Error::NotSupportedOnPPerp { .. })
    ));
    assert!(matches!(
        VertexConditions::validate(identity(2), zeros(3, 3)),
        Err(Error::DimensionMismatch { .. })
    ));
}
