use crate::linalg::{zeros, CMat, C64, IMAG};

use super::MetricGraph;

/// Fixed matrices on the boundary space that depend on the graph only.
///
/// Blocks are written with respect to `[starts | ends | external]`, and `D`
/// is the diagonal matrix of internal lengths.
#[derive(Debug, Clone)]
pub struct BoundaryMatrices {
    /// `diag(1, −1, 1)`: orientation signs of the outward derivative.
    pub i_signs: CMat,
    /// `[[0, 1], [1, 0]] ⊕ 0`.
    pub j: CMat,
    pub d_len: CMat,
    /// `diag(D, D, 0)`.
    pub dfrak: CMat,
    /// `[[D⁻¹, −D⁻¹], [−D⁻¹, D⁻¹]] ⊕ 0`.
    pub g: CMat,
    /// `[[1, 0], [1, D]] ⊕ 0`: maps edge coefficients `(α, β)` to boundary values.
    pub c: CMat,
    /// Inverse of `C` on `M = M_sy ⊕ M_asy`, zero on `M₀`.
    pub c_mbp_inv: CMat,
    /// `[[0, 1], [0, −1]] ⊕ 0`.
    pub v: CMat,
}

impl BoundaryMatrices {
    pub fn new(graph: &MetricGraph) -> Self {
        let n = graph.n_internal();
        let e = graph.dim();
        let lens = graph.lengths();
        let r = |x: f64| C64::new(x, 0.0);

        let mut i_signs = zeros(e, e);
        let mut j = zeros(e, e);
        let mut d_len = zeros(n, n);
        let mut dfrak = zeros(e, e);
        let mut g = zeros(e, e);
        let mut c = zeros(e, e);
        let mut c_mbp_inv = zeros(e, e);
        let mut v = zeros(e, e);

        for i in 0..e {
            i_signs[(i, i)] = r(if i >= n && i < 2 * n { -1.0 } else { 1.0 });
        }
        for (k, &l) in lens.iter().enumerate() {
            let (s, t) = (k, n + k);
            j[(s, t)] = r(1.0);
            j[(t, s)] = r(1.0);
            d_len[(k, k)] = r(l);
            dfrak[(s, s)] = r(l);
            dfrak[(t, t)] = r(l);
            g[(s, s)] = r(1.0 / l);
            g[(t, t)] = r(1.0 / l);
            g[(s, t)] = r(-1.0 / l);
            g[(t, s)] = r(-1.0 / l);
            c[(s, s)] = r(1.0);
            c[(t, s)] = r(1.0);
            c[(t, t)] = r(l);
            c_mbp_inv[(s, s)] = r(1.0);
            c_mbp_inv[(t, s)] = r(-1.0 / l);
            c_mbp_inv[(t, t)] = r(1.0 / l);
            v[(s, t)] = r(1.0);
            v[(t, t)] = r(-1.0);
        }

        Self {
            i_signs,
            j,
            d_len,
            dfrak,
            g,
            c,
            c_mbp_inv,
            v,
        }
    }
}

/// `T(k; l)`: antidiagonal `e^{ikl_e}` on the internal block, zero elsewhere.
pub fn transfer_matrix(graph: &MetricGraph, k: C64) -> CMat {
    let n = graph.n_internal();
    let e = graph.dim();
    let mut t = zeros(e, e);
    for (idx, edge) in graph.internal_edges().iter().enumerate() {
        let phase = (IMAG * k * edge.length).exp();
        t[(idx, n + idx)] = phase;
        t[(n + idx, idx)] = phase;
    }
    t
}

/// `dT/dk = i·T(k)·𝔇`.
pub fn transfer_derivative(graph: &MetricGraph, k: C64) -> CMat {
    let t = transfer_matrix(graph, k);
    let d = BoundaryMatrices::new(graph).dfrak;
    (t * d) * IMAG
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphSpec, InternalEdgeSpec};
    use crate::linalg::{identity, max_abs, RankTol};

    fn two_edges() -> MetricGraph {
        MetricGraph::new(&GraphSpec {
            vertices: vec!["a".into(), "b".into()],
            internal_edges: vec![
                InternalEdgeSpec {
                    id: "e0".into(),
                    tail: "a".into(),
                    head: "b".into(),
                    length: 1.5,
                },
                InternalEdgeSpec {
                    id: "e1".into(),
                    tail: "b".into(),
                    head: "b".into(),
                    length: 0.7,
                },
            ],
            external_edges: vec![crate::graph::ExternalEdgeSpec {
                id: "x".into(),
                anchor: "a".into(),
            }],
        })
        .unwrap()
    }

    #[test]
    fn t_at_zero_is_j() {
        let g = two_edges();
        let bm = BoundaryMatrices::new(&g);
        assert!(max_abs(&(transfer_matrix(&g, C64::new(0.0, 0.0)) - &bm.j)) < 1e-15);
    }

    #[test]
    fn interval_pi_phase() {
        let g = MetricGraph::interval(std::f64::consts::PI).unwrap();
        let t = transfer_matrix(&g, C64::new(1.0, 0.0));
        assert!((t[(0, 1)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((t[(1, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn star_transfer_vanishes() {
        let g = MetricGraph::star(3);
        assert_eq!(max_abs(&transfer_matrix(&g, C64::new(2.0, 1.0))), 0.0);
    }

    #[test]
    fn g_equals_minus_v_cinv_on_m() {
        let g = two_edges();
        let bm = BoundaryMatrices::new(&g);
        let lhs = &bm.g;
        let rhs = -(&bm.v * &bm.c_mbp_inv);
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
        // C·C⁺ is the identity on M and zero on M₀.
        let m = crate::graph::canonical_subspace(&g, crate::graph::SubspaceKind::M);
        let cc = &bm.c * &bm.c_mbp_inv;
        assert!(max_abs(&(&cc * m.basis() - m.basis())) < 1e-12);
        assert!(max_abs(&(bm.i_signs.clone() * &bm.i_signs - identity(5))) < 1e-15);
        assert_eq!(crate::linalg::rank(&bm.g, RankTol::default()), 2);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let g = two_edges();
        let k = C64::new(0.8, 0.1);
        let h = 1e-6;
        let fd = (transfer_matrix(&g, k + h) - transfer_matrix(&g, k - h)) / C64::new(2.0 * h, 0.0);
        assert!(max_abs(&(fd - transfer_derivative(&g, k))) < 1e-8);
    }
}
