//! Three independent solvers for the zero eigenspace.
//!
//! On internal edges a zero mode is affine, `ψ_e(x) = α_e + β_e x`, and it
//! vanishes on external edges. Every solver returns the coefficient pairs
//! `(α, β)` so the results can be compared as subspaces of `C^{2n}`.

use serde::Serialize;

use crate::conditions::VertexConditions;
use crate::error::{Error, Result};
use crate::graph::{canonical_subspace, BoundaryMatrices, MetricGraph, Subspace, SubspaceKind};
use crate::linalg::{hcat, identity, max_abs, null_space, vstack, zeros, CMat, RankTol, C64};

use super::multiplicity::tau_max;
use super::secular::check_dims;

/// Margin below 1 required for the fast solver.
pub const TAU_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroModeMethod {
    Fast,
    Direct,
    Stacked,
}

#[derive(Debug, Clone)]
pub struct ZeroModeBasis {
    /// `n × g₀` edgewise constants.
    pub alpha: CMat,
    /// `n × g₀` edgewise slopes.
    pub beta: CMat,
    pub g0: usize,
    pub method: ZeroModeMethod,
}

impl ZeroModeBasis {
    fn from_coefficients(c: CMat, n: usize, method: ZeroModeMethod) -> Self {
        Self {
            alpha: c.rows(0, n).into_owned(),
            beta: c.rows(n, n).into_owned(),
            g0: c.ncols(),
            method,
        }
    }

    /// Span of the stacked `(α; β)` columns in `C^{2n}`.
    pub fn span(&self, tol: RankTol) -> Subspace {
        Subspace::span(&vstack(&[&self.alpha, &self.beta]), tol)
    }

    pub fn max_abs_beta(&self) -> f64 {
        max_abs(&self.beta)
    }

    /// Boundary values `ψ̲ = (α, α + Dβ, 0)` and derivatives `ψ̲′ = (β, β, 0)`.
    pub fn boundary_data(&self, graph: &MetricGraph) -> (CMat, CMat) {
        let n = graph.n_internal();
        let e = graph.dim();
        let mut val = zeros(e, self.g0);
        let mut der = zeros(e, self.g0);
        for col in 0..self.g0 {
            for (i, edge) in graph.internal_edges().iter().enumerate() {
                let (a, b) = (self.alpha[(i, col)], self.beta[(i, col)]);
                val[(i, col)] = a;
                val[(n + i, col)] = a + b * edge.length;
                der[(i, col)] = b;
                der[(n + i, col)] = b;
            }
        }
        (val, der)
    }

    /// Largest entry of `(P + L)ψ̲ + P⊥Iψ̲′` over the basis, relative to the
    /// largest coefficient.
    pub fn residual(&self, graph: &MetricGraph, vc: &VertexConditions) -> f64 {
        if self.g0 == 0 {
            return 0.0;
        }
        let (val, der) = self.boundary_data(graph);
        let i = BoundaryMatrices::new(graph).i_signs;
        let r = (vc.p() + vc.l()) * val + vc.p_perp() * i * der;
        let scale = max_abs(&self.alpha).max(max_abs(&self.beta)).max(1e-300);
        max_abs(&r) / scale
    }
}

/// Zero modes as `ker Q ∩ M_sy` (edgewise constants), valid when `τ_max < 1`.
pub fn zero_modes_fast(graph: &MetricGraph, vc: &VertexConditions) -> Result<ZeroModeBasis> {
    check_dims(graph, vc)?;
    let tau = tau_max(graph, vc)?;
    if tau >= 1.0 - TAU_MARGIN {
        return Err(Error::FastSolverInapplicable { tau });
    }
    let tol = vc.tol();
    let n = graph.n_internal();
    let ker_q = Subspace::kernel(vc.q(), tol);
    let sy = canonical_subspace(graph, SubspaceKind::Sy);
    let cap = ker_q.intersection(&sy, tol)?;
    let mut coeffs = zeros(2 * n, cap.dim());
    for col in 0..cap.dim() {
        for i in 0..n {
            coeffs[(i, col)] = cap.basis()[(i, col)];
        }
    }
    Ok(ZeroModeBasis::from_coefficients(coeffs, n, ZeroModeMethod::Fast))
}

/// Kernel of the vertex conditions applied to the affine ansatz.
pub fn zero_modes_direct(graph: &MetricGraph, vc: &VertexConditions) -> Result<ZeroModeBasis> {
    check_dims(graph, vc)?;
    let n = graph.n_internal();
    let e = graph.dim();
    if n == 0 {
        return Ok(ZeroModeBasis::from_coefficients(zeros(0, 0), 0, ZeroModeMethod::Direct));
    }
    // ψ̲ = A_α α + A_β β, ψ̲′ = B β with A_α = [1; 1; 0], A_β = [0; D; 0],
    // B = [1; 1; 0].
    let mut a_alpha = zeros(e, n);
    let mut a_beta = zeros(e, n);
    let mut ib = zeros(e, n);
    for (i, edge) in graph.internal_edges().iter().enumerate() {
        a_alpha[(i, i)] = C64::new(1.0, 0.0);
        a_alpha[(n + i, i)] = C64::new(1.0, 0.0);
        a_beta[(n + i, i)] = C64::new(edge.length, 0.0);
        ib[(i, i)] = C64::new(1.0, 0.0);
        ib[(n + i, i)] = C64::new(-1.0, 0.0);
    }
    let pl = vc.p() + vc.l();
    let sys = hcat(&(&pl * a_alpha), &(&pl * a_beta + vc.p_perp() * ib));
    let ker = null_space(&sys, vc.tol());
    Ok(ZeroModeBasis::from_coefficients(ker, n, ZeroModeMethod::Direct))
}

/// Stacked three-condition system on boundary values `v ∈ M`, pulled back
/// through `(α, β) = C⁺v`.
pub fn zero_modes_lemma119(graph: &MetricGraph, vc: &VertexConditions) -> Result<ZeroModeBasis> {
    check_dims(graph, vc)?;
    let n = graph.n_internal();
    let e = graph.dim();
    if n == 0 {
        return Ok(ZeroModeBasis::from_coefficients(zeros(0, 0), 0, ZeroModeMethod::Stacked));
    }
    let bm = BoundaryMatrices::new(graph);
    let one = identity(e);
    let r1 = vc.p_ran_l() * (vc.l_pinv() * &bm.g - &one);
    let r2 = vc.p_perp() - &one;
    let r3 = (vc.q() - &one) * &bm.g;
    let r4 = canonical_subspace(graph, SubspaceKind::Zero).projector();
    let sys = vstack(&[&r1, &r2, &r3, &r4]);
    let ker = null_space(&sys, vc.tol());
    let coeffs = (&bm.c_mbp_inv * ker).rows(0, 2 * n).into_owned();
    Ok(ZeroModeBasis::from_coefficients(coeffs, n, ZeroModeMethod::Stacked))
}
