use crate::conditions::VertexConditions;
use crate::error::{Error, Result};
use crate::graph::{BoundaryMatrices, MetricGraph};
use crate::linalg::{inner, CVec, C64, IMAG};

use super::secular::u_matrix;

/// Residual bound for accepting `U(k₀)x₀ = x₀`.
pub const EIGENPAIR_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct EigenpairAtK {
    pub k0: f64,
    pub lam: C64,
    pub x0: CVec,
}

impl EigenpairAtK {
    /// Normalises `x0` and takes `λ = ⟨x₀, U x₀⟩`.
    pub fn new(graph: &MetricGraph, vc: &VertexConditions, k0: f64, x0: CVec) -> Result<Self> {
        let x0 = x0.normalize();
        let u = u_matrix(graph, vc, C64::new(k0, 0.0))?;
        let lam = inner(&x0, &(&u * &x0));
        Ok(Self { k0, lam, x0 })
    }

    pub fn residual(&self, graph: &MetricGraph, vc: &VertexConditions) -> Result<f64> {
        let u = u_matrix(graph, vc, C64::new(self.k0, 0.0))?;
        Ok((&u * &self.x0 - &self.x0 * self.lam).norm())
    }
}

/// `λ′(k₀) = −i[2⟨x₀, L(L² + k₀²)⁻¹x₀⟩ − ⟨x₀, 𝔇x₀⟩]` for an eigenpair with
/// eigenvalue 1. At `k₀ = 0` the first operator is `L⁻¹_MBP`.
pub fn lambda_prime(graph: &MetricGraph, vc: &VertexConditions, pair: &EigenpairAtK) -> Result<C64> {
    let u = u_matrix(graph, vc, C64::new(pair.k0, 0.0))?;
    let residual = (&u * &pair.x0 - &pair.x0).norm();
    if residual > EIGENPAIR_TOL {
        return Err(Error::EigenpairResidual { residual });
    }
    let k2 = pair.k0 * pair.k0;
    let a = vc.l_function(|m| {
        let v = if m == 0.0 { 0.0 } else { m / (m * m + k2) };
        C64::new(v, 0.0)
    });
    let d = BoundaryMatrices::new(graph).dfrak;
    let x = &pair.x0;
    let first = inner(x, &(&a * x)) * 2.0;
    let second = inner(x, &(&d * x));
    Ok(-IMAG * (first - second))
}
