//! Secular function, its roots, and the multiplicities of the zero eigenvalue.

mod derivative;
mod multiplicity;
mod roots;
mod secular;
mod zero_modes;

pub use derivative::{lambda_prime, EigenpairAtK, EIGENPAIR_TOL};
pub use multiplicity::{
    algebraic_n, algebraic_n_detailed, algebraic_ntilde, default_radius, lambda_plus_min,
    multiplicity_at, ntilde_from_subspaces, tau_eigenvalues, tau_matrix, tau_max, Winding,
};
pub use roots::{find_negative_eigenvalues, find_spectrum, NegativeScan, SpectralPoint, MERGE_TOL};
pub use secular::{log_derivative, secular, u_derivative, u_matrix};
pub use zero_modes::{
    zero_modes_direct, zero_modes_fast, zero_modes_lemma119, ZeroModeBasis, ZeroModeMethod,
    TAU_MARGIN,
};

use serde::Serialize;

use crate::conditions::VertexConditions;
use crate::error::Result;
use crate::graph::MetricGraph;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicityReport {
    pub g0: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "Ntilde")]
    pub ntilde: usize,
    pub tau_max: f64,
    /// `2γ = 2g₀ − N`, kept as an integer so `γ` is exact.
    pub gamma_twice: i64,
    pub gamma: f64,
    pub trace_s0: i64,
}

/// `g₀` from the direct solver, `N` from the winding number, `Ñ` as a kernel
/// dimension.
pub fn multiplicity_report(graph: &MetricGraph, vc: &VertexConditions) -> Result<MultiplicityReport> {
    let g0 = zero_modes_direct(graph, vc)?.g0;
    let n = algebraic_n(graph, vc)?;
    let gamma_twice = 2 * g0 as i64 - n as i64;
    Ok(MultiplicityReport {
        g0,
        n,
        ntilde: algebraic_ntilde(graph, vc)?,
        tau_max: tau_max(graph, vc)?,
        gamma_twice,
        gamma: gamma_twice as f64 / 2.0,
        trace_s0: vc.trace_s0(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn robin_interval_report() {
        let vc = VertexConditions::robin(2, 1.0);
        let r2 = multiplicity_report(&MetricGraph::interval(2.0).unwrap(), &vc).unwrap();
        assert_eq!((r2.g0, r2.n, r2.ntilde), (1, 3, 1));
        assert_eq!(r2.gamma, -0.5);
        assert_eq!(r2.trace_s0, -2);
        let r1 = multiplicity_report(&MetricGraph::interval(1.0).unwrap(), &vc).unwrap();
        assert_eq!((r1.g0, r1.n, r1.ntilde), (0, 1, 1));
        assert_eq!(r1.gamma, -0.5);
    }
}
