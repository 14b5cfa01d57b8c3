use crate::conditions::VertexConditions;
use crate::error::{Error, Result};
use crate::graph::{transfer_derivative, transfer_matrix, MetricGraph};
use crate::linalg::{determinant, identity, trace, CMat, C64};

pub(crate) fn check_dims(graph: &MetricGraph, vc: &VertexConditions) -> Result<()> {
    if graph.dim() != vc.dim() {
        return Err(Error::DimensionMismatch {
            expected: graph.dim(),
            got: vc.dim(),
        });
    }
    Ok(())
}

/// `U(k) = 𝔖(k)·T(k)`.
pub fn u_matrix(graph: &MetricGraph, vc: &VertexConditions, k: C64) -> Result<CMat> {
    check_dims(graph, vc)?;
    Ok(vc.s_matrix(k)? * transfer_matrix(graph, k))
}

/// `dU/dk = 𝔖′T + 𝔖T′`.
pub fn u_derivative(graph: &MetricGraph, vc: &VertexConditions, k: C64) -> Result<CMat> {
    check_dims(graph, vc)?;
    let s = vc.s_matrix(k)?;
    let ds = vc.s_derivative(k)?;
    Ok(ds * transfer_matrix(graph, k) + s * transfer_derivative(graph, k))
}

/// `F(k) = det(1 − U(k))`.
pub fn secular(graph: &MetricGraph, vc: &VertexConditions, k: C64) -> Result<C64> {
    let u = u_matrix(graph, vc, k)?;
    Ok(determinant(&(identity(u.nrows()) - u)))
}

/// `F′/F = −tr((1 − U)⁻¹ U′)`.
pub fn log_derivative(graph: &MetricGraph, vc: &VertexConditions, k: C64) -> Result<C64> {
    let u = u_matrix(graph, vc, k)?;
    let du = u_derivative(graph, vc, k)?;
    let a = identity(u.nrows()) - u;
    let x = a.lu().solve(&du).ok_or(Error::Singular)?;
    Ok(-trace(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs, IMAG};

    #[test]
    fn u_at_zero_is_s0_j() {
        let g = MetricGraph::interval(1.3).unwrap();
        let vc = VertexConditions::robin(2, 0.7);
        let u = u_matrix(&g, &vc, c(0.0, 0.0)).unwrap();
        let j = crate::graph::BoundaryMatrices::new(&g).j;
        assert!(max_abs(&(u - vc.s_limits().1 * j)) < 1e-15);
    }

    #[test]
    fn neumann_interval_secular() {
        let l = 1.7;
        let g = MetricGraph::interval(l).unwrap();
        let vc = VertexConditions::neumann(2);
        for k in [c(0.3, 0.0), c(2.0, 0.5), c(-1.0, 0.2)] {
            let expect = C64::new(1.0, 0.0) - (IMAG * k * (2.0 * l)).exp();
            assert!((secular(&g, &vc, k).unwrap() - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn robin_interval_secular() {
        let (lam, l) = (1.0, 2.0);
        let g = MetricGraph::interval(l).unwrap();
        let vc = VertexConditions::robin(2, lam);
        for k in [c(0.4, 0.0), c(3.3, 0.1), c(0.2, 0.7)] {
            let r = (C64::new(lam, 0.0) - IMAG * k) / (C64::new(lam, 0.0) + IMAG * k);
            let expect = C64::new(1.0, 0.0) - r * r * (IMAG * k * (2.0 * l)).exp();
            assert!((secular(&g, &vc, k).unwrap() - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn star_secular_is_one() {
        let g = MetricGraph::star(3);
        let vc = VertexConditions::robin(3, 2.0);
        assert!((secular(&g, &vc, c(1.1, 0.3)).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn log_derivative_matches_difference_quotient() {
        let g = MetricGraph::interval(1.1).unwrap();
        let vc = VertexConditions::robin(2, 0.6);
        let k = c(0.05, 0.04);
        let h = 1e-6;
        let f = |z| secular(&g, &vc, z).unwrap();
        let fd = (f(k + h) - f(k - h)) / (2.0 * h) / f(k);
        assert!((fd - log_derivative(&g, &vc, k).unwrap()).norm() < 1e-6);
    }
}
