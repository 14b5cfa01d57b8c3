use serde::Serialize;

use crate::conditions::VertexConditions;
use crate::error::{Error, Result};
use crate::graph::{canonical_subspace, intersect_dim, BoundaryMatrices, MetricGraph, Subspace, SubspaceKind};
use crate::linalg::{eigenvalues, hermitian_eigen, hermitian_fn, identity, null_space, CMat, C64};

use super::secular::{check_dims, log_derivative, u_matrix};

/// `dim ker(1 − U(k))`.
pub fn multiplicity_at(graph: &MetricGraph, vc: &VertexConditions, k: C64) -> Result<usize> {
    let u = u_matrix(graph, vc, k)?;
    Ok(null_space(&(identity(u.nrows()) - u), vc.tol()).ncols())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Winding {
    pub n: usize,
    /// Quadrature value before rounding.
    pub raw_re: f64,
    pub raw_im: f64,
    pub radius: f64,
    pub nodes: usize,
}

const START_NODES: usize = 256;
const MAX_NODES: usize = 1 << 16;
const DEPTH: usize = 10;
const INTEGER_TOL: f64 = 1e-6;
const CLEAN_TOL: f64 = 1e-9;

/// Trapezoidal rule for `(1/2πi)∮ F′/F dk` on `|k| = r`, doubling the node
/// count until the value is within `tol` of an integer. Gives up early when
/// a doubling no longer shrinks the change by a factor of 10, since the
/// error is then roundoff rather than quadrature.
fn winding_at(graph: &MetricGraph, vc: &VertexConditions, r: f64, tol: f64) -> Option<(C64, usize)> {
    let mut m = START_NODES;
    let mut prev: Option<C64> = None;
    let mut prev_step = f64::INFINITY;
    while m <= MAX_NODES {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..m {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
            let k = C64::from_polar(r, theta);
            acc += log_derivative(graph, vc, k).ok()? * k;
        }
        let val = acc / m as f64;
        if (val.re - val.re.round()).abs() < tol && val.im.abs() < tol {
            return Some((val, m));
        }
        if let Some(p) = prev {
            let step = (val - p).norm();
            if step > 0.1 * prev_step {
                return None;
            }
            prev_step = step;
        }
        prev = Some(val);
        m *= 2;
    }
    None
}

/// Default contour radius: half the smallest nonzero `|μ|`, capped at `0.1`.
pub fn default_radius(vc: &VertexConditions) -> f64 {
    let mu_min = vc
        .nonzero_l_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |a, m| a.min(m.abs()));
    (0.5 * mu_min).min(0.1)
}

/// Order of the zero of `F` at `k = 0` as a winding number.
///
/// Nonzero roots and resonances can sit well inside the default radius `r₀`,
/// and the count on a circle only grows with its radius. The radii
/// `r₀/2^j` are therefore tried from `j = DEPTH` upwards: the result is the
/// count on the smallest circle whose quadrature is within `CLEAN_TOL` of an
/// integer, provided the circle of twice the radius gives at least as many
/// zeros (to `INTEGER_TOL`). Small circles fail the integer test rather than
/// round wrongly when `1 − U` is too ill-conditioned there.
pub fn algebraic_n_detailed(graph: &MetricGraph, vc: &VertexConditions) -> Result<Winding> {
    check_dims(graph, vc)?;
    let r0 = default_radius(vc);
    if graph.n_internal() == 0 {
        return Ok(Winding {
            n: 0,
            raw_re: 0.0,
            raw_im: 0.0,
            radius: r0,
            nodes: 0,
        });
    }
    let radius = |j: usize| r0 / f64::powi(2.0, j as i32);
    let mut last = f64::NAN;
    // Smallest circle so far with an integer count: (value, nodes, radius).
    let mut inner: Option<(C64, usize, f64)> = None;
    for j in (0..=DEPTH).rev() {
        let tol = if inner.is_none() { CLEAN_TOL } else { INTEGER_TOL };
        let Some((v, m)) = winding_at(graph, vc, radius(j), tol) else {
            continue;
        };
        last = v.re;
        match inner {
            None if v.re.round() >= 0.0 => inner = Some((v, m, radius(j))),
            None => {}
            Some((b, nodes, r)) => {
                if v.re.round() < b.re.round() {
                    break;
                }
                return Ok(Winding {
                    n: b.re.round() as usize,
                    raw_re: b.re,
                    raw_im: b.im,
                    radius: r,
                    nodes,
                });
            }
        }
    }
    Err(Error::WindingUnstable {
        halvings: DEPTH,
        last,
    })
}

pub fn algebraic_n(graph: &MetricGraph, vc: &VertexConditions) -> Result<usize> {
    algebraic_n_detailed(graph, vc).map(|w| w.n)
}

/// `Ñ = dim ker(1 − 𝔖₀𝔍)`.
pub fn algebraic_ntilde(graph: &MetricGraph, vc: &VertexConditions) -> Result<usize> {
    check_dims(graph, vc)?;
    let (_, s0) = vc.s_limits();
    let j = BoundaryMatrices::new(graph).j;
    let a = identity(graph.dim()) - s0 * j;
    Ok(null_space(&a, vc.tol()).ncols())
}

/// `dim((ker Q)⊥ ∩ M_asy) + dim(ker Q ∩ M_sy)`.
pub fn ntilde_from_subspaces(graph: &MetricGraph, vc: &VertexConditions) -> Result<usize> {
    check_dims(graph, vc)?;
    let tol = vc.tol();
    let ker_q = Subspace::kernel(vc.q(), tol);
    let ran_q = Subspace::span(vc.q(), tol);
    let sy = canonical_subspace(graph, SubspaceKind::Sy);
    let asy = canonical_subspace(graph, SubspaceKind::Asy);
    Ok(intersect_dim(&ran_q, &asy, tol)? + intersect_dim(&ker_q, &sy, tol)?)
}

/// `L⁻¹_MBP · G(l)`.
pub fn tau_matrix(graph: &MetricGraph, vc: &VertexConditions) -> CMat {
    vc.l_pinv() * BoundaryMatrices::new(graph).g
}

/// Eigenvalues of `L⁻¹_MBP G(l)` from a general (non-hermitian) Schur form.
pub fn tau_eigenvalues(graph: &MetricGraph, vc: &VertexConditions) -> Result<Vec<C64>> {
    check_dims(graph, vc)?;
    eigenvalues(&tau_matrix(graph, vc)).ok_or(Error::SchurFailed)
}

/// Largest eigenvalue of `L⁻¹_MBP G(l)`, at least 0.
///
/// Computed from the hermitian matrix `G^{1/2} L⁻¹ G^{1/2}`, which has the
/// same nonzero spectrum.
pub fn tau_max(graph: &MetricGraph, vc: &VertexConditions) -> Result<f64> {
    check_dims(graph, vc)?;
    if graph.dim() == 0 {
        return Ok(0.0);
    }
    let g = BoundaryMatrices::new(graph).g;
    let gh = hermitian_fn(&g, |x| x.max(0.0).sqrt());
    let m = &gh * vc.l_pinv() * &gh;
    let (vals, _) = hermitian_eigen(&m);
    Ok(vals.last().copied().unwrap_or(0.0).max(0.0))
}

/// Smallest positive eigenvalue of `L`, if any.
pub fn lambda_plus_min(vc: &VertexConditions) -> Option<f64> {
    vc.l_eigenvalues().iter().copied().filter(|&m| m > 0.0).reduce(f64::min)
}
