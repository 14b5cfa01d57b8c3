//! Boundary linear algebra behind the Dirac operator whose square is the
//! Laplacian: kernels of the momentum operators, the index, and the
//! subspaces on which the auxiliary boundary vector lives.

use serde::Serialize;

use crate::conditions::VertexConditions;
use crate::error::{Error, Result};
use crate::graph::{canonical_subspace, intersect_dim, BoundaryMatrices, MetricGraph, Subspace, SubspaceKind};
use crate::linalg::{hcat, identity, inverse, max_abs, select_columns, vstack, zeros, CMat, RankTol, IMAG};
use crate::spectral::tau_max;

#[derive(Debug, Clone)]
pub struct KreinDecomposition {
    pub m_l_plus: Subspace,
    pub m_l_minus: Subspace,
    pub e_plus: Subspace,
    pub e_minus: Subspace,
    /// `P_±⁻¹` as an `E × E` matrix: defined on `M_L`, zero on `M_L⊥`.
    pub p_pm_inverse: CMat,
}

impl KreinDecomposition {
    pub fn m_l(&self, tol: RankTol) -> Subspace {
        self.m_l_plus
            .sum(&self.m_l_minus, tol)
            .expect("same ambient")
    }

    pub fn e_k(&self, tol: RankTol) -> Subspace {
        self.e_plus.sum(&self.e_minus, tol).expect("same ambient")
    }

    /// `(‖(P₊ + P₋)P_±⁻¹ − 1‖ on M_L, ‖P_±⁻¹(P₊ + P₋) − 1‖ on E_𝔎)`.
    pub fn roundtrip_defects(&self, tol: RankTol) -> (f64, f64) {
        let m_l = self.m_l(tol);
        let e_k = self.e_k(tol);
        let p_l = m_l.projector();
        let a = &p_l * &self.p_pm_inverse * m_l.basis() - m_l.basis();
        let b = &self.p_pm_inverse * &p_l * e_k.basis() - e_k.basis();
        (max_abs(&a), max_abs(&b))
    }
}

fn eigenspaces(vc: &VertexConditions) -> (CMat, CMat) {
    let vals = vc.l_eigenvalues();
    let vecs = vc.l_eigenvectors();
    let plus: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.0).collect();
    let minus: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] < 0.0).collect();
    (select_columns(vecs, &plus), select_columns(vecs, &minus))
}

/// Canonical choice `E_± = M_{L,±}`, for which `P_±⁻¹` is the identity on `M_L`.
pub fn krein_subspaces(vc: &VertexConditions) -> KreinDecomposition {
    let (plus, minus) = eigenspaces(vc);
    let m_plus = Subspace::from_orthonormal(plus);
    let m_minus = Subspace::from_orthonormal(minus);
    KreinDecomposition {
        e_plus: m_plus.clone(),
        e_minus: m_minus.clone(),
        p_pm_inverse: vc.p_ran_l().clone(),
        m_l_plus: m_plus,
        m_l_minus: m_minus,
    }
}

/// `E_± = {x + P_{ker L}·T_± x : x ∈ M_{L,±}}` for arbitrary `T_±`.
///
/// Shifting by vectors of `ker L` leaves the form `⟨x, Lx⟩` unchanged, so
/// these are admissible alternatives to the canonical choice.
pub fn krein_subspaces_tilted(
    vc: &VertexConditions,
    tilt_plus: &CMat,
    tilt_minus: &CMat,
) -> Result<KreinDecomposition> {
    let e = vc.dim();
    for t in [tilt_plus, tilt_minus] {
        if t.nrows() != e || t.ncols() != e {
            return Err(Error::DimensionMismatch {
                expected: e,
                got: t.nrows(),
            });
        }
    }
    let tol = vc.tol();
    let (plus, minus) = eigenspaces(vc);
    let p_ker = identity(e) - vc.p_ran_l();
    let ep = &plus + &p_ker * tilt_plus * &plus;
    let em = &minus + &p_ker * tilt_minus * &minus;
    let w = hcat(&plus, &minus);
    let b = hcat(&ep, &em);
    // P_±⁻¹ = B (W* B)⁻¹ W*; W*B is the identity up to the tilt, which
    // W* annihilates.
    let wb = w.adjoint() * &b;
    let p_pm_inverse = &b * inverse(&wb).ok_or(Error::Singular)? * w.adjoint();
    Ok(KreinDecomposition {
        m_l_plus: Subspace::from_orthonormal(plus),
        m_l_minus: Subspace::from_orthonormal(minus),
        e_plus: Subspace::span(&ep, tol),
        e_minus: Subspace::span(&em, tol),
        p_pm_inverse,
    })
}

#[derive(Debug, Clone)]
pub struct KernelBases {
    /// `n × d*` edgewise constants of `ker p*`.
    pub ker_p_star_constants: CMat,
    /// `E × d*` boundary values `φ̲ ∈ ker Q ∩ M_sy`.
    pub ker_p_star_boundary: CMat,
    /// `n × d` edgewise constants of the `ψ` component of `ker p`.
    pub ker_p_constants: CMat,
    /// `E × d` boundary values `ψ̲` with `Iψ̲ ∈ (ker Q)⊥ ∩ M_asy`.
    pub ker_p_boundary: CMat,
    /// `E × d` boundary vectors `a ∈ E_𝔎`.
    pub ker_p_a: CMat,
}

impl KernelBases {
    pub fn dim_ker_p(&self) -> usize {
        self.ker_p_boundary.ncols()
    }

    pub fn dim_ker_p_star(&self) -> usize {
        self.ker_p_star_boundary.ncols()
    }

    /// `max |P⊥Iψ̲ − iP_{ran L}a|` over the `ker p` basis.
    pub fn a_residual(&self, graph: &MetricGraph, vc: &VertexConditions) -> f64 {
        let i = BoundaryMatrices::new(graph).i_signs;
        let r = vc.p_perp() * i * &self.ker_p_boundary - vc.p_ran_l() * &self.ker_p_a * IMAG;
        max_abs(&r)
    }
}

/// Kernel bases, with `a` resolved through the canonical `P_±⁻¹`.
pub fn kernel_bases(graph: &MetricGraph, vc: &VertexConditions) -> Result<KernelBases> {
    kernel_bases_with(graph, vc, &krein_subspaces(vc))
}

pub fn kernel_bases_with(
    graph: &MetricGraph,
    vc: &VertexConditions,
    krein: &KreinDecomposition,
) -> Result<KernelBases> {
    if graph.dim() != vc.dim() {
        return Err(Error::DimensionMismatch {
            expected: graph.dim(),
            got: vc.dim(),
        });
    }
    let tol = vc.tol();
    let n = graph.n_internal();
    let ker_q = Subspace::kernel(vc.q(), tol);
    let ran_q = Subspace::span(vc.q(), tol);
    let sy = canonical_subspace(graph, SubspaceKind::Sy);
    let asy = canonical_subspace(graph, SubspaceKind::Asy);

    let star = ker_q.intersection(&sy, tol)?;
    let star_b = star.basis().clone();
    let star_c = star_b.rows(0, n).into_owned();

    let w = ran_q.intersection(&asy, tol)?;
    let i = BoundaryMatrices::new(graph).i_signs;
    let psi = &i * w.basis();
    let a = &krein.p_pm_inverse * (vc.p_perp() * w.basis()) * (-IMAG);
    Ok(KernelBases {
        ker_p_star_constants: star_c,
        ker_p_star_boundary: star_b,
        ker_p_constants: psi.rows(0, n).into_owned(),
        ker_p_boundary: psi,
        ker_p_a: a,
    })
}

/// `dim((ran Q)⊥ ∩ M_sy)`, built from the range of `Q` rather than its kernel.
pub fn dim_ker_p_star_via_range(graph: &MetricGraph, vc: &VertexConditions) -> Result<usize> {
    let tol = vc.tol();
    let perp = Subspace::span(vc.q(), tol).orthogonal_complement(tol);
    intersect_dim(&perp, &canonical_subspace(graph, SubspaceKind::Sy), tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    pub dim_ker_p: usize,
    pub dim_ker_p_star: usize,
    pub index: i64,
    pub trace_s0: i64,
    pub half_trace_s0: f64,
    pub compact: bool,
    /// `index = ½ tr 𝔖₀`; only asserted on compact graphs.
    pub index_theorem: Option<bool>,
}

pub fn dirac_index(graph: &MetricGraph, vc: &VertexConditions) -> Result<IndexReport> {
    let kb = kernel_bases(graph, vc)?;
    let index = kb.dim_ker_p_star() as i64 - kb.dim_ker_p() as i64;
    let trace_s0 = vc.trace_s0();
    let compact = graph.is_compact();
    Ok(IndexReport {
        dim_ker_p: kb.dim_ker_p(),
        dim_ker_p_star: kb.dim_ker_p_star(),
        index,
        trace_s0,
        half_trace_s0: trace_s0 as f64 / 2.0,
        compact,
        index_theorem: compact.then_some(2 * index == trace_s0),
    })
}

/// Closing relation on compact graphs with `τ_max < 1`:
/// `2(g₀ − N/2) = index`, returned as `(2g₀ − N, index)`.
pub fn gamma_index_pair(graph: &MetricGraph, vc: &VertexConditions) -> Result<Option<(i64, i64)>> {
    if !graph.is_compact() || tau_max(graph, vc)? >= 1.0 - crate::spectral::TAU_MARGIN {
        return Ok(None);
    }
    let r = crate::spectral::multiplicity_report(graph, vc)?;
    Ok(Some((r.gamma_twice, dirac_index(graph, vc)?.index)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiracSquareCheck {
    pub dim_square: usize,
    pub dim_laplacian: usize,
    pub dim_intersection: usize,
    pub holds: bool,
}

/// Compares the boundary conditions of `p p*` with those of the Laplacian.
///
/// The `p p*` side is assembled from its two ingredients, `Pφ̲ = 0` and
/// `Lφ̲ + P⊥Iφ̲′ = 0`; the Laplacian side is `ker [P + L | P⊥I]`. Both live
/// in `C^{2E}` as pairs `(φ̲, φ̲′)`.
pub fn dirac_square_conditions_check(graph: &MetricGraph, vc: &VertexConditions) -> Result<DiracSquareCheck> {
    if graph.dim() != vc.dim() {
        return Err(Error::DimensionMismatch {
            expected: graph.dim(),
            got: vc.dim(),
        });
    }
    let e = graph.dim();
    let tol = vc.tol();
    let i = BoundaryMatrices::new(graph).i_signs;
    let pperp_i = vc.p_perp() * i;
    let square = vstack(&[&hcat(vc.p(), &zeros(e, e)), &hcat(vc.l(), &pperp_i)]);
    let lap = hcat(&(vc.p() + vc.l()), &pperp_i);
    let a = Subspace::kernel(&square, tol);
    let b = Subspace::kernel(&lap, tol);
    let cap = intersect_dim(&a, &b, tol)?;
    Ok(DiracSquareCheck {
        dim_square: a.dim(),
        dim_laplacian: b.dim(),
        dim_intersection: cap,
        holds: a.dim() == b.dim() && cap == a.dim(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag_real};

    #[test]
    fn interval_kernels() {
        let g = MetricGraph::interval(1.0).unwrap();
        let n = dirac_index(&g, &VertexConditions::neumann(2)).unwrap();
        assert_eq!((n.dim_ker_p_star, n.dim_ker_p, n.index), (1, 0, 1));
        assert_eq!(n.index_theorem, Some(true));
        let d = dirac_index(&g, &VertexConditions::dirichlet(2)).unwrap();
        assert_eq!((d.dim_ker_p_star, d.dim_ker_p, d.index), (0, 1, -1));
        assert_eq!(d.half_trace_s0, -1.0);
        let r = dirac_index(&g, &VertexConditions::robin(2, 1.0)).unwrap();
        assert_eq!(r.index, -1);
        assert_eq!(r.trace_s0, -2);
    }

    #[test]
    fn star_kernels_vanish() {
        let g = MetricGraph::star(3);
        let r = dirac_index(&g, &VertexConditions::neumann(3)).unwrap();
        assert_eq!((r.dim_ker_p, r.dim_ker_p_star), (0, 0));
        assert_eq!(r.index_theorem, None);
    }

    #[test]
    fn krein_fixtures() {
        let k = krein_subspaces(&VertexConditions::neumann(3));
        assert_eq!((k.m_l_plus.dim(), k.m_l_minus.dim(), k.e_plus.dim(), k.e_minus.dim()), (0, 0, 0, 0));
        let vc = VertexConditions::validate(zeros(3, 3), diag_real(&[1.0, 1.0, -3.0])).unwrap();
        let k = krein_subspaces(&vc);
        assert_eq!((k.m_l_plus.dim(), k.e_plus.dim()), (2, 2));
        assert_eq!((k.m_l_minus.dim(), k.e_minus.dim()), (1, 1));
        let k = krein_subspaces(&VertexConditions::robin(2, 0.5));
        assert_eq!((k.e_plus.dim(), k.e_minus.dim()), (2, 0));
        let (a, b) = k.roundtrip_defects(RankTol::default());
        assert!(a < 1e-12 && b < 1e-12);
    }

    #[test]
    fn tilted_krein_roundtrip() {
        let vc = VertexConditions::validate(zeros(3, 3), diag_real(&[2.0, 0.0, -1.0])).unwrap();
        let mut t = zeros(3, 3);
        t[(1, 0)] = c(0.3, -0.2);
        t[(1, 2)] = c(1.5, 0.0);
        let k = krein_subspaces_tilted(&vc, &t, &t).unwrap();
        assert!(k.e_plus.containment_defect(&k.m_l_plus) > 0.1);
        let (a, b) = k.roundtrip_defects(RankTol::default());
        assert!(a < 1e-12 && b < 1e-12, "{a} {b}");
        let g = MetricGraph::star(3);
        let kb = kernel_bases_with(&g, &vc, &k).unwrap();
        assert_eq!(kb.dim_ker_p(), 0);
    }

    #[test]
    fn dirichlet_ker_p_a_component() {
        let g = MetricGraph::interval(2.0).unwrap();
        let vc = VertexConditions::validate(diag_real(&[1.0, 0.0]), diag_real(&[0.0, 1.5])).unwrap();
        let kb = kernel_bases(&g, &vc).unwrap();
        assert_eq!(kb.dim_ker_p(), 1);
        assert!(kb.a_residual(&g, &vc) < 1e-12);
    }

    #[test]
    fn dirac_square_fixtures() {
        let g = MetricGraph::interval(1.0).unwrap();
        for vc in [VertexConditions::dirichlet(2), VertexConditions::robin(2, 1.0)] {
            assert!(dirac_square_conditions_check(&g, &vc).unwrap().holds);
        }
    }
}
