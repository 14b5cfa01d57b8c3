//! Self-adjoint vertex conditions `(P, L)` and the vertex scattering matrix.
//!
//! A Laplacian domain is given by boundary data with
//! `(P + L)ψ̲ + P⊥Iψ̲′ = 0`, where `P` is an orthogonal projector and `L` is
//! hermitian with `P⊥LP⊥ = L`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::linalg::{
    diag_real, projector_from_basis, projector_range, hermitian_eigen, identity, is_normal, max_abs, pinv, zeros, CMat,
    RankTol, C64, IMAG,
};

/// Absolute tolerance (relative to `max(1, ‖·‖)`) for the structural checks.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Conditions at a single vertex, in the order of its boundary coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexBlock {
    pub vertex: String,
    pub p: CMat,
    pub l: CMat,
}

#[derive(Debug, Clone)]
pub struct VertexConditions {
    p: CMat,
    l: CMat,
    q: CMat,
    p_ran_l: CMat,
    /// Eigenvalues `μ` of `L` compressed to `ran P⊥`.
    lr_vals: Vec<f64>,
    /// Matching eigenvectors embedded in `C^E` (columns of `B·W`).
    lr_vecs: CMat,
    rank_l: usize,
    tol: RankTol,
    blocks: Option<Vec<VertexBlock>>,
}

fn scale(m: &CMat) -> f64 {
    max_abs(m).max(1.0)
}

impl VertexConditions {
    pub fn validate(p: CMat, l: CMat) -> Result<Self> {
        Self::validate_with(p, l, RankTol::default())
    }

    pub fn validate_with(p: CMat, l: CMat, tol: RankTol) -> Result<Self> {
        let e = p.nrows();
        for m in [&p, &l] {
            if !m.is_square() || m.nrows() != e {
                return Err(Error::DimensionMismatch {
                    expected: e,
                    got: m.nrows().max(m.ncols()),
                });
            }
        }
        let proj_defect = max_abs(&(&p - p.adjoint())).max(max_abs(&(&p * &p - &p)));
        if proj_defect > VALIDATION_TOL {
            return Err(Error::NotProjector {
                defect: proj_defect,
            });
        }
        let herm_defect = max_abs(&(&l - l.adjoint()));
        if herm_defect > VALIDATION_TOL * scale(&l) {
            return Err(Error::NotHermitian {
                defect: herm_defect,
            });
        }
        let pperp = identity(e) - &p;
        let supp_defect = max_abs(&(&pperp * &l * &pperp - &l));
        if supp_defect > VALIDATION_TOL * scale(&l) {
            return Err(Error::NotSupportedOnPPerp {
                defect: supp_defect,
            });
        }

        let (vals, vecs) = hermitian_eigen(&l);
        let lmax = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let thr = tol.threshold(lmax, e, e);
        let mut p_ran_l = zeros(e, e);
        let mut rank_l = 0;
        for (i, &mu) in vals.iter().enumerate() {
            if mu.abs() > thr {
                let v = vecs.column(i);
                p_ran_l += v * v.adjoint();
                rank_l += 1;
            }
        }
        // P and Q are rebuilt from their eigenvectors so that later rank
        // decisions see exact 0/1 spectra.
        let q = projector_from_basis(&projector_range(&(&p + &p_ran_l)));

        let b = projector_range(&pperp);
        let lr = b.adjoint() * &l * &b;
        let (lr_vals, w) = hermitian_eigen(&lr);
        // Treat numerically vanishing eigenvalues as exact zeros.
        let lr_vals = lr_vals
            .into_iter()
            .map(|mu| if mu.abs() > thr { mu } else { 0.0 })
            .collect();
        let lr_vecs = &b * w;

        Ok(Self {
            p,
            l,
            q,
            p_ran_l,
            lr_vals,
            lr_vecs,
            rank_l,
            tol,
            blocks: None,
        })
    }

    /// `P = 1`, `L = 0`.
    pub fn dirichlet(e: usize) -> Self {
        Self::validate(identity(e), zeros(e, e)).expect("dirichlet is valid")
    }

    /// `P = 0`, `L = 0`.
    pub fn neumann(e: usize) -> Self {
        Self::validate(zeros(e, e), zeros(e, e)).expect("neumann is valid")
    }

    /// `P = 0`, `L = λ·1`; `λ > 0` is attractive with `ψ′ = −λψ` at a start.
    pub fn robin(e: usize, lambda: f64) -> Self {
        Self::validate(zeros(e, e), identity(e) * C64::new(lambda, 0.0)).expect("robin is valid")
    }

    /// Assembles per-vertex blocks into block-diagonal global `(P, L)`.
    /// Vertices of degree zero may be omitted.
    pub fn from_vertex_blocks(graph: &MetricGraph, blocks: &[VertexBlock]) -> Result<Self> {
        Self::from_vertex_blocks_with(graph, blocks, RankTol::default())
    }

    pub fn from_vertex_blocks_with(graph: &MetricGraph, blocks: &[VertexBlock], tol: RankTol) -> Result<Self> {
        let e = graph.dim();
        let mut p = zeros(e, e);
        let mut l = zeros(e, e);
        let mut seen = vec![false; graph.vertices().len()];
        for b in blocks {
            let v = graph
                .vertex_index(&b.vertex)
                .ok_or_else(|| Error::UnknownVertex(b.vertex.clone()))?;
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::DuplicateBlock(b.vertex.clone()));
            }
            let idx = graph.vertex_boundary_indices(v);
            for m in [&b.p, &b.l] {
                if m.nrows() != idx.len() || m.ncols() != idx.len() {
                    return Err(Error::BlockSize {
                        vertex: b.vertex.clone(),
                        degree: idx.len(),
                        size: m.nrows().max(m.ncols()),
                    });
                }
            }
            for (a, &i) in idx.iter().enumerate() {
                for (c, &j) in idx.iter().enumerate() {
                    p[(i, j)] = b.p[(a, c)];
                    l[(i, j)] = b.l[(a, c)];
                }
            }
        }
        for (v, name) in graph.vertices().iter().enumerate() {
            if !seen[v] && graph.degree(v) > 0 {
                return Err(Error::MissingBlock(name.clone()));
            }
        }
        let mut vc = Self::validate_with(p, l, tol)?;
        let mut ordered: Vec<VertexBlock> = Vec::new();
        for name in graph.vertices() {
            if let Some(b) = blocks.iter().find(|b| &b.vertex == name) {
                ordered.push(b.clone());
            }
        }
        vc.blocks = Some(ordered);
        Ok(vc)
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn p(&self) -> &CMat {
        &self.p
    }

    pub fn l(&self) -> &CMat {
        &self.l
    }

    pub fn q(&self) -> &CMat {
        &self.q
    }

    pub fn p_perp(&self) -> CMat {
        identity(self.dim()) - &self.p
    }

    pub fn p_ran_l(&self) -> &CMat {
        &self.p_ran_l
    }

    pub fn tol(&self) -> RankTol {
        self.tol
    }

    pub fn blocks(&self) -> Option<&[VertexBlock]> {
        self.blocks.as_deref()
    }

    pub fn rank_p(&self) -> usize {
        self.dim() - self.lr_vals.len()
    }

    pub fn rank_l(&self) -> usize {
        self.rank_l
    }

    pub fn rank_q(&self) -> usize {
        self.rank_p() + self.rank_l
    }

    /// Eigenvalues of `L` on `ran P⊥` (zeros included), ascending.
    pub fn l_eigenvalues(&self) -> &[f64] {
        &self.lr_vals
    }

    /// Eigenvectors matching [`Self::l_eigenvalues`], as columns in `C^E`.
    pub fn l_eigenvectors(&self) -> &CMat {
        &self.lr_vecs
    }

    pub fn nonzero_l_eigenvalues(&self) -> Vec<f64> {
        self.lr_vals.iter().copied().filter(|&m| m != 0.0).collect()
    }

    /// `L⁻¹_MBP`, computed from the spectral decomposition of `L`.
    pub fn l_pinv(&self) -> CMat {
        let inv: Vec<f64> = self
            .lr_vals
            .iter()
            .map(|&m| if m != 0.0 { 1.0 / m } else { 0.0 })
            .collect();
        &self.lr_vecs * diag_real(&inv) * self.lr_vecs.adjoint()
    }

    /// `f(L)` for a function with `f(0) = 0`, applied on `ran P⊥`.
    pub fn l_function(&self, f: impl Fn(f64) -> C64) -> CMat {
        let mut d = zeros(self.lr_vals.len(), self.lr_vals.len());
        for (i, &m) in self.lr_vals.iter().enumerate() {
            d[(i, i)] = f(m);
        }
        &self.lr_vecs * d * self.lr_vecs.adjoint()
    }

    /// `tr 𝔖₀ = E − 2·rank Q`.
    pub fn trace_s0(&self) -> i64 {
        self.dim() as i64 - 2 * self.rank_q() as i64
    }

    /// `(𝔖_∞, 𝔖₀) = (P⊥ − P, Q⊥ − Q)`.
    pub fn s_limits(&self) -> (CMat, CMat) {
        let e = self.dim();
        let s_inf = identity(e) - &self.p * C64::new(2.0, 0.0);
        let s0 = identity(e) - &self.q * C64::new(2.0, 0.0);
        (s_inf, s0)
    }

    /// Denominators `μ + ik`. The kernel of `L` (stored as `μ = 0`) never
    /// produces a pole at `k ≠ 0`, so it is exempt from the check.
    fn check_pole(&self, k: C64) -> Result<Vec<C64>> {
        let den: Vec<C64> = self.lr_vals.iter().map(|&m| C64::new(m, 0.0) + IMAG * k).collect();
        let dmax = den.iter().fold(0.0f64, |a, d| a.max(d.norm()));
        for (d, &m) in den.iter().zip(&self.lr_vals) {
            if m != 0.0 && (d.norm() < 1e-10 * dmax || d.norm() == 0.0) {
                return Err(Error::Pole {
                    k: format!("{}{:+}i", k.re, k.im),
                    mu: m,
                });
            }
        }
        Ok(den)
    }

    /// `𝔖(k) = −P − (L + ikP⊥)⁻¹(L − ikP⊥)` with the inverse taken on
    /// `ran P⊥`. At `k = 0` the continuous extension `𝔖₀` is returned.
    pub fn s_matrix(&self, k: C64) -> Result<CMat> {
        if k == C64::new(0.0, 0.0) {
            return Ok(self.s_limits().1);
        }
        let den = self.check_pole(k)?;
        let ratios: Vec<C64> = den
            .iter()
            .zip(&self.lr_vals)
            .map(|(d, &m)| if m == 0.0 { C64::new(1.0, 0.0) } else { -(C64::new(m, 0.0) - IMAG * k) / d })
            .collect();
        Ok(-&self.p + self.diag_on_ranperp(&ratios))
    }

    /// `d𝔖/dk`.
    pub fn s_derivative(&self, k: C64) -> Result<CMat> {
        let den = self.check_pole(k)?;
        let entries: Vec<C64> = den
            .iter()
            .zip(&self.lr_vals)
            .map(|(d, &m)| if m == 0.0 { C64::new(0.0, 0.0) } else { IMAG * (2.0 * m) / (d * d) })
            .collect();
        Ok(self.diag_on_ranperp(&entries))
    }

    fn diag_on_ranperp(&self, d: &[C64]) -> CMat {
        let r = d.len();
        let mut dm = zeros(r, r);
        for (i, &x) in d.iter().enumerate() {
            dm[(i, i)] = x;
        }
        &self.lr_vecs * dm * self.lr_vecs.adjoint()
    }

    /// Conditions conjugated by a permutation: entry `(i, j)` moves to
    /// `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let e = self.dim();
        let mut p = zeros(e, e);
        let mut l = zeros(e, e);
        for i in 0..e {
            for j in 0..e {
                p[(perm[i], perm[j])] = self.p[(i, j)];
                l[(perm[i], perm[j])] = self.l[(i, j)];
            }
        }
        Self::validate_with(p, l, self.tol)
    }

    /// Block-diagonal direct sum `self ⊕ other` (coordinates of `self` first).
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let (a, b) = (self.dim(), other.dim());
        let mut p = zeros(a + b, a + b);
        let mut l = zeros(a + b, a + b);
        p.view_mut((0, 0), (a, a)).copy_from(&self.p);
        p.view_mut((a, a), (b, b)).copy_from(&other.p);
        l.view_mut((0, 0), (a, a)).copy_from(&self.l);
        l.view_mut((a, a), (b, b)).copy_from(&other.l);
        Self::validate_with(p, l, self.tol)
    }
}

/// Moore–Penrose inverse of a normal matrix: inverse on the complement of the
/// zero eigenspace, zero on it.
pub fn mbp_inverse(a: &CMat, tol: RankTol) -> Result<CMat> {
    let defect = max_abs(&(a * a.adjoint() - a.adjoint() * a));
    if !is_normal(a, VALIDATION_TOL * scale(a) * scale(a)) {
        return Err(Error::NotNormal { defect });
    }
    Ok(pinv(a, tol))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum Locality {
    Local {
        #[serde(skip)]
        blocks: Vec<VertexBlock>,
        vertices: Vec<String>,
    },
    NonLocal {
        matrix: &'static str,
        row: usize,
        col: usize,
        magnitude: f64,
    },
}

/// Splits `(P, L)` into per-vertex blocks when no entry couples boundary
/// coordinates of different vertices.
pub fn locality_decompose(graph: &MetricGraph, vc: &VertexConditions) -> Result<Locality> {
    let e = graph.dim();
    if vc.dim() != e {
        return Err(Error::DimensionMismatch {
            expected: e,
            got: vc.dim(),
        });
    }
    let owner: Vec<usize> = (0..e).map(|i| graph.boundary_vertex(i)).collect();
    for (name, m) in [("P", vc.p()), ("L", vc.l())] {
        let tol = VALIDATION_TOL * scale(m);
        for i in 0..e {
            for j in 0..e {
                if owner[i] != owner[j] && m[(i, j)].norm() > tol {
                    return Ok(Locality::NonLocal {
                        matrix: name,
                        row: i,
                        col: j,
                        magnitude: m[(i, j)].norm(),
                    });
                }
            }
        }
    }
    let mut blocks = Vec::new();
    for (v, name) in graph.vertices().iter().enumerate() {
        let idx = graph.vertex_boundary_indices(v);
        let d = idx.len();
        let mut p = zeros(d, d);
        let mut l = zeros(d, d);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                p[(a, b)] = vc.p()[(i, j)];
                l[(a, b)] = vc.l()[(i, j)];
            }
        }
        blocks.push(VertexBlock {
            vertex: name.clone(),
            p,
            l,
        });
    }
    let vertices = blocks.iter().map(|b| b.vertex.clone()).collect();
    Ok(Locality::Local { blocks, vertices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn r(x: f64) -> C64 {
        c(x, 0.0)
    }

    #[test]
    fn standard_conditions() {
        let d = VertexConditions::dirichlet(2);
        assert!(max_abs(&(d.q() - identity(2))) < 1e-15);
        let rb = VertexConditions::robin(2, 1.0);
        assert!(max_abs(&(rb.q() - identity(2))) < 1e-15);
        let n = VertexConditions::neumann(2);
        assert_eq!(n.rank_q(), 0);
    }

    #[test]
    fn invalid_inputs_have_distinct_errors() {
        let mut nh = zeros(2, 2);
        nh[(0, 1)] = r(1.0);
        assert!(matches!(
            VertexConditions::validate(zeros(2, 2), nh),
            Err(Error::NotHermitian { .. })
        ));
        let half = identity(2) * r(0.5);
        assert!(matches!(
            VertexConditions::validate(half, zeros(2, 2)),
            Err(Error::NotProjector { .. })
        ));
        // L leaking into ran P
        let p = diag_real(&[1.0, 0.0]);
        let l = diag_real(&[1.0, 0.0]);
        assert!(matches!(
            VertexConditions::validate(p, l),
            Err(Error::NotSupportedOnPPerp { .. })
        ));
        assert!(matches!(
            VertexConditions::validate(zeros(2, 2), zeros(3, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn s_matrix_fixtures() {
        let k = r(1.7);
        let s = VertexConditions::dirichlet(2).s_matrix(k).unwrap();
        assert!(max_abs(&(s + identity(2))) < 1e-14);
        let s = VertexConditions::neumann(2).s_matrix(k).unwrap();
        assert!(max_abs(&(s - identity(2))) < 1e-14);
        let lam = 1.3;
        let s = VertexConditions::robin(2, lam).s_matrix(k).unwrap();
        let expect = -(r(lam) - IMAG * k) / (r(lam) + IMAG * k);
        assert!(max_abs(&(s - identity(2) * expect)) < 1e-14);
    }

    #[test]
    fn robin_pole_on_imaginary_axis() {
        let vc = VertexConditions::robin(2, 2.0);
        match vc.s_matrix(c(0.0, 2.0)) {
            Err(Error::Pole { mu, .. }) => assert_eq!(mu, 2.0),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn limits() {
        let (sinf, s0) = VertexConditions::robin(2, 1.0).s_limits();
        assert!(max_abs(&(s0 + identity(2))) < 1e-15);
        assert!(max_abs(&(sinf - identity(2))) < 1e-15);
        let vc = VertexConditions::validate(zeros(2, 2), diag_real(&[3.0, 0.0])).unwrap();
        let (sinf, s0) = vc.s_limits();
        assert!(max_abs(&(s0 - diag_real(&[-1.0, 1.0]))) < 1e-15);
        assert!(max_abs(&(sinf - identity(2))) < 1e-15);
        assert_eq!(vc.trace_s0(), 0);
    }

    #[test]
    fn mbp_inverse_fixtures() {
        let tol = RankTol::default();
        assert_eq!(mbp_inverse(&zeros(2, 2), tol).unwrap(), zeros(2, 2));
        let a = mbp_inverse(&diag_real(&[2.0, 0.0]), tol).unwrap();
        assert!(max_abs(&(a - diag_real(&[0.5, 0.0]))) < 1e-15);
        let lam = identity(2) * r(4.0);
        let inv = mbp_inverse(&lam, tol).unwrap();
        assert!(max_abs(&(&inv * &lam - identity(2))) < 1e-14);
        let mut nn = zeros(2, 2);
        nn[(0, 1)] = r(1.0);
        assert!(matches!(mbp_inverse(&nn, tol), Err(Error::NotNormal { .. })));
    }

    #[test]
    fn locality_of_blocks_and_coupling() {
        let g = MetricGraph::interval(1.0).unwrap();
        let blocks = vec![
            VertexBlock {
                vertex: "a".into(),
                p: zeros(1, 1),
                l: diag_real(&[1.0]),
            },
            VertexBlock {
                vertex: "b".into(),
                p: zeros(1, 1),
                l: diag_real(&[1.0]),
            },
        ];
        let vc = VertexConditions::from_vertex_blocks(&g, &blocks).unwrap();
        match locality_decompose(&g, &vc).unwrap() {
            Locality::Local { blocks: got, .. } => assert_eq!(got, blocks),
            other => panic!("{other:?}"),
        }
        // projector onto (1, 1)/√2 couples the two ends
        let p = CMat::from_element(2, 2, r(0.5));
        let vc = VertexConditions::validate(p, zeros(2, 2)).unwrap();
        assert!(matches!(
            locality_decompose(&g, &vc).unwrap(),
            Locality::NonLocal { matrix: "P", .. }
        ));
    }

    #[test]
    fn missing_and_oversized_blocks() {
        let g = MetricGraph::interval(1.0).unwrap();
        let one = VertexBlock {
            vertex: "a".into(),
            p: zeros(1, 1),
            l: zeros(1, 1),
        };
        assert_eq!(
            VertexConditions::from_vertex_blocks(&g, std::slice::from_ref(&one)).err(),
            Some(Error::MissingBlock("b".into()))
        );
        let big = VertexBlock {
            vertex: "b".into(),
            p: zeros(2, 2),
            l: zeros(2, 2),
        };
        assert!(matches!(
            VertexConditions::from_vertex_blocks(&g, &[one, big]),
            Err(Error::BlockSize { .. })
        ));
    }
}
