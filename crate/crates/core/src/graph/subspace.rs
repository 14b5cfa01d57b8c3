use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    column_space, hcat, identity, max_abs, null_space, rank, zeros, CMat, RankTol, C64,
};

use super::MetricGraph;

/// A subspace of `C^n` stored as an orthonormal basis (possibly empty).
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: CMat,
}

impl Subspace {
    /// Span of the columns of `m`.
    pub fn span(m: &CMat, tol: RankTol) -> Self {
        Self {
            ambient_dim: m.nrows(),
            basis: column_space(m, tol),
        }
    }

    /// Trusts that `basis` already has orthonormal columns.
    pub fn from_orthonormal(basis: CMat) -> Self {
        debug_assert!(
            max_abs(&(basis.adjoint() * &basis - identity(basis.ncols()))) < 1e-10,
            "basis not orthonormal"
        );
        Self {
            ambient_dim: basis.nrows(),
            basis,
        }
    }

    pub fn kernel(m: &CMat, tol: RankTol) -> Self {
        Self {
            ambient_dim: m.ncols(),
            basis: null_space(m, tol),
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: identity(ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn projector(&self) -> CMat {
        &self.basis * self.basis.adjoint()
    }

    pub fn orthogonal_complement(&self, tol: RankTol) -> Self {
        let p = identity(self.ambient_dim) - self.projector();
        Self::span(&p, tol)
    }

    pub fn sum(&self, other: &Subspace, tol: RankTol) -> Result<Self> {
        self.check_ambient(other)?;
        Ok(Self::span(&hcat(&self.basis, &other.basis), tol))
    }

    /// Basis of `self ∩ other` from the kernel of `[A | −B]`.
    pub fn intersection(&self, other: &Subspace, tol: RankTol) -> Result<Self> {
        self.check_ambient(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Self::zero(self.ambient_dim));
        }
        let stacked = hcat(&self.basis, &(-other.basis.clone()));
        let ker = null_space(&stacked, tol);
        let coeffs = ker.rows(0, self.dim()).into_owned();
        Ok(Self::span(&(&self.basis * coeffs), tol))
    }

    /// Largest distance of a basis vector of `other` from `self`.
    pub fn containment_defect(&self, other: &Subspace) -> f64 {
        let p = self.projector();
        max_abs(&(other.basis() - &p * other.basis()))
    }

    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        self.ambient_dim == other.ambient_dim && self.containment_defect(other) < tol
    }

    /// Same-span test via the intersection dimension.
    pub fn same_span(&self, other: &Subspace, tol: RankTol) -> Result<bool> {
        Ok(self.dim() == other.dim() && intersect_dim(self, other, tol)? == self.dim())
    }

    pub fn map(&self, m: &CMat, tol: RankTol) -> Self {
        Self::span(&(m * &self.basis), tol)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: other.ambient_dim,
            });
        }
        Ok(())
    }
}

/// `dim A + dim B − rank [A | B]`.
pub fn intersect_dim(a: &Subspace, b: &Subspace, tol: RankTol) -> Result<usize> {
    a.check_ambient(b)?;
    let r = rank(&hcat(a.basis(), b.basis()), tol);
    Ok(a.dim() + b.dim() - r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceKind {
    /// `(c, c, 0)`
    Sy,
    /// `(c, −c, 0)`
    Asy,
    /// `(0, 0, c)`
    Zero,
    /// `M_sy ⊕ M_asy`
    M,
}

pub fn canonical_subspace(graph: &MetricGraph, kind: SubspaceKind) -> Subspace {
    let n = graph.n_internal();
    let m = graph.n_external();
    let e = graph.dim();
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let basis = match kind {
        SubspaceKind::Sy | SubspaceKind::Asy => {
            let sign = if kind == SubspaceKind::Sy { h } else { -h };
            let mut b = zeros(e, n);
            for i in 0..n {
                b[(i, i)] = h;
                b[(n + i, i)] = sign;
            }
            b
        }
        SubspaceKind::Zero => {
            let mut b = zeros(e, m);
            for j in 0..m {
                b[(2 * n + j, j)] = C64::new(1.0, 0.0);
            }
            b
        }
        SubspaceKind::M => {
            let mut b = zeros(e, 2 * n);
            for i in 0..2 * n {
                b[(i, i)] = C64::new(1.0, 0.0);
            }
            b
        }
    };
    Subspace::from_orthonormal(basis)
}
