//! Dense complex linear algebra helpers on top of `nalgebra`, with `faer`
//! supplying the SVD.
//!
//! Everything in this crate works on small dense matrices over `Complex<f64>`
//! (boundary spaces rarely exceed a few dozen dimensions), so the helpers
//! favour clarity over allocation-free code. Rank decisions go through a
//! single rule, [`RankTol`], so that all integer-valued quantities agree on
//! what counts as zero.

use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const IMAG: C64 = C64::new(0.0, 1.0);

/// Singular-value threshold: `σ` counts iff `σ > rel · σ_max · max(m, n)`
/// and `σ > abs`. The absolute floor only matters for matrices made entirely
/// of rounding noise, such as `1 − P` for a full-rank projector.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RankTol {
    pub rel: f64,
    pub abs: f64,
}

impl Default for RankTol {
    fn default() -> Self {
        Self { rel: 1e-10, abs: 1e-13 }
    }
}

impl RankTol {
    pub fn new(rel: f64) -> Self {
        Self { rel, ..Self::default() }
    }

    pub fn halved(self) -> Self {
        Self {
            rel: self.rel / 2.0,
            abs: self.abs / 2.0,
        }
    }

    pub fn threshold(&self, sigma_max: f64, rows: usize, cols: usize) -> f64 {
        (self.rel * sigma_max * rows.max(cols) as f64).max(self.abs)
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

pub fn from_real(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn diag_real(values: &[f64]) -> CMat {
    let n = values.len();
    let mut m = zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = C64::new(v, 0.0);
    }
    m
}

/// Largest entry modulus; zero for empty matrices.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

pub fn is_normal(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m * m.adjoint() - m.adjoint() * m)) <= tol
}

/// Hermitian projector for the hermitian part of `m`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().fold(ZERO, |acc, z| acc + z)
}

/// Horizontal concatenation `[a | b]`; row counts must agree.
pub fn hcat(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows(), "hcat row mismatch");
    let mut out = zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

/// Vertical stacking of blocks with equal column counts.
pub fn vstack(blocks: &[&CMat]) -> CMat {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack column mismatch");
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Full SVD `m = U diag(s) V*`, singular values descending.
///
/// `nalgebra`'s complex SVD loses accuracy on hermitian and rank-deficient
/// inputs, so this goes through `faer`.
struct Svd {
    u: CMat,
    s: Vec<f64>,
    v: CMat,
}

fn svd(m: &CMat) -> Svd {
    let (rows, cols) = m.shape();
    let a = faer::Mat::<C64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let f = a.svd().expect("SVD did not converge");
    let (u, v) = (f.U(), f.V());
    Svd {
        u: CMat::from_fn(rows, rows, |i, j| u[(i, j)]),
        s: f.S().column_vector().iter().map(|x| x.re).collect(),
        v: CMat::from_fn(cols, cols, |i, j| v[(i, j)]),
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    svd(m).s
}

pub fn rank(m: &CMat, tol: RankTol) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else {
        return 0;
    };
    let thr = tol.threshold(smax, m.nrows(), m.ncols());
    s.iter().filter(|&&x| x > thr).count()
}

/// Orthonormal basis of the column space of `m`.
pub fn column_space(m: &CMat, tol: RankTol) -> CMat {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return zeros(rows, 0);
    }
    let f = svd(m);
    let thr = tol.threshold(f.s[0], m.nrows(), m.ncols());
    let r = f.s.iter().filter(|&&x| x > thr).count();
    f.u.columns(0, r).into_owned()
}

/// Orthonormal basis of the kernel of `m` (an `ncols × k` matrix).
pub fn null_space(m: &CMat, tol: RankTol) -> CMat {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return zeros(0, 0);
    }
    if rows == 0 {
        return identity(cols);
    }
    let f = svd(m);
    let thr = tol.threshold(f.s[0], rows, cols);
    let r = f.s.iter().filter(|&&x| x > thr).count();
    f.v.columns(r, cols - r).into_owned()
}

pub fn select_columns(m: &CMat, idx: &[usize]) -> CMat {
    let mut out = zeros(m.nrows(), idx.len());
    for (j, &i) in idx.iter().enumerate() {
        out.set_column(j, &m.column(i));
    }
    out
}

/// Eigendecomposition of a hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = select_columns(&eig.eigenvectors, &order);
    (values, vectors)
}

/// Applies a real function to the spectrum of a hermitian matrix.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let d: Vec<f64> = vals.into_iter().map(f).collect();
    &vecs * diag_real(&d) * vecs.adjoint()
}

/// Moore–Penrose pseudo-inverse via SVD with the shared rank rule.
pub fn pinv(m: &CMat, tol: RankTol) -> CMat {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return zeros(cols, rows);
    }
    let f = svd(m);
    let thr = tol.threshold(f.s[0], rows, cols);
    let mut out = zeros(cols, rows);
    for (i, &si) in f.s.iter().enumerate().take_while(|(_, &si)| si > thr) {
        out += (f.v.column(i) * f.u.column(i).adjoint()) * C64::new(1.0 / si, 0.0);
    }
    out
}

/// Orthonormal basis of the range of a (numerical) orthogonal projector,
/// from the eigenvectors with eigenvalue above ½.
pub fn projector_range(p: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(p);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
    select_columns(&vecs, &keep)
}

/// Orthogonal projector onto the span of orthonormal columns.
pub fn projector_from_basis(basis: &CMat) -> CMat {
    basis * basis.adjoint()
}

/// Complex Schur form `m = Q T Q*`.
pub fn schur(m: &CMat) -> Option<(CMat, CMat)> {
    let n = m.nrows();
    if n == 0 {
        return Some((zeros(0, 0), zeros(0, 0)));
    }
    let s = Schur::try_new(m.clone(), f64::EPSILON, 100_000)?;
    Some(s.unpack())
}

/// Eigenvalues of a general complex matrix (diagonal of its Schur form).
pub fn eigenvalues(m: &CMat) -> Option<Vec<C64>> {
    schur(m).map(|(_, t)| t.diagonal().iter().copied().collect())
}

/// Eigenpairs of a normal matrix; the Schur vectors are eigenvectors.
pub fn normal_eigen(m: &CMat) -> Option<(Vec<C64>, CMat)> {
    schur(m).map(|(q, t)| (t.diagonal().iter().copied().collect(), q))
}

/// Unit vector spanning the (numerical) kernel of `m − λ·1`, taken as the
/// right singular vector belonging to the smallest singular value.
pub fn eigenvector_for(m: &CMat, lambda: C64) -> CVec {
    let n = m.nrows();
    let f = svd(&(m - identity(n) * lambda));
    f.v.column(n - 1).into_owned()
}

pub fn inner(x: &CVec, y: &CVec) -> C64 {
    x.dotc(y)
}

pub fn determinant(m: &CMat) -> C64 {
    if m.nrows() == 0 {
        return ONE;
    }
    m.clone().lu().determinant()
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    if m.nrows() == 0 {
        return Some(zeros(0, 0));
    }
    m.clone().lu().try_inverse()
}

/// Rounds to the nearest integer when within `tol`, otherwise `None`.
pub fn as_integer(x: f64, tol: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= tol).then_some(r as i64)
}
