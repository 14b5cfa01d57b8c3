//! Root location for the secular function on the real and imaginary axes.

use serde::Serialize;

use crate::campaign;
use crate::conditions::VertexConditions;
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::linalg::{inner, normal_eigen, CMat, C64};

use super::multiplicity::multiplicity_at;
use super::secular::{check_dims, secular, u_matrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub k_re: f64,
    pub k_im: f64,
    pub multiplicity: usize,
    /// `|F(k)|` at the reported point.
    pub residual: f64,
}

impl SpectralPoint {
    pub fn k(&self) -> C64 {
        C64::new(self.k_re, self.k_im)
    }

    /// Laplace eigenvalue `k²` (real for both axes).
    pub fn energy(&self) -> f64 {
        (self.k() * self.k()).re
    }
}

/// Roots closer than this are merged.
pub const MERGE_TOL: f64 = 1e-9;
const MAX_DEPTH: usize = 40;
/// Largest eigenphase step accepted between neighbouring scan points.
const MAX_STEP: f64 = std::f64::consts::FRAC_PI_4;

#[derive(Clone)]
struct Eig {
    k: f64,
    phases: Vec<f64>,
    vecs: CMat,
}

fn eig_at(graph: &MetricGraph, vc: &VertexConditions, k: f64) -> Result<Eig> {
    let u = u_matrix(graph, vc, C64::new(k, 0.0))?;
    let (vals, vecs) = normal_eigen(&u).ok_or(Error::SchurFailed)?;
    Ok(Eig {
        k,
        phases: vals.iter().map(|z| z.arg()).collect(),
        vecs,
    })
}

fn wrap(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x % two_pi;
    if y > std::f64::consts::PI {
        y -= two_pi;
    } else if y <= -std::f64::consts::PI {
        y += two_pi;
    }
    y
}

fn overlap(a: &Eig, i: usize, b: &Eig, j: usize) -> f64 {
    inner(&a.vecs.column(i).into_owned(), &b.vecs.column(j).into_owned()).norm_sqr()
}

/// Greedy maximal-overlap assignment of eigenvectors of `a` to those of `b`.
fn match_branches(a: &Eig, b: &Eig) -> Vec<usize> {
    let n = a.phases.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            pairs.push((overlap(a, i, b, j), i, j));
        }
    }
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut to = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for (_, i, j) in pairs {
        if to[i] == usize::MAX && !used[j] {
            to[i] = j;
            used[j] = true;
        }
    }
    to
}

fn crosses_zero(a: f64, b: f64) -> bool {
    let half = std::f64::consts::FRAC_PI_2;
    a.abs() < half && b.abs() < half && ((a < 0.0) != (b < 0.0))
}

struct Scanner<'a> {
    graph: &'a MetricGraph,
    vc: &'a VertexConditions,
    roots: Vec<f64>,
}

impl Scanner<'_> {
    fn cell(&mut self, a: &Eig, b: &Eig, depth: usize) -> Result<()> {
        let to = match_branches(a, b);
        let smooth = to
            .iter()
            .enumerate()
            .all(|(i, &j)| wrap(b.phases[j] - a.phases[i]).abs() < MAX_STEP);
        if !smooth && depth < MAX_DEPTH && b.k - a.k > 1e-12 * b.k.max(1.0) {
            let mid = eig_at(self.graph, self.vc, 0.5 * (a.k + b.k))?;
            self.cell(a, &mid, depth + 1)?;
            return self.cell(&mid, b, depth + 1);
        }
        for (i, &j) in to.iter().enumerate() {
            if crosses_zero(a.phases[i], b.phases[j]) {
                let root = self.bisect(a, i, b.k, b.phases[j])?;
                self.roots.push(root);
            }
        }
        Ok(())
    }

    /// Bisection on the phase of one tracked branch.
    fn bisect(&self, a: &Eig, branch: usize, hi_k: f64, hi_phase: f64) -> Result<f64> {
        let (mut lo, mut hi) = (a.k, hi_k);
        let mut lo_phase = a.phases[branch];
        let mut hi_phase = hi_phase;
        let mut vec = a.vecs.column(branch).into_owned();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let e = eig_at(self.graph, self.vc, mid)?;
            let pred = lo_phase + (hi_phase - lo_phase) * (mid - lo) / (hi - lo);
            let n = e.phases.len();
            let near: Vec<usize> = (0..n)
                .filter(|&j| (e.phases[j] - pred).abs() < MAX_STEP)
                .collect();
            let pick = |cands: &[usize]| {
                cands
                    .iter()
                    .copied()
                    .max_by(|&x, &y| {
                        let ox = inner(&vec, &e.vecs.column(x).into_owned()).norm_sqr();
                        let oy = inner(&vec, &e.vecs.column(y).into_owned()).norm_sqr();
                        ox.total_cmp(&oy)
                    })
                    .expect("non-empty")
            };
            let j = if near.is_empty() {
                pick(&(0..n).collect::<Vec<_>>())
            } else {
                pick(&near)
            };
            let ph = e.phases[j];
            if (ph < 0.0) == (lo_phase < 0.0) {
                lo = mid;
                lo_phase = ph;
                vec = e.vecs.column(j).into_owned();
            } else {
                hi = mid;
                hi_phase = ph;
            }
        }
        // Return whichever end has the smaller phase magnitude.
        Ok(if lo_phase.abs() <= hi_phase.abs() { lo } else { hi })
    }
}

fn merge(mut ks: Vec<f64>) -> Vec<f64> {
    ks.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for k in ks {
        match out.last() {
            Some(&last) if (k - last).abs() < MERGE_TOL => {}
            _ => out.push(k),
        }
    }
    out
}

/// All `k ∈ (0, k_max]` with `F(k) = 0` on a compact graph, located by
/// tracking the eigenphases of `U(k)` on a grid of spacing at most `grid`.
///
/// Cells where some eigenphase moves by more than π/4 are subdivided. A
/// branch that touches phase 0 without crossing it is not detected.
pub fn find_spectrum(
    graph: &MetricGraph,
    vc: &VertexConditions,
    k_max: f64,
    grid: f64,
) -> Result<Vec<SpectralPoint>> {
    check_dims(graph, vc)?;
    if !graph.is_compact() {
        return Err(Error::NotCompact);
    }
    if !(k_max.is_finite() && k_max > 0.0) {
        return Err(Error::InvalidParameter("k_max"));
    }
    if !(grid.is_finite() && grid > 0.0) {
        return Err(Error::InvalidParameter("grid"));
    }
    if graph.n_internal() == 0 {
        return Ok(Vec::new());
    }
    let h0 = grid.min(k_max);
    let k_start = 1e-6 * h0;
    // Scan a little past k_max so a root sitting exactly on it is bracketed.
    let k_end = k_max + 1e-3 * h0;
    let cells = ((k_end - k_start) / grid).ceil().max(1.0) as usize;
    let ks: Vec<f64> = (0..=cells)
        .map(|i| k_start + (k_end - k_start) * i as f64 / cells as f64)
        .collect();
    let eigs: Vec<Eig> = campaign::map(&ks, |&k| eig_at(graph, vc, k))
        .into_iter()
        .collect::<Result<_>>()?;

    let mut sc = Scanner {
        graph,
        vc,
        roots: Vec::new(),
    };
    for w in eigs.windows(2) {
        sc.cell(&w[0], &w[1], 0)?;
    }
    let limit = k_max + MERGE_TOL * k_max.max(1.0);
    merge(sc.roots)
        .into_iter()
        .filter(|&k| k <= limit)
        .map(|k| {
            let kc = C64::new(k, 0.0);
            Ok(SpectralPoint {
                k_re: k,
                k_im: 0.0,
                multiplicity: multiplicity_at(graph, vc, kc)?,
                residual: secular(graph, vc, kc)?.norm(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeScan {
    /// Roots `k = iκ`.
    pub roots: Vec<SpectralPoint>,
    /// Open `κ`-windows around poles that were not evaluated.
    pub skipped: Vec<(f64, f64)>,
}

const POLE_DECADES: i32 = 14;
/// Noise floor for `F(iκ)` relative to its median magnitude over the scan.
const NOISE_REL: f64 = 1e-11;
/// Samples closer than this (relative to `max|μ| + κ_max`) to a pole are dropped.
const POLE_GAP_REL: f64 = 1e-9;

fn re_f(graph: &MetricGraph, vc: &VertexConditions, kappa: f64) -> Result<f64> {
    Ok(secular(graph, vc, C64::new(0.0, kappa))?.re)
}

/// Negative eigenvalues `−κ²` from sign changes of the real function
/// `F(iκ)`, `κ ∈ (0, kappa_max]`. Poles at positive eigenvalues of `L` split
/// the range; samples approach each pole geometrically. Roots of even order
/// (no sign change) are not detected, nor are roots so close to a zero at
/// `k = 0` that `F` stays within rounding noise between them.
pub fn find_negative_eigenvalues(
    graph: &MetricGraph,
    vc: &VertexConditions,
    kappa_max: f64,
) -> Result<NegativeScan> {
    check_dims(graph, vc)?;
    if !graph.is_compact() {
        return Err(Error::NotCompact);
    }
    if !(kappa_max.is_finite() && kappa_max > 0.0) {
        return Err(Error::InvalidParameter("kappa_max"));
    }
    if graph.n_internal() == 0 {
        return Ok(NegativeScan {
            roots: Vec::new(),
            skipped: Vec::new(),
        });
    }
    let mut poles: Vec<f64> = vc
        .l_eigenvalues()
        .iter()
        .copied()
        .filter(|&m| m > 0.0 && m < kappa_max)
        .collect();
    poles.sort_by(f64::total_cmp);
    poles.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());

    let mut breaks = vec![0.0];
    breaks.extend(&poles);
    breaks.push(kappa_max);

    let mut samples: Vec<f64> = Vec::new();
    let mut skipped = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let width = b - a;
        if width <= 0.0 {
            continue;
        }
        let n = ((width / 0.01).ceil() as usize).clamp(200, 20_000);
        for i in 1..n {
            samples.push(a + width * i as f64 / n as f64);
        }
        for j in 1..=POLE_DECADES {
            let d = width * 10f64.powi(-j);
            samples.push(a + d);
            if b < kappa_max {
                samples.push(b - d);
            }
        }
        if b == kappa_max {
            samples.push(b);
        }
    }
    // Stay clear of the band in which the scattering matrix reports a pole.
    let mu_max = vc.l_eigenvalues().iter().fold(0.0f64, |a, m| a.max(m.abs()));
    let gap = POLE_GAP_REL * (mu_max + kappa_max);
    samples.retain(|&s| poles.iter().all(|&p| (s - p).abs() > gap));
    for &p in &poles {
        let below = samples.iter().copied().filter(|&s| s < p).fold(0.0, f64::max);
        let above = samples
            .iter()
            .copied()
            .filter(|&s| s > p)
            .fold(f64::INFINITY, f64::min);
        skipped.push((below, above.min(kappa_max)));
    }
    samples.sort_by(f64::total_cmp);
    samples.dedup();

    let values: Vec<f64> = campaign::map(&samples, |&s| re_f(graph, vc, s))
        .into_iter()
        .collect::<Result<_>>()?;

    // Values at or below the floor are rounding noise and carry no sign.
    // A leading noise run belongs to a zero at k = 0, which is not reported.
    let mut mags: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let floor = NOISE_REL * mags[mags.len() / 2];
    let mut roots = Vec::new();
    let mut prev: Option<usize> = None;
    for (i, &f) in values.iter().enumerate() {
        if f.abs() <= floor {
            continue;
        }
        if let Some(j) = prev {
            let (a, b) = (samples[j], samples[i]);
            let split = poles.iter().any(|&p| a < p && p < b);
            if !split && (values[j] < 0.0) != (f < 0.0) {
                roots.push(bisect_real(graph, vc, a, b, values[j])?);
            }
        }
        prev = Some(i);
    }
    if prev.is_some_and(|j| j + 1 < values.len()) {
        roots.push(*samples.last().expect("non-empty"));
    }
    let roots = merge(roots)
        .into_iter()
        .map(|kappa| {
            let k = C64::new(0.0, kappa);
            Ok(SpectralPoint {
                k_re: 0.0,
                k_im: kappa,
                multiplicity: multiplicity_at(graph, vc, k)?,
                residual: secular(graph, vc, k)?.norm(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(NegativeScan { roots, skipped })
}

fn bisect_real(
    graph: &MetricGraph,
    vc: &VertexConditions,
    mut lo: f64,
    mut hi: f64,
    f_lo: f64,
) -> Result<f64> {
    let lo_neg = f_lo < 0.0;
    let mut best = (f_lo.abs(), lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = re_f(graph, vc, mid)?;
        if fm.abs() < best.0 {
            best = (fm.abs(), mid);
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let f_hi = re_f(graph, vc, hi)?.abs();
    Ok(if f_hi < best.0 { hi } else { best.1 })
}
