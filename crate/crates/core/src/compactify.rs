//! Closing external edges with Dirichlet or Neumann ends, and the
//! zero-mode counts and trace identities that follow.

use serde::Serialize;

use crate::conditions::VertexConditions;
use crate::error::{Error, Result};
use crate::graph::{
    canonical_subspace, intersect_dim, ExternalEdgeSpec, GraphSpec, InternalEdgeSpec, MetricGraph,
    Subspace, SubspaceKind,
};
use crate::linalg::{identity, max_abs, rank, trace, zeros, CMat, C64};
use crate::spectral::{algebraic_n, lambda_plus_min, tau_max, zero_modes_direct, TAU_MARGIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Dirichlet,
    Neumann,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Dirichlet => "dirichlet",
            Flavor::Neumann => "neumann",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Compactified {
    pub graph_hat: MetricGraph,
    pub vc_hat: VertexConditions,
    pub flavor: Flavor,
    pub new_lengths: Vec<f64>,
    /// Position in the closed graph's boundary space of each original
    /// boundary coordinate.
    pub embedding: Vec<usize>,
}

fn fresh_vertex_id(taken: &[String], base: &str) -> String {
    let mut id = format!("{base}@end");
    while taken.contains(&id) {
        id.push('\'');
    }
    id
}

/// Replaces every external edge by an internal edge of the given length
/// ending in a new degree-one vertex with Dirichlet or Neumann conditions.
pub fn compactify(
    graph: &MetricGraph,
    vc: &VertexConditions,
    flavor: Flavor,
    new_lengths: &[f64],
) -> Result<Compactified> {
    if vc.dim() != graph.dim() {
        return Err(Error::DimensionMismatch {
            expected: graph.dim(),
            got: vc.dim(),
        });
    }
    let m = graph.n_external();
    if new_lengths.len() != m {
        return Err(Error::LengthCount {
            expected: m,
            got: new_lengths.len(),
        });
    }
    let n = graph.n_internal();
    let spec = graph.spec();
    let mut vertices = spec.vertices.clone();
    let mut internal = spec.internal_edges.clone();
    for (x, &len) in spec.external_edges.iter().zip(new_lengths) {
        let v = fresh_vertex_id(&vertices, &x.id);
        vertices.push(v.clone());
        internal.push(InternalEdgeSpec {
            id: x.id.clone(),
            tail: x.anchor.clone(),
            head: v,
            length: len,
        });
    }
    let graph_hat = MetricGraph::new(&GraphSpec {
        vertices,
        internal_edges: internal,
        external_edges: Vec::<ExternalEdgeSpec>::new(),
    })?;

    // Order [s_int, e_int, s_new, e_new] to canonical [s_int, s_new, e_int, e_new].
    let mut perm = Vec::with_capacity(2 * (n + m));
    perm.extend(0..n);
    perm.extend(n + m..2 * n + m);
    perm.extend(n..n + m);
    perm.extend(2 * n + m..2 * (n + m));
    let end_p = match flavor {
        Flavor::Dirichlet => identity(m),
        Flavor::Neumann => zeros(m, m),
    };
    let ends = VertexConditions::validate_with(end_p, zeros(m, m), vc.tol())?;
    let vc_hat = vc.direct_sum(&ends)?.permuted(&perm)?;
    perm.truncate(graph.dim());
    Ok(Compactified {
        graph_hat,
        vc_hat,
        flavor,
        new_lengths: new_lengths.to_vec(),
        embedding: perm,
    })
}

/// `10·max(1, max internal length, 2/λ⁺_min)` for every external edge.
pub fn default_new_lengths(graph: &MetricGraph, vc: &VertexConditions) -> Vec<f64> {
    let lmax = graph.lengths().into_iter().fold(1.0, f64::max);
    let lam = lambda_plus_min(vc).map_or(0.0, |l| 2.0 / l);
    vec![10.0 * lmax.max(lam); graph.n_external()]
}

const MAX_DOUBLINGS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenZeroModeDims {
    pub g0: usize,
    pub g0_hat_d: usize,
    pub g0_hat_n: usize,
    pub n_hat_d: usize,
    pub n_hat_n: usize,
    pub g_tilde_0: usize,
    pub g_tilde_p0: usize,
    pub tau_hat_d: f64,
    pub tau_hat_n: f64,
    pub new_lengths: Vec<f64>,
}

/// `dim(ker Q ∩ (M_sy ⊕ M₀))`: boundary data of edgewise constants that are
/// allowed to be nonzero on external edges.
pub fn g_tilde_0_direct(graph: &MetricGraph, vc: &VertexConditions) -> Result<usize> {
    let tol = vc.tol();
    let ker_q = Subspace::kernel(vc.q(), tol);
    let consts = canonical_subspace(graph, SubspaceKind::Sy)
        .sum(&canonical_subspace(graph, SubspaceKind::Zero), tol)?;
    intersect_dim(&ker_q, &consts, tol)
}

fn closure(
    graph: &MetricGraph,
    vc: &VertexConditions,
    flavor: Flavor,
    lengths: &[f64],
    escalate: bool,
) -> Result<(Compactified, f64)> {
    let mut lengths = lengths.to_vec();
    let mut doublings = 0;
    loop {
        let c = compactify(graph, vc, flavor, &lengths)?;
        let tau = tau_max(&c.graph_hat, &c.vc_hat)?;
        if tau < 1.0 - TAU_MARGIN {
            return Ok((c, tau));
        }
        if !escalate || doublings == MAX_DOUBLINGS {
            return Err(Error::ClosureTau {
                flavor: flavor.name(),
                tau,
                doublings,
            });
        }
        lengths.iter_mut().for_each(|l| *l *= 2.0);
        doublings += 1;
    }
}

/// Both closures on common lengths with `τ̂_max < 1`. Neumann may escalate
/// further than Dirichlet, in which case Dirichlet is redone on its lengths.
fn closures(
    graph: &MetricGraph,
    vc: &VertexConditions,
    new_lengths: Option<&[f64]>,
) -> Result<((Compactified, f64), (Compactified, f64))> {
    let (lengths, escalate) = match new_lengths {
        Some(l) => (l.to_vec(), false),
        None => (default_new_lengths(graph, vc), true),
    };
    let d = closure(graph, vc, Flavor::Dirichlet, &lengths, escalate)?;
    let n = closure(graph, vc, Flavor::Neumann, &d.0.new_lengths, escalate)?;
    let d = if n.0.new_lengths != d.0.new_lengths {
        closure(graph, vc, Flavor::Dirichlet, &n.0.new_lengths, false)?
    } else {
        d
    };
    Ok((d, n))
}

/// Zero-mode counts of the graph and of both closures. With
/// `new_lengths = None` the default lengths are doubled until both closures
/// have `τ̂_max < 1`.
pub fn generalized_dims(
    graph: &MetricGraph,
    vc: &VertexConditions,
    new_lengths: Option<&[f64]>,
) -> Result<GenZeroModeDims> {
    let ((d, tau_d), (nn, tau_n)) = closures(graph, vc, new_lengths)?;
    let g0 = zero_modes_direct(graph, vc)?.g0;
    let g0_hat_d = zero_modes_direct(&d.graph_hat, &d.vc_hat)?.g0;
    let g0_hat_n = zero_modes_direct(&nn.graph_hat, &nn.vc_hat)?.g0;
    let g_tilde_0 = g0_hat_n;
    Ok(GenZeroModeDims {
        g0,
        g0_hat_d,
        g0_hat_n,
        n_hat_d: algebraic_n(&d.graph_hat, &d.vc_hat)?,
        n_hat_n: algebraic_n(&nn.graph_hat, &nn.vc_hat)?,
        g_tilde_0,
        g_tilde_p0: g_tilde_0.saturating_sub(g0),
        tau_hat_d: tau_d,
        tau_hat_n: tau_n,
        new_lengths: nn.new_lengths,
    })
}

/// `g̃_{p,0}` alone, from the Neumann closure on the default lengths.
fn g_tilde_p0(graph: &MetricGraph, vc: &VertexConditions, g0: usize) -> Result<usize> {
    let (_, (nn, _)) = closures(graph, vc, None)?;
    Ok(zero_modes_direct(&nn.graph_hat, &nn.vc_hat)?.g0.saturating_sub(g0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TraceIdentity {
    pub lhs: i64,
    pub rhs1: i64,
    pub rhs2: i64,
}

impl TraceIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs1 && self.lhs == self.rhs2
    }
}

/// `tr(Q̂⊥ − Q̂)` against the two subspace-dimension expressions.
pub fn trace_identity_sq(q_hat: &CMat, graph_hat: &MetricGraph) -> Result<TraceIdentity> {
    if !graph_hat.is_compact() {
        return Err(Error::NotCompact);
    }
    let e = graph_hat.dim();
    if q_hat.nrows() != e || q_hat.ncols() != e {
        return Err(Error::DimensionMismatch {
            expected: e,
            got: q_hat.nrows(),
        });
    }
    let defect = max_abs(&(q_hat - q_hat.adjoint())).max(max_abs(&(q_hat * q_hat - q_hat)));
    if defect > crate::conditions::VALIDATION_TOL {
        return Err(Error::NotProjector { defect });
    }
    let tol = crate::RankTol::default();
    let tr = trace(&(identity(e) - q_hat * C64::new(2.0, 0.0))).re;
    let lhs = tr.round() as i64;
    debug_assert_eq!(lhs, e as i64 - 2 * rank(q_hat, tol) as i64);
    let ker = Subspace::kernel(q_hat, tol);
    let ran = Subspace::span(q_hat, tol);
    let sy = canonical_subspace(graph_hat, SubspaceKind::Sy);
    let asy = canonical_subspace(graph_hat, SubspaceKind::Asy);
    let d = |a: &Subspace, b: &Subspace| intersect_dim(a, b, tol).map(|x| x as i64);
    Ok(TraceIdentity {
        lhs,
        rhs1: 2 * (d(&ker, &sy)? - d(&ran, &asy)?),
        rhs2: 2 * (d(&ker, &asy)? - d(&ran, &sy)?),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaIdentity {
    pub gamma: f64,
    pub trace_s0: i64,
    pub external_count: usize,
    pub g_tilde_p0: usize,
    /// `4γ − (tr 𝔖₀ + |ℰ_ex| − 2g̃_{p,0})`, exact.
    pub residual_quarters: i64,
    pub residual: f64,
}

/// `γ = g₀ − N/2` against `¼ tr 𝔖₀ + ¼|ℰ_ex| − ½ g̃_{p,0}` in exact
/// quarter-integer arithmetic. Requires `τ_max < 1`.
pub fn gamma_and_theorem300(graph: &MetricGraph, vc: &VertexConditions) -> Result<GammaIdentity> {
    let tau = tau_max(graph, vc)?;
    if tau >= 1.0 - TAU_MARGIN {
        return Err(Error::FastSolverInapplicable { tau });
    }
    gamma_identity_terms(graph, vc)
}

/// Same terms without the `τ_max` precondition. The identity may fail when
/// `τ_max ≥ 1`; on non-compact graphs the closures must still reach
/// `τ̂_max < 1`.
pub fn gamma_identity_terms(graph: &MetricGraph, vc: &VertexConditions) -> Result<GammaIdentity> {
    let g0 = zero_modes_direct(graph, vc)?.g0;
    let n = algebraic_n(graph, vc)? as i64;
    let g_tilde_p0 = if graph.is_compact() { 0 } else { g_tilde_p0(graph, vc, g0)? };
    let g0 = g0 as i64;
    let trace_s0 = vc.trace_s0();
    let m = graph.n_external() as i64;
    let rq = 4 * g0 - 2 * n - (trace_s0 + m - 2 * g_tilde_p0 as i64);
    Ok(GammaIdentity {
        gamma: g0 as f64 - n as f64 / 2.0,
        trace_s0,
        external_count: graph.n_external(),
        g_tilde_p0,
        residual_quarters: rq,
        residual: rq as f64 / 4.0,
    })
}
