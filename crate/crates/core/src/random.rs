//! Seeded random graphs, vertex conditions and projectors for campaigns.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::conditions::{VertexBlock, VertexConditions};
use crate::graph::{
    canonical_subspace, ExternalEdgeSpec, GraphSpec, InternalEdgeSpec, MetricGraph, SubspaceKind,
};
use crate::linalg::{
    column_space, diag_real, hcat, identity, projector_from_basis, zeros, CMat, RankTol, C64,
};
use crate::spectral::lambda_plus_min;

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` divided out.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    if n == 0 {
        return zeros(0, 0);
    }
    let qr = ginibre(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

/// Projector onto the first `rank` columns of a Haar unitary.
pub fn haar_projector<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> CMat {
    let u = haar_unitary(rng, n);
    projector_from_basis(&u.columns(0, rank).into_owned())
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let a = ginibre(rng, n, n);
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Nonzero eigenvalue magnitudes are drawn from this range.
pub const MU_RANGE: (f64, f64) = (0.2, 3.0);

/// Random `(P, L)` on `C^d`: `P` of random rank from a Haar unitary, `L`
/// supported on `ran P⊥` with random rank and eigenvalues `±U(0.2, 3)`.
/// `L = 0` with probability 1/4.
pub fn random_pl<R: Rng + ?Sized>(rng: &mut R, d: usize) -> (CMat, CMat) {
    let u = haar_unitary(rng, d);
    let rank_p = rng.random_range(0..=d);
    let p = projector_from_basis(&u.columns(0, rank_p).into_owned());
    let free = d - rank_p;
    let mut l = zeros(d, d);
    if free > 0 && rng.random_bool(0.75) {
        let b = u.columns(rank_p, free).into_owned();
        let w = haar_unitary(rng, free);
        let rank_l = rng.random_range(1..=free);
        let mut mus = vec![0.0; free];
        for m in mus.iter_mut().take(rank_l) {
            let mag = rng.random_range(MU_RANGE.0..MU_RANGE.1);
            *m = if rng.random_bool(0.5) { mag } else { -mag };
        }
        let v = &b * w;
        l = &v * diag_real(&mus) * v.adjoint();
        l = (&l + l.adjoint()) * C64::new(0.5, 0.0);
    }
    (p, l)
}

fn uniform_vector(d: usize) -> CMat {
    CMat::from_element(d, 1, C64::new(1.0 / (d as f64).sqrt(), 0.0))
}

/// Random condition block at a vertex of degree `d`, drawn from the
/// standard families (Dirichlet, Neumann, Kirchhoff, δ, Robin) or generic.
pub fn random_block<R: Rng + ?Sized>(rng: &mut R, d: usize) -> (CMat, CMat) {
    let mag = rng.random_range(MU_RANGE.0..MU_RANGE.1);
    let signed = if rng.random_bool(0.5) { mag } else { -mag };
    match rng.random_range(0..6) {
        0 => (identity(d), zeros(d, d)),
        1 => (zeros(d, d), zeros(d, d)),
        2 => {
            let u = uniform_vector(d);
            (identity(d) - &u * u.adjoint(), zeros(d, d))
        }
        3 => {
            let u = uniform_vector(d);
            let uu = &u * u.adjoint();
            (identity(d) - &uu, uu * C64::new(signed, 0.0))
        }
        4 => (zeros(d, d), identity(d) * C64::new(signed, 0.0)),
        _ => random_pl(rng, d),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Any,
    Compact,
    NonCompact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphParams {
    pub max_vertices: usize,
    pub max_internal_edges: usize,
    pub external_prob: f64,
    pub min_length: f64,
    pub max_length: f64,
    pub topology: Topology,
}

impl Default for GraphParams {
    fn default() -> Self {
        Self {
            max_vertices: 4,
            max_internal_edges: 6,
            external_prob: 0.3,
            min_length: 0.3,
            max_length: 3.0,
            topology: Topology::Any,
        }
    }
}

impl GraphParams {
    pub fn with_topology(self, topology: Topology) -> Self {
        Self { topology, ..self }
    }
}

pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, params: &GraphParams) -> MetricGraph {
    let nv = rng.random_range(1..=params.max_vertices.max(1));
    let vertices: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let min_int = usize::from(params.topology == Topology::Compact);
    let ni = rng.random_range(min_int..=params.max_internal_edges.max(min_int));
    let internal_edges = (0..ni)
        .map(|i| InternalEdgeSpec {
            id: format!("e{i}"),
            tail: vertices[rng.random_range(0..nv)].clone(),
            head: vertices[rng.random_range(0..nv)].clone(),
            length: rng.random_range(params.min_length..params.max_length),
        })
        .collect();
    let mut external_edges = Vec::new();
    if params.topology != Topology::Compact {
        for v in &vertices {
            while rng.random_bool(params.external_prob.clamp(0.0, 0.9)) {
                external_edges.push(ExternalEdgeSpec {
                    id: format!("x{}", external_edges.len()),
                    anchor: v.clone(),
                });
            }
        }
        let need = params.topology == Topology::NonCompact || ni == 0;
        if need && external_edges.is_empty() {
            external_edges.push(ExternalEdgeSpec {
                id: "x0".into(),
                anchor: vertices[rng.random_range(0..nv)].clone(),
            });
        }
    }
    MetricGraph::new(&GraphSpec {
        vertices,
        internal_edges,
        external_edges,
    })
    .expect("generated graph is valid")
}

/// Either global conditions from [`random_pl`] or local ones assembled from
/// [`random_block`], with equal probability.
pub fn random_conditions<R: Rng + ?Sized>(rng: &mut R, graph: &MetricGraph) -> VertexConditions {
    if rng.random_bool(0.5) {
        let (p, l) = random_pl(rng, graph.dim());
        VertexConditions::validate(p, l).expect("generated conditions are valid")
    } else {
        let blocks: Vec<VertexBlock> = graph
            .vertices()
            .iter()
            .enumerate()
            .map(|(v, name)| {
                let (p, l) = random_block(rng, graph.degree(v));
                VertexBlock {
                    vertex: name.clone(),
                    p,
                    l,
                }
            })
            .collect();
        VertexConditions::from_vertex_blocks(graph, &blocks).expect("generated blocks are valid")
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: MetricGraph,
    pub vc: VertexConditions,
}

pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, params: &GraphParams) -> Instance {
    let graph = random_graph(rng, params);
    let vc = random_conditions(rng, &graph);
    Instance { graph, vc }
}

/// Random instance whose shortest edge exceeds `2/λ⁺_min` by a random
/// factor in `[1.05, 3)`.
pub fn long_edge_instance<R: Rng + ?Sized>(rng: &mut R, params: &GraphParams) -> Instance {
    let Instance { graph, vc } = random_instance(rng, params);
    let Some(lmin) = lambda_plus_min(&vc) else {
        return Instance { graph, vc };
    };
    let floor = 2.0 / lmin * rng.random_range(1.05..3.0);
    let mut spec = graph.spec();
    let shortest = graph.lengths().into_iter().fold(f64::INFINITY, f64::min);
    if shortest.is_finite() {
        let s = floor / shortest;
        if s > 1.0 {
            spec.internal_edges.iter_mut().for_each(|e| e.length *= s);
        }
    }
    Instance {
        graph: MetricGraph::new(&spec).expect("rescaled graph is valid"),
        vc,
    }
}

/// Two disjoint copies of an instance, giving every eigenvalue even
/// multiplicity.
pub fn doubled(inst: &Instance) -> Instance {
    let graph = inst.graph.disjoint_union(&inst.graph, "'");
    let perm = inst.graph.union_permutation(&inst.graph);
    let vc = inst
        .vc
        .direct_sum(&inst.vc)
        .and_then(|v| v.permuted(&perm))
        .expect("direct sum of valid conditions is valid");
    Instance { graph, vc }
}

/// Orthogonal projector on the boundary space of a compact graph: either
/// Haar-random of random rank, or spanned by random vectors drawn partly
/// from `M_sy` and `M_asy` so that intersections are nontrivial.
pub fn random_boundary_projector<R: Rng + ?Sized>(rng: &mut R, graph: &MetricGraph) -> CMat {
    let e = graph.dim();
    if rng.random_bool(0.5) {
        let r = rng.random_range(0..=e);
        return haar_projector(rng, e, r);
    }
    let n = graph.n_internal();
    let sy = canonical_subspace(graph, SubspaceKind::Sy);
    let asy = canonical_subspace(graph, SubspaceKind::Asy);
    let a = rng.random_range(0..=n);
    let b = rng.random_range(0..=n);
    let c = rng.random_range(0..=e);
    let gens = hcat(
        &hcat(&(sy.basis() * ginibre(rng, n, a)), &(asy.basis() * ginibre(rng, n, b))),
        &ginibre(rng, e, c),
    );
    let basis = column_space(&gens, RankTol::default());
    projector_from_basis(&basis)
}
