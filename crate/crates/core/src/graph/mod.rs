//! Metric graphs and the boundary space they induce.
//!
//! The boundary space of a graph with `n` internal and `m` external edges is
//! `C^E`, `E = 2n + m`, ordered as all internal starts, then all internal
//! ends, then all external starts. Edges keep the order in which they were
//! declared, so index `e` in each block refers to the `e`-th declared edge.

mod matrices;
mod subspace;

pub use matrices::{transfer_derivative, transfer_matrix, BoundaryMatrices};
pub use subspace::{canonical_subspace, intersect_dim, SubspaceKind, Subspace};

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InternalEdgeSpec {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalEdgeSpec {
    pub id: String,
    pub anchor: String,
}

/// Unvalidated graph description, as found in config documents.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub internal_edges: Vec<InternalEdgeSpec>,
    #[serde(default)]
    pub external_edges: Vec<ExternalEdgeSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InternalEdge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalEdge {
    pub id: String,
    pub anchor: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<String>,
    internal: Vec<InternalEdge>,
    external: Vec<ExternalEdge>,
}

impl MetricGraph {
    pub fn new(spec: &GraphSpec) -> Result<Self> {
        if spec.vertices.is_empty() {
            return Err(Error::NoVertices);
        }
        let mut index = HashMap::new();
        for (i, v) in spec.vertices.iter().enumerate() {
            if index.insert(v.as_str(), i).is_some() {
                return Err(Error::DuplicateVertex(v.clone()));
            }
        }
        let mut edge_ids = HashSet::new();
        let lookup = |edge: &str, v: &str| {
            index.get(v).copied().ok_or_else(|| Error::DanglingEndpoint {
                edge: edge.to_string(),
                vertex: v.to_string(),
            })
        };

        let mut internal = Vec::with_capacity(spec.internal_edges.len());
        for e in &spec.internal_edges {
            if !edge_ids.insert(e.id.as_str()) {
                return Err(Error::DuplicateEdge(e.id.clone()));
            }
            let tail = lookup(&e.id, &e.tail)?;
            let head = lookup(&e.id, &e.head)?;
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidLength {
                    edge: e.id.clone(),
                    length: e.length,
                });
            }
            internal.push(InternalEdge {
                id: e.id.clone(),
                tail,
                head,
                length: e.length,
            });
        }

        let mut external = Vec::with_capacity(spec.external_edges.len());
        for e in &spec.external_edges {
            if !edge_ids.insert(e.id.as_str()) {
                return Err(Error::DuplicateEdge(e.id.clone()));
            }
            external.push(ExternalEdge {
                id: e.id.clone(),
                anchor: lookup(&e.id, &e.anchor)?,
            });
        }

        Ok(Self {
            vertices: spec.vertices.clone(),
            internal,
            external,
        })
    }

    /// Interval `[0, l]` between vertices `a` and `b`.
    pub fn interval(length: f64) -> Result<Self> {
        Self::new(&GraphSpec {
            vertices: vec!["a".into(), "b".into()],
            internal_edges: vec![InternalEdgeSpec {
                id: "e0".into(),
                tail: "a".into(),
                head: "b".into(),
                length,
            }],
            external_edges: vec![],
        })
    }

    /// Half-line `[0, ∞)` attached at vertex `o`.
    pub fn half_line() -> Self {
        Self::star(1)
    }

    /// One vertex with `n` external edges.
    pub fn star(n: usize) -> Self {
        Self::new(&GraphSpec {
            vertices: vec!["o".into()],
            internal_edges: vec![],
            external_edges: (0..n)
                .map(|i| ExternalEdgeSpec {
                    id: format!("x{i}"),
                    anchor: "o".into(),
                })
                .collect(),
        })
        .expect("star is valid")
    }

    pub fn spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.vertices.clone(),
            internal_edges: self
                .internal
                .iter()
                .map(|e| InternalEdgeSpec {
                    id: e.id.clone(),
                    tail: self.vertices[e.tail].clone(),
                    head: self.vertices[e.head].clone(),
                    length: e.length,
                })
                .collect(),
            external_edges: self
                .external
                .iter()
                .map(|e| ExternalEdgeSpec {
                    id: e.id.clone(),
                    anchor: self.vertices[e.anchor].clone(),
                })
                .collect(),
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn internal_edges(&self) -> &[InternalEdge] {
        &self.internal
    }

    pub fn external_edges(&self) -> &[ExternalEdge] {
        &self.external
    }

    pub fn n_internal(&self) -> usize {
        self.internal.len()
    }

    pub fn n_external(&self) -> usize {
        self.external.len()
    }

    /// Boundary dimension `E = 2·|internal| + |external|`.
    pub fn dim(&self) -> usize {
        2 * self.internal.len() + self.external.len()
    }

    pub fn is_compact(&self) -> bool {
        self.external.is_empty()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.internal.iter().map(|e| e.length).collect()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn start_index(&self, e: usize) -> usize {
        e
    }

    pub fn end_index(&self, e: usize) -> usize {
        self.internal.len() + e
    }

    pub fn external_index(&self, j: usize) -> usize {
        2 * self.internal.len() + j
    }

    /// Vertex index owning boundary coordinate `i`.
    pub fn boundary_vertex(&self, i: usize) -> usize {
        let n = self.internal.len();
        if i < n {
            self.internal[i].tail
        } else if i < 2 * n {
            self.internal[i - n].head
        } else {
            self.external[i - 2 * n].anchor
        }
    }

    /// Boundary coordinates attached to vertex `v`, ascending. A loop
    /// contributes both of its coordinates.
    pub fn vertex_boundary_indices(&self, v: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.boundary_vertex(i) == v)
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertex_boundary_indices(v).len()
    }

    /// Disjoint union; vertex and edge ids of `other` get `suffix` appended.
    pub fn disjoint_union(&self, other: &MetricGraph, suffix: &str) -> MetricGraph {
        let mut spec = self.spec();
        let o = other.spec();
        spec.vertices
            .extend(o.vertices.iter().map(|v| format!("{v}{suffix}")));
        spec.internal_edges
            .extend(o.internal_edges.iter().map(|e| InternalEdgeSpec {
                id: format!("{}{suffix}", e.id),
                tail: format!("{}{suffix}", e.tail),
                head: format!("{}{suffix}", e.head),
                length: e.length,
            }));
        spec.external_edges
            .extend(o.external_edges.iter().map(|e| ExternalEdgeSpec {
                id: format!("{}{suffix}", e.id),
                anchor: format!("{}{suffix}", e.anchor),
            }));
        MetricGraph::new(&spec).expect("union of valid graphs is valid")
    }

    /// Permutation taking boundary indices of `self ⊔ other` written as
    /// `[self-coords, other-coords]` (each in its own canonical order) to the
    /// canonical order of the union graph.
    pub fn union_permutation(&self, other: &MetricGraph) -> Vec<usize> {
        let (n1, m1) = (self.n_internal(), self.n_external());
        let (n2, m2) = (other.n_internal(), other.n_external());
        let n = n1 + n2;
        let mut perm = Vec::with_capacity(self.dim() + other.dim());
        perm.extend(0..n1);
        perm.extend(n..n + n1);
        perm.extend(2 * n..2 * n + m1);
        perm.extend(n1..n);
        perm.extend(n + n1..2 * n);
        perm.extend(2 * n + m1..2 * n + m1 + m2);
        perm
    }
}
