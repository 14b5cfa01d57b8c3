//! Run configuration documents: a graph, its vertex conditions and optional
//! command parameters.
//!
//! Complex matrix entries are `[re, im]` pairs. Conditions are either one
//! global `(P, L)` pair, explicit or shorthand blocks per vertex, or a single
//! shorthand applied at every vertex.

use serde::{Deserialize, Serialize};

use qgraph_core::conditions::VertexBlock;
use qgraph_core::{CMat, GraphSpec, MetricGraph, RankTol, VertexConditions, C64};

use crate::error::CliError;

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    graph: GraphSpec,
    conditions: RawConditions,
    #[serde(default)]
    params: Params,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum RawConditions {
    Global {
        #[serde(rename = "P")]
        p: RawMatrix,
        #[serde(rename = "L")]
        l: RawMatrix,
    },
    PerVertex(Vec<RawBlock>),
    Uniform(Shorthand),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    vertex: String,
    #[serde(rename = "P")]
    p: Option<RawMatrix>,
    #[serde(rename = "L")]
    l: Option<RawMatrix>,
    condition: Option<Shorthand>,
}

/// Named vertex conditions, expanded at a vertex of degree `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Shorthand {
    /// `ψ = 0` on every end.
    Dirichlet,
    /// `ψ′ = 0` on every end.
    Neumann,
    /// Continuity and zero sum of inward derivatives.
    Kirchhoff,
    /// `ψ′ = −λψ` (inward derivative) on every end.
    Robin { lambda: f64 },
    /// Continuity and sum of inward derivatives `= α ψ(v)`.
    Delta { alpha: f64 },
}

impl Shorthand {
    pub fn block(self, d: usize) -> (CMat, CMat) {
        let one = CMat::identity(d, d);
        let zero = CMat::zeros(d, d);
        let avg = CMat::from_element(d, d, C64::new(1.0 / d.max(1) as f64, 0.0));
        match self {
            Shorthand::Dirichlet => (one, zero),
            Shorthand::Neumann => (zero.clone(), zero),
            Shorthand::Robin { lambda } => (zero, one * C64::new(lambda, 0.0)),
            Shorthand::Kirchhoff => (one - avg, zero),
            Shorthand::Delta { alpha } => (&one - &avg, avg * C64::new(-alpha / d.max(1) as f64, 0.0)),
        }
    }
}

/// Rank tolerance overrides; unset fields keep the library defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolParams {
    pub rel: Option<f64>,
    pub abs: Option<f64>,
}

impl TolParams {
    pub fn rank_tol(&self) -> RankTol {
        let d = RankTol::default();
        RankTol {
            rel: self.rel.unwrap_or(d.rel),
            abs: self.abs.unwrap_or(d.abs),
        }
    }
}

/// Command parameters that may live in the document. Command-line flags
/// take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub k_max: Option<f64>,
    pub grid: Option<f64>,
    pub kappa_max: Option<f64>,
    pub new_lengths: Option<Vec<f64>>,
    #[serde(default)]
    pub rank_tol: TolParams,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub graph: MetricGraph,
    pub conditions: VertexConditions,
    pub params: Params,
}

fn matrix(raw: &RawMatrix, path: &str) -> Result<CMat, CliError> {
    let rows = raw.len();
    for (i, row) in raw.iter().enumerate() {
        if row.len() != rows {
            return Err(CliError::schema(
                format!("{path}[{i}]"),
                format!("expected {rows} entries (square matrix), found {}", row.len()),
            ));
        }
    }
    Ok(CMat::from_fn(rows, rows, |i, j| C64::new(raw[i][j][0], raw[i][j][1])))
}

fn block(raw: &RawBlock, idx: usize, graph: &MetricGraph) -> Result<VertexBlock, CliError> {
    let path = format!("conditions.per_vertex[{idx}]");
    let (p, l) = match (&raw.p, &raw.l, raw.condition) {
        (Some(p), Some(l), None) => (matrix(p, &format!("{path}.P"))?, matrix(l, &format!("{path}.L"))?),
        (None, None, Some(s)) => {
            let v = graph
                .vertex_index(&raw.vertex)
                .ok_or_else(|| CliError::schema(format!("{path}.vertex"), format!("unknown vertex `{}`", raw.vertex)))?;
            s.block(graph.degree(v))
        }
        _ => {
            return Err(CliError::schema(
                path,
                "give either both `P` and `L` or a `condition` shorthand".into(),
            ))
        }
    };
    Ok(VertexBlock {
        vertex: raw.vertex.clone(),
        p,
        l,
    })
}

/// Parses and validates a JSON run configuration.
pub fn parse_config(document: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::schema(path, e.into_inner().to_string())
    })?;
    let graph = MetricGraph::new(&raw.graph).map_err(|e| CliError::invalid("graph", e))?;
    let tol = raw.params.rank_tol.rank_tol();
    let conditions = match &raw.conditions {
        RawConditions::Global { p, l } => {
            let (p, l) = (matrix(p, "conditions.global.P")?, matrix(l, "conditions.global.L")?);
            if p.nrows() != graph.dim() {
                return Err(CliError::schema(
                    "conditions.global.P".into(),
                    format!("expected a {0}×{0} matrix for this graph, found {1}×{1}", graph.dim(), p.nrows()),
                ));
            }
            VertexConditions::validate_with(p, l, tol).map_err(|e| CliError::invalid("conditions.global", e))?
        }
        RawConditions::PerVertex(blocks) => {
            let blocks = blocks
                .iter()
                .enumerate()
                .map(|(i, b)| block(b, i, &graph))
                .collect::<Result<Vec<_>, _>>()?;
            VertexConditions::from_vertex_blocks_with(&graph, &blocks, tol)
                .map_err(|e| CliError::invalid("conditions.per_vertex", e))?
        }
        RawConditions::Uniform(s) => {
            let blocks: Vec<VertexBlock> = graph
                .vertices()
                .iter()
                .enumerate()
                .map(|(v, name)| {
                    let (p, l) = s.block(graph.degree(v));
                    VertexBlock {
                        vertex: name.clone(),
                        p,
                        l,
                    }
                })
                .collect();
            VertexConditions::from_vertex_blocks_with(&graph, &blocks, tol)
                .map_err(|e| CliError::invalid("conditions.uniform", e))?
        }
    };
    Ok(RunConfig {
        graph,
        conditions,
        params: raw.params,
    })
}
