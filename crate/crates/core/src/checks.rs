//! Identity checks on a single `(graph, conditions)` instance and seeded
//! campaigns over random instances.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::campaign;
use crate::compactify::{compactify, default_new_lengths, gamma_and_theorem300, trace_identity_sq, Flavor};
use crate::conditions::VertexConditions;
use crate::error::Result;
use crate::graph::MetricGraph;
use crate::index::{dirac_index, dirac_square_conditions_check};
use crate::linalg::{identity, max_abs, C64};
use crate::random::{random_instance, GraphParams};
use crate::spectral::{
    algebraic_n, algebraic_ntilde, multiplicity_report, ntilde_from_subspaces, tau_max,
    zero_modes_direct, zero_modes_fast, zero_modes_lemma119, TAU_MARGIN,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub identity: &'static str,
    pub outcome: Outcome,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    fn compare(identity: &'static str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let residual = lhs - rhs;
        Self {
            identity,
            outcome: if residual.abs() <= tol { Outcome::Pass } else { Outcome::Fail },
            lhs,
            rhs,
            residual,
            detail: None,
        }
    }

    fn skip(identity: &'static str, why: &str) -> Self {
        Self {
            identity,
            outcome: Outcome::Skip,
            lhs: 0.0,
            rhs: 0.0,
            residual: 0.0,
            detail: Some(why.to_string()),
        }
    }

    fn from_result(identity: &'static str, r: Result<CheckRecord>) -> Self {
        r.unwrap_or_else(|e| Self {
            identity,
            outcome: Outcome::Error,
            lhs: f64::NAN,
            rhs: f64::NAN,
            residual: f64::NAN,
            detail: Some(e.to_string()),
        })
    }

    fn with_detail(mut self, d: String) -> Self {
        self.detail = Some(d);
        self
    }
}

pub const IDENTITIES: [&str; 9] = [
    "s_matrix_unitarity",
    "ntilde_subspaces",
    "dirac_square",
    "index_theorem",
    "trace_identity_sq",
    "zero_mode_oracles",
    "n_equals_ntilde",
    "gamma_identity",
    "gamma_index",
];

/// Runs every identity on one instance. `k` is a real wavenumber for the
/// unitarity check.
pub fn check_instance(graph: &MetricGraph, vc: &VertexConditions, k: f64) -> Vec<CheckRecord> {
    let mut out = Vec::with_capacity(IDENTITIES.len());
    out.push(CheckRecord::from_result("s_matrix_unitarity", (|| {
        let s = vc.s_matrix(C64::new(k, 0.0))?;
        let d = max_abs(&(&s * s.adjoint() - identity(s.nrows())));
        Ok(CheckRecord::compare("s_matrix_unitarity", d, 0.0, 1e-10))
    })()));
    out.push(CheckRecord::from_result("ntilde_subspaces", (|| {
        Ok(CheckRecord::compare(
            "ntilde_subspaces",
            algebraic_ntilde(graph, vc)? as f64,
            ntilde_from_subspaces(graph, vc)? as f64,
            0.0,
        ))
    })()));
    out.push(CheckRecord::from_result("dirac_square", (|| {
        let c = dirac_square_conditions_check(graph, vc)?;
        Ok(CheckRecord::compare("dirac_square", c.dim_square as f64, c.dim_laplacian as f64, 0.0)
            .with_detail(format!("intersection {}", c.dim_intersection)))
        .map(|mut r| {
            if !c.holds {
                r.outcome = Outcome::Fail;
            }
            r
        })
    })()));
    out.push(if graph.is_compact() {
        CheckRecord::from_result("index_theorem", (|| {
            let r = dirac_index(graph, vc)?;
            Ok(CheckRecord::compare("index_theorem", r.index as f64, r.half_trace_s0, 0.0))
        })())
    } else {
        CheckRecord::skip("index_theorem", "non-compact")
    });
    out.push(CheckRecord::from_result("trace_identity_sq", (|| {
        let (g, q) = if graph.is_compact() {
            (graph.clone(), vc.q().clone())
        } else {
            let c = compactify(graph, vc, Flavor::Dirichlet, &default_new_lengths(graph, vc))?;
            (c.graph_hat, c.vc_hat.q().clone())
        };
        let t = trace_identity_sq(&q, &g)?;
        let worst = if (t.lhs - t.rhs1).abs() >= (t.lhs - t.rhs2).abs() { t.rhs1 } else { t.rhs2 };
        Ok(CheckRecord::compare("trace_identity_sq", t.lhs as f64, worst as f64, 0.0)
            .with_detail(format!("rhs1 {} rhs2 {}", t.rhs1, t.rhs2)))
    })()));

    let tau = tau_max(graph, vc);
    let small_tau = matches!(tau, Ok(t) if t < 1.0 - TAU_MARGIN);
    let tau_note = match &tau {
        Ok(t) => format!("tau_max = {t}"),
        Err(e) => e.to_string(),
    };

    if small_tau {
        out.push(CheckRecord::from_result("zero_mode_oracles", (|| {
            let tol = vc.tol();
            let f = zero_modes_fast(graph, vc)?;
            let d = zero_modes_direct(graph, vc)?;
            let l = zero_modes_lemma119(graph, vc)?;
            let same = f.g0 == d.g0
                && d.g0 == l.g0
                && f.span(tol).same_span(&d.span(tol), tol)?
                && d.span(tol).same_span(&l.span(tol), tol)?
                && d.max_abs_beta() < 1e-9;
            let mut r = CheckRecord::compare("zero_mode_oracles", f.g0 as f64, d.g0 as f64, 0.0)
                .with_detail(format!("lemma119 {} max|beta| {:.3e}", l.g0, d.max_abs_beta()));
            if !same {
                r.outcome = Outcome::Fail;
            }
            Ok(r)
        })()));
        out.push(CheckRecord::from_result("n_equals_ntilde", (|| {
            Ok(CheckRecord::compare(
                "n_equals_ntilde",
                algebraic_n(graph, vc)? as f64,
                algebraic_ntilde(graph, vc)? as f64,
                0.0,
            ))
        })()));
        out.push(CheckRecord::from_result("gamma_identity", (|| {
            let t = gamma_and_theorem300(graph, vc)?;
            Ok(CheckRecord::compare("gamma_identity", t.residual_quarters as f64, 0.0, 0.0))
        })()));
        out.push(if graph.is_compact() {
            CheckRecord::from_result("gamma_index", (|| {
                let m = multiplicity_report(graph, vc)?;
                let i = dirac_index(graph, vc)?;
                Ok(CheckRecord::compare("gamma_index", m.gamma_twice as f64, i.index as f64, 0.0))
            })())
        } else {
            CheckRecord::skip("gamma_index", "non-compact")
        });
    } else {
        for id in ["zero_mode_oracles", "n_equals_ntilde", "gamma_identity", "gamma_index"] {
            out.push(CheckRecord::skip(id, &tau_note));
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Counter {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub error: usize,
}

impl Counter {
    pub fn total(&self) -> usize {
        self.pass + self.fail + self.skip + self.error
    }

    fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Pass => self.pass += 1,
            Outcome::Fail => self.fail += 1,
            Outcome::Skip => self.skip += 1,
            Outcome::Error => self.error += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceFailure {
    pub instance: usize,
    pub vertices: usize,
    pub internal_edges: usize,
    pub external_edges: usize,
    pub record: CheckRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub seed: u64,
    pub instances: usize,
    pub params: GraphParams,
    pub counters: BTreeMap<String, Counter>,
    pub failures: Vec<InstanceFailure>,
}

impl CampaignSummary {
    /// Failures and errors both count against the campaign.
    pub fn all_passed(&self) -> bool {
        self.counters.values().all(|c| c.fail == 0 && c.error == 0)
    }
}

/// Seeded campaign; each instance is checked independently and problems are
/// recorded rather than aborting the run.
pub fn run_campaign(seed: u64, instances: usize, params: &GraphParams) -> CampaignSummary {
    let results = campaign::run(seed, instances, |_, rng| {
        let inst = random_instance(rng, params);
        let k = rng.random_range(0.1..50.0);
        let recs = check_instance(&inst.graph, &inst.vc, k);
        (
            inst.graph.vertices().len(),
            inst.graph.n_internal(),
            inst.graph.n_external(),
            recs,
        )
    });
    let mut counters: BTreeMap<String, Counter> =
        IDENTITIES.iter().map(|id| (id.to_string(), Counter::default())).collect();
    let mut failures = Vec::new();
    for (i, (nv, ni, ne, recs)) in results.into_iter().enumerate() {
        for r in recs {
            counters.entry(r.identity.to_string()).or_default().add(r.outcome);
            if matches!(r.outcome, Outcome::Fail | Outcome::Error) {
                failures.push(InstanceFailure {
                    instance: i,
                    vertices: nv,
                    internal_edges: ni,
                    external_edges: ne,
                    record: r,
                });
            }
        }
    }
    CampaignSummary {
        seed,
        instances,
        params: *params,
        counters,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_pass_every_identity() {
        let g = MetricGraph::interval(1.0).unwrap();
        for vc in [
            VertexConditions::neumann(2),
            VertexConditions::dirichlet(2),
            VertexConditions::robin(2, 1.0),
        ] {
            for r in check_instance(&g, &vc, 1.3) {
                assert!(matches!(r.outcome, Outcome::Pass | Outcome::Skip), "{r:?}");
            }
        }
    }

    #[test]
    fn small_campaign_counters_sum_to_instances() {
        let s = run_campaign(3, 20, &GraphParams::default());
        for c in s.counters.values() {
            assert_eq!(c.total(), 20);
        }
        assert!(s.all_passed(), "{:?}", s.failures);
    }
}
