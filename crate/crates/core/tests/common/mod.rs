//! Instance populations shared by the integration tests.

#![allow(dead_code)]

use qgraph_core::campaign::{self, instance_rng};
use qgraph_core::random::{random_instance, GraphParams, Instance, Topology};
use qgraph_core::spectral::{tau_max, TAU_MARGIN};

const BATCH: usize = 256;
const MAX_DRAWS: usize = 1 << 20;

/// First `want` instances (by stream index) satisfying `keep`.
pub fn collect<F>(seed: u64, want: usize, params: &GraphParams, keep: F) -> Vec<Instance>
where
    F: Fn(&Instance) -> bool + Sync + Send,
{
    let mut out = Vec::with_capacity(want);
    let mut start = 0;
    while out.len() < want && start < MAX_DRAWS {
        let idx: Vec<usize> = (start..start + BATCH).collect();
        let batch = campaign::map(&idx, |&i| {
            let inst = random_instance(&mut instance_rng(seed, i), params);
            keep(&inst).then_some(inst)
        });
        out.extend(batch.into_iter().flatten());
        start += BATCH;
    }
    out.truncate(want);
    assert_eq!(out.len(), want, "population exhausted");
    out
}

pub fn all(seed: u64, count: usize, params: &GraphParams) -> Vec<Instance> {
    collect(seed, count, params, |_| true)
}

pub fn small_tau(inst: &Instance) -> bool {
    tau_max(&inst.graph, &inst.vc).is_ok_and(|t| t < 1.0 - TAU_MARGIN)
}

pub fn compact() -> GraphParams {
    GraphParams::default().with_topology(Topology::Compact)
}

pub fn non_compact() -> GraphParams {
    GraphParams::default().with_topology(Topology::NonCompact)
}
