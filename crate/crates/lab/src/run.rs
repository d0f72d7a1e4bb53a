//! Batch execution of scenarios.

use aoi_core::closed_form::lower_bound;
use aoi_core::sim::{replication_seed, run_replications, ReplicationSummary};
use aoi_core::{PolicySpec, SourceParams};
use rayon::prelude::*;

use crate::config::Scenario;
use crate::error::Result;

/// Replicated simulation of one policy on one scenario.
#[derive(Debug, Clone)]
pub struct PolicyResult {
    pub scenario: String,
    pub policy: String,
    pub spec: PolicySpec,
    pub params: Vec<SourceParams>,
    pub lower_bound: f64,
    pub horizon: u64,
    /// Episode seed of each replication.
    pub seeds: Vec<u64>,
    pub summary: ReplicationSummary,
}

impl PolicyResult {
    pub fn ratio_to_bound(&self) -> f64 {
        self.summary.ewsaoi_mean / self.lower_bound
    }
}

/// Runs every `(scenario, policy)` pair. Pairs run in parallel; results come
/// back in scenario order, then policy order.
pub fn run_scenarios(scenarios: &[Scenario]) -> Result<Vec<PolicyResult>> {
    let jobs: Vec<(usize, String, PolicySpec)> = scenarios
        .par_iter()
        .enumerate()
        .map(|(k, s)| -> Result<Vec<_>> {
            Ok(s.resolved_policies()?.into_iter().map(|(label, spec)| (k, label, spec)).collect())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    jobs.into_par_iter()
        .map(|(k, label, spec)| run_one(&scenarios[k], label, spec))
        .collect()
}

pub fn run_one(scenario: &Scenario, policy: String, spec: PolicySpec) -> Result<PolicyResult> {
    log::info!("running {} / {policy}", scenario.id);
    let summary = run_replications(&scenario.params, &spec, &scenario.sim)?;
    Ok(PolicyResult {
        scenario: scenario.id.clone(),
        policy,
        params: scenario.params.clone(),
        lower_bound: lower_bound(&scenario.params)?,
        horizon: scenario.sim.horizon,
        seeds: (0..scenario.sim.replications).map(|r| replication_seed(scenario.sim.seed, r)).collect(),
        spec,
        summary,
    })
}
