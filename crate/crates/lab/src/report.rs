//! CSV output and text reports.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use aoi_core::closed_form::{bound_report, nsrp_ewsaoi, srp_ewsaoi, BoundReport};
use aoi_core::policy::{mw_default_config, table1_schedules, MwConstants};
use aoi_core::sim::run_episode;
use aoi_core::{GenerationMode, PolicySpec, SimConfig, SourceParams};

use crate::config::Scenario;
use crate::error::{LabError, Result};
use crate::run::PolicyResult;

pub const PER_SOURCE_HEADER: [&str; 11] =
    ["scenario", "policy", "seed", "T", "source", "alpha", "p", "L", "mean_h", "throughput", "updates"];
pub const SUMMARY_HEADER: [&str; 6] =
    ["scenario", "policy", "ewsaoi_mean", "ewsaoi_ci95", "lower_bound", "ratio_to_bound"];

/// Writes `per_source.csv` (one row per replication and source, sources
/// numbered from 1) and `summary.csv` (one row per scenario and policy).
pub fn emit_csv(results: &[PolicyResult], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let per_source_path = dir.join("per_source.csv");
    let summary_path = dir.join("summary.csv");

    let mut w = csv::Writer::from_path(&per_source_path)?;
    w.write_record(PER_SOURCE_HEADER)?;
    for r in results {
        for (ep, seed) in r.summary.episodes.iter().zip(&r.seeds) {
            for (i, p) in r.params.iter().enumerate() {
                w.write_record([
                    r.scenario.clone(),
                    r.policy.clone(),
                    seed.to_string(),
                    r.horizon.to_string(),
                    (i + 1).to_string(),
                    p.alpha.to_string(),
                    p.p.to_string(),
                    p.len.to_string(),
                    ep.mean_h[i].to_string(),
                    ep.throughput[i].to_string(),
                    ep.updates[i].to_string(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| LabError::io(&per_source_path, e))?;

    let mut w = csv::Writer::from_path(&summary_path)?;
    w.write_record(SUMMARY_HEADER)?;
    for r in results {
        w.write_record([
            r.scenario.clone(),
            r.policy.clone(),
            r.summary.ewsaoi_mean.to_string(),
            r.summary.ewsaoi_ci95.to_string(),
            r.lower_bound.to_string(),
            r.ratio_to_bound().to_string(),
        ])?;
    }
    w.flush().map_err(|e| LabError::io(&summary_path, e))?;
    Ok(())
}

/// Closed-form value of a policy, where one exists.
pub fn closed_form_value(params: &[SourceParams], spec: &PolicySpec) -> aoi_core::Result<Option<f64>> {
    Ok(match spec {
        PolicySpec::Srp { mu } => Some(srp_ewsaoi(params, mu)?),
        PolicySpec::Nsrp { mu } => Some(nsrp_ewsaoi(params, mu, true)?),
        _ => None,
    })
}

#[derive(Debug, Clone)]
pub struct AnalyzeEntry {
    pub scenario: String,
    pub bounds: BoundReport,
    /// `(policy label, closed-form EWSAoI or None when simulation-only)`.
    pub policies: Vec<(String, Option<f64>)>,
}

/// Bound report per scenario plus the closed-form EWSAoI of every policy
/// that has one. `rho_mw` uses the scenario's Max-Weight targets when the
/// scenario has a Max-Weight policy, the defaults otherwise.
pub fn cmd_analyze(scenarios: &[Scenario]) -> Result<Vec<AnalyzeEntry>> {
    let mut out = Vec::new();
    for s in scenarios {
        let policies = s.resolved_policies()?;
        let q_bar = policies
            .iter()
            .find_map(|(_, p)| match p {
                PolicySpec::MaxWeight(mw) => Some(mw.q_bar.clone()),
                _ => None,
            })
            .map_or_else(|| mw_default_config(&s.params, MwConstants::WithLength).map(|m| m.q_bar), Ok)?;
        let bounds = bound_report(&s.params, &q_bar)?;
        let mut rows = Vec::new();
        for (label, spec) in &policies {
            rows.push((label.clone(), closed_form_value(&s.params, spec)?));
        }
        out.push(AnalyzeEntry { scenario: s.id.clone(), bounds, policies: rows });
    }
    Ok(out)
}

pub fn format_analyze(entries: &[AnalyzeEntry]) -> String {
    let mut s = String::new();
    for e in entries {
        let b = &e.bounds;
        let _ = writeln!(s, "scenario {}", e.scenario);
        let _ = writeln!(s, "  lower bound        {:.6}", b.lower_bound);
        let _ = writeln!(s, "  rho (optimal SRP)  {:.6}", b.rho_s);
        let _ = writeln!(s, "  rho (Max-Weight)   {:.6}  (psi = {:.6e})", b.rho_mw, b.psi);
        let q: Vec<String> = b.q_lb.iter().map(|q| format!("{q:.6}")).collect();
        let _ = writeln!(s, "  q_lb               [{}]", q.join(", "));
        for (label, value) in &e.policies {
            match value {
                Some(v) => {
                    let _ = writeln!(s, "  {label:<18} {v:.6}  [closed form, x{:.4} bound]", v / b.lower_bound);
                }
                None => {
                    let _ = writeln!(s, "  {label:<18} simulation-only");
                }
            }
        }
    }
    s
}

pub fn format_summary(results: &[PolicyResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<22} {:<14} {:>12} {:>10} {:>12} {:>8}", "scenario", "policy", "ewsaoi", "ci95", "bound", "ratio");
    for r in results {
        let _ = writeln!(
            s,
            "{:<22} {:<14} {:>12.4} {:>10.4} {:>12.4} {:>8.4}  [simulated]",
            r.scenario,
            r.policy,
            r.summary.ewsaoi_mean,
            r.summary.ewsaoi_ci95,
            r.lower_bound,
            r.ratio_to_bound()
        );
    }
    s
}

/// Reference averages for the four periodic schedules.
pub const TABLE1_REFERENCE: [f64; 4] = [154.0, 118.0, 99.0, 153.25];
pub const TABLE1_TOLERANCE: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub schedule: &'static str,
    pub period: u64,
    pub horizon: u64,
    pub measured: f64,
    pub reference: f64,
    pub pass: bool,
}

/// Horizon and warm-up for a periodic schedule: at least `1020` periods and
/// `1e5` slots, rounded up to whole periods, with twenty periods of warm-up.
pub fn table1_horizon(period: u64) -> (u64, u64) {
    let min = (1020 * period).max(100_000);
    (min.div_ceil(period) * period, 20 * period)
}

/// Runs the four schedules on `L = (100, 2)`, `p = (1, 1)`, `alpha = (1, 1)`
/// with updates held until delivery.
pub fn cmd_table1() -> Result<Vec<Table1Row>> {
    let params = vec![SourceParams::new(1.0, 1.0, 100)?, SourceParams::new(1.0, 1.0, 2)?];
    let mut rows = Vec::new();
    for ((name, spec), reference) in table1_schedules(100, 2)?.into_iter().zip(TABLE1_REFERENCE) {
        let period = match &spec {
            PolicySpec::FixedSchedule { assignment } => assignment.len() as u64,
            _ => unreachable!("table schedules are periodic"),
        };
        let (horizon, warmup) = table1_horizon(period);
        let sim = SimConfig {
            horizon,
            warmup,
            mode: GenerationMode::HoldUntilDelivery,
            ..SimConfig::new(horizon, 1)
        };
        let measured = run_episode(&params, &spec, &sim)?.ewsaoi;
        rows.push(Table1Row {
            schedule: name,
            period,
            horizon,
            measured,
            reference,
            pass: (measured - reference).abs() <= TABLE1_TOLERANCE,
        });
    }
    Ok(rows)
}

pub fn format_table1(rows: &[Table1Row]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<14} {:>6} {:>8} {:>10} {:>10}  result", "schedule", "period", "T", "measured", "reference");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<14} {:>6} {:>8} {:>10.3} {:>10.2}  {}",
            r.schedule,
            r.period,
            r.horizon,
            r.measured,
            r.reference,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    s
}
