//! Self-validation suite.
//!
//! Every check builds its own oracle (closed forms, grid searches, exact
//! chains) and simulation results are shared between checks through a cache,
//! so the reliability grid is simulated once.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use aoi_core::closed_form::{
    lower_bound, nsrp_ewsaoi, nsrp_moments, optimal_srp, optimal_srp_ewsaoi, rho_srp, srp_ewsaoi,
};
use aoi_core::optimize::{optimize_nsrp_report, OptimizerSettings};
use aoi_core::policy::{mw_default_config, MwConstants};
use aoi_core::sim::{reconstruct_prop1, run_episode, run_replications};
use aoi_core::{PolicySpec, SimConfig, SourceParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Scenario;
use crate::error::Result;
use crate::report::cmd_table1;
use crate::run::{run_one, PolicyResult};
use crate::scenarios::{fig3_at, fig3_p_values, fig4_at, fig4_l_values, fig5_alpha_values, fig5_at};

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} ({:.1} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "periodic two-source schedules"),
    (2, "SRP closed form vs simulation"),
    (3, "NSRP moments and EWSAoI vs simulation"),
    (4, "lower-bound dominance on the reliability grid"),
    (5, "optimal-SRP sandwich on random networks"),
    (6, "NSRP not worse than SRP on symmetric networks"),
    (7, "Max-Weight vs optimal SRP and NSRP"),
    (8, "Max-Weight vs MWL1"),
    (9, "Max-Weight throughput targets"),
    (10, "Max-Weight index ordering"),
    (11, "cycle reconstruction of the average age"),
    (12, "NSRP optimizer vs grid search"),
];

fn sp(items: &[(f64, f64, u32)]) -> Vec<SourceParams> {
    items.iter().map(|&(a, p, l)| SourceParams::new(a, p, l).expect("valid built-in parameters")).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Runs checks and memoizes grid simulations.
#[derive(Default)]
pub struct Suite {
    cache: Mutex<HashMap<(String, String), Arc<PolicyResult>>>,
}

impl Suite {
    pub fn new() -> Self {
        Self::default()
    }

    /// Replicated result of the standard policy `label` on `scenario`.
    fn result(&self, scenario: &Scenario, label: &str) -> Result<Arc<PolicyResult>> {
        let key = (scenario.id.clone(), label.to_string());
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let policy = scenario
            .policies
            .iter()
            .find(|p| p.label() == label)
            .unwrap_or_else(|| panic!("scenario {} has no policy {label}", scenario.id));
        let spec = policy.resolve(&scenario.params)?;
        let result = Arc::new(run_one(scenario, label.to_string(), spec)?);
        self.cache.lock().expect("cache lock").insert(key, result.clone());
        Ok(result)
    }

    /// Runs one criterion; internal errors count as failure.
    pub fn run(&self, id: u8) -> Outcome {
        let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
        let start = Instant::now();
        let result = match id {
            1 => self.table1(),
            2 => self.srp_closed_form(),
            3 => self.nsrp_validation(),
            4 => self.lower_bound_dominance(),
            5 => self.srp_sandwich(),
            6 => self.symmetric_nsrp(),
            7 => self.mw_dominance(),
            8 => self.mw_vs_mwl1(),
            9 => self.mw_throughput(),
            10 => self.mw_ordering(),
            11 => self.reconstruction(),
            12 => self.optimizer_oracle(),
            _ => Ok((false, format!("no criterion {id}"))),
        };
        let seconds = start.elapsed().as_secs_f64();
        let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
        Outcome { id, name, passed, detail, seconds }
    }

    pub fn run_all(&self) -> Vec<Outcome> {
        CRITERIA.iter().map(|&(id, _)| self.run(id)).collect()
    }

    fn table1(&self) -> Result<(bool, String)> {
        let start = Instant::now();
        let rows = cmd_table1()?;
        let secs = start.elapsed().as_secs_f64();
        let values: Vec<String> =
            rows.iter().map(|r| format!("{} {:.2} (ref {})", r.schedule, r.measured, r.reference)).collect();
        let ok = rows.iter().all(|r| r.pass) && secs < 5.0;
        Ok((ok, format!("{}; {secs:.2} s", values.join(", "))))
    }

    fn srp_closed_form(&self) -> Result<(bool, String)> {
        let start = Instant::now();
        let configs = [
            ("single", sp(&[(1.0, 0.5, 1)])),
            ("symmetric", sp(&[(1.0, 0.5, 2), (1.0, 0.5, 2)])),
            ("asymmetric", sp(&[(1.0, 0.5, 30), (10.0, 0.5, 2)])),
        ];
        let mut ok = true;
        let mut parts = Vec::new();
        for (name, params) in configs {
            let mu = optimal_srp(&params)?;
            let predicted = srp_ewsaoi(&params, &mu)?;
            let sim = SimConfig { replications: 5, ..SimConfig::new(2_000_000, 21) };
            let measured = run_replications(&params, &PolicySpec::Srp { mu }, &sim)?.ewsaoi_mean;
            let err = rel(measured, predicted);
            ok &= err <= 0.01;
            parts.push(format!("{name} {measured:.4} vs {predicted:.4} ({:.3}%)", 100.0 * err));
        }
        let secs = start.elapsed().as_secs_f64();
        ok &= secs < 120.0;
        Ok((ok, parts.join(", ")))
    }

    fn nsrp_validation(&self) -> Result<(bool, String)> {
        let mut ok = true;
        let mut parts = Vec::new();
        let sym = sp(&[(1.0, 0.5, 2), (1.0, 0.5, 2)]);
        let asym = sp(&[(1.0, 0.5, 30), (10.0, 0.5, 2)]);
        let asym_mu = optimize_nsrp_report(&asym, &OptimizerSettings::default())?.mu;
        for (name, params, mu) in [("symmetric", sym, vec![0.5, 0.5]), ("asymmetric", asym, asym_mu)] {
            let predicted = nsrp_ewsaoi(&params, &mu, true)?;
            let sim = SimConfig { replications: 5, ..SimConfig::new(2_000_000, 31) };
            let summary = run_replications(&params, &PolicySpec::Nsrp { mu: mu.clone() }, &sim)?;
            let cycles = summary.pooled_cycles();
            let mut worst: f64 = 0.0;
            for (i, c) in cycles.iter().enumerate() {
                let m = nsrp_moments(&params, &mu, i)?;
                worst = worst.max(rel(c.mean_w(), m.e_w)).max(rel(c.mean_w2(), m.e_w2));
                if m.e_s2 > 0.0 {
                    worst = worst.max(rel(c.mean_s2(), m.e_s2));
                }
            }
            let err = rel(summary.ewsaoi_mean, predicted);
            ok &= worst <= 0.02 && err <= 0.02;
            parts.push(format!(
                "{name}: EWSAoI {:.4} vs {predicted:.4} ({:.2}%), worst moment error {:.2}%",
                summary.ewsaoi_mean,
                100.0 * err,
                100.0 * worst
            ));
        }
        let one = sp(&[(1.0, 1.0, 1)]);
        let measured = run_episode(&one, &PolicySpec::Nsrp { mu: vec![1.0] }, &SimConfig::new(100_000, 1))?.ewsaoi;
        let printed = nsrp_ewsaoi(&one, &[1.0], false)?;
        let corrected = nsrp_ewsaoi(&one, &[1.0], true)?;
        let differs = (measured - printed).abs() > 0.25 && (measured - corrected).abs() < 1e-9;
        ok &= differs;
        parts.push(format!("single source: simulated {measured}, corrected {corrected}, uncorrected {printed}"));
        Ok((ok, parts.join("; ")))
    }

    fn fig3_grid(&self) -> Vec<Scenario> {
        fig3_p_values().into_iter().map(fig3_at).collect()
    }

    fn lower_bound_dominance(&self) -> Result<(bool, String)> {
        let mut cells = 0;
        let mut bad = Vec::new();
        let mut min_ratio = f64::INFINITY;
        for s in self.fig3_grid() {
            let lb = lower_bound(&s.params)?;
            for policy in &s.policies {
                let r = self.result(&s, &policy.label())?;
                cells += 1;
                let upper = r.summary.ewsaoi_mean + 3.0 * r.summary.ewsaoi_stderr;
                min_ratio = min_ratio.min(r.summary.ewsaoi_mean / lb);
                if !(upper >= lb) {
                    bad.push(format!("{}/{}", s.id, r.policy));
                }
            }
        }
        Ok((
            bad.is_empty(),
            format!("{} of {cells} cells dominate the bound; smallest ratio {min_ratio:.3}; violations {bad:?}", cells - bad.len()),
        ))
    }

    fn srp_sandwich(&self) -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut bad = 0;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..100 {
            let n = rng.gen_range(1..=20);
            let params: Vec<SourceParams> = (0..n)
                .map(|_| {
                    SourceParams::new(rng.gen_range(0.1..10.0), rng.gen_range(0.05..=1.0), rng.gen_range(1..=100))
                })
                .collect::<aoi_core::Result<_>>()?;
            let lb = lower_bound(&params)?;
            let value = srp_ewsaoi(&params, &optimal_srp(&params)?)?;
            let rho = rho_srp(&params)?;
            lo = lo.min(rho);
            hi = hi.max(rho);
            if !(lb <= value && value <= rho * lb * (1.0 + 1e-12) && rho > 1.0 && rho < 3.0) {
                bad += 1;
            }
        }
        Ok((bad == 0, format!("100 configs, {bad} violations, ratio range [{lo:.4}, {hi:.4}]")))
    }

    fn symmetric_nsrp(&self) -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut bad = 0;
        let mut max_gain: f64 = 0.0;
        for _ in 0..50 {
            let n = rng.gen_range(1..=20);
            let s = SourceParams::new(rng.gen_range(0.1..10.0), rng.gen_range(0.05..=1.0), rng.gen_range(1..=100))?;
            let params = vec![s; n];
            let ns = nsrp_ewsaoi(&params, &vec![1.0 / n as f64; n], true)?;
            let srp = optimal_srp_ewsaoi(&params)?;
            max_gain = max_gain.max(1.0 - ns / srp);
            if ns > srp * (1.0 + 1e-12) {
                bad += 1;
            }
        }
        Ok((bad == 0, format!("50 configs, {bad} violations, largest NSRP gain {:.2}%", 100.0 * max_gain)))
    }

    /// Every second point of the three two-class grids.
    fn desk_grids(&self) -> Vec<Scenario> {
        let mut v: Vec<Scenario> = fig3_p_values().into_iter().step_by(2).map(fig3_at).collect();
        v.extend(fig4_l_values().into_iter().step_by(2).map(fig4_at));
        v.extend(fig5_alpha_values().into_iter().step_by(2).map(fig5_at));
        v
    }

    fn mw_dominance(&self) -> Result<(bool, String)> {
        let mut cells = 0;
        let mut bad = Vec::new();
        for s in self.desk_grids() {
            let mw = self.result(&s, "max_weight")?;
            let (m, c) = (mw.summary.ewsaoi_mean, mw.summary.ewsaoi_ci95);
            for other in ["optimal_srp", "optimal_nsrp"] {
                let r = self.result(&s, other)?;
                cells += 1;
                if m - c > r.summary.ewsaoi_mean + r.summary.ewsaoi_ci95 {
                    bad.push(format!("{} {m:.1} > {other} {:.1}", s.id, r.summary.ewsaoi_mean));
                }
            }
        }
        let shown: Vec<&String> = bad.iter().take(4).collect();
        Ok((bad.is_empty(), format!("{} of {cells} comparisons hold; e.g. {shown:?}", cells - bad.len())))
    }

    fn mw_vs_mwl1(&self) -> Result<(bool, String)> {
        let s = fig3_at(0.4);
        let mw = self.result(&s, "max_weight")?.summary.ewsaoi_mean;
        let mwl1 = self.result(&s, "mwl1")?.summary.ewsaoi_mean;
        let gain = 1.0 - mw / mwl1;
        Ok((gain >= 0.2, format!("Max-Weight {mw:.2}, MWL1 {mwl1:.2}, improvement {:.1}% (need 20%)", 100.0 * gain)))
    }

    fn mw_throughput(&self) -> Result<(bool, String)> {
        let mut bad = Vec::new();
        for s in self.fig3_grid() {
            let r = self.result(&s, "max_weight")?;
            let PolicySpec::MaxWeight(spec) = &r.spec else { unreachable!("max_weight label") };
            for (i, q_bar) in spec.q_bar.iter().enumerate() {
                let q = r.summary.throughput[i];
                if q < q_bar - 3.0 * r.summary.throughput_stderr[i] {
                    bad.push(format!("{} source {}: {q:.4} < {q_bar:.4}", s.id, i + 1));
                }
            }
        }
        let shown: Vec<&String> = bad.iter().take(3).collect();
        Ok((bad.is_empty(), format!("{} source targets missed; e.g. {shown:?}", bad.len())))
    }

    fn mw_ordering(&self) -> Result<(bool, String)> {
        let params = sp(&[(1.0, 0.6, 1), (2.0, 0.8, 3), (1.0, 0.5, 8), (3.0, 0.9, 2), (1.0, 0.7, 20)]);
        let spec = PolicySpec::MaxWeight(mw_default_config(&params, MwConstants::WithLength)?);
        let m = run_episode(&params, &spec, &SimConfig::new(1_000_000, 41))?;
        Ok((
            m.mw_order_violations == 0 && m.mw_updates_checked > 0,
            format!("{} violations over {} multi-packet updates", m.mw_order_violations, m.mw_updates_checked),
        ))
    }

    fn reconstruction(&self) -> Result<(bool, String)> {
        let params = sp(&[(2.0, 0.8, 3), (1.0, 0.5, 1), (3.0, 0.6, 5), (1.0, 0.9, 8)]);
        let scenario = Scenario {
            id: "reference".into(),
            params: params.clone(),
            policies: crate::config::PolicyConfig::standard_set(),
            sim: SimConfig::new(1_000_000, 51),
            sweep: None,
        };
        let mut worst: f64 = 0.0;
        let mut parts = Vec::new();
        for (label, spec) in scenario.resolved_policies()? {
            let m = run_episode(&params, &spec, &scenario.sim)?;
            let rebuilt = reconstruct_prop1(&m.cycles, &params)?;
            let err = rel(rebuilt, m.ewsaoi);
            worst = worst.max(err);
            parts.push(format!("{label} {:.3}%", 100.0 * err));
        }
        Ok((worst <= 0.005, parts.join(", ")))
    }

    fn optimizer_oracle(&self) -> Result<(bool, String)> {
        let configs = [
            sp(&[(1.0, 0.5, 30), (10.0, 0.5, 2)]),
            sp(&[(1.0, 0.9, 5), (3.0, 0.3, 12)]),
            sp(&[(2.0, 0.2, 1), (1.0, 1.0, 40)]),
        ];
        let mut ok = true;
        let mut parts = Vec::new();
        for params in configs {
            let report = optimize_nsrp_report(&params, &OptimizerSettings::default())?;
            let (mut best_mu, mut best) = (0.0, f64::INFINITY);
            for k in 10..=9990 {
                let m = k as f64 * 1e-4;
                let f = nsrp_ewsaoi(&params, &[m, 1.0 - m], true)?;
                if f < best {
                    (best_mu, best) = (m, f);
                }
            }
            let dmu = (report.mu[0] - best_mu).abs();
            let dobj = rel(report.objective, best);
            ok &= dmu <= 1e-3 && dobj <= 1e-6;
            parts.push(format!("mu1 {:.5} vs {best_mu:.4}, objective gap {dobj:.1e}", report.mu[0]));
        }
        Ok((ok, parts.join("; ")))
    }
}

#[derive(Serialize)]
struct FailureList<'a> {
    failed: Vec<&'a Outcome>,
}

/// Machine-readable list of the failed criteria.
pub fn failure_json(outcomes: &[Outcome]) -> String {
    let failed = outcomes.iter().filter(|o| !o.passed).collect();
    serde_json::to_string(&FailureList { failed }).expect("outcomes serialize")
}
