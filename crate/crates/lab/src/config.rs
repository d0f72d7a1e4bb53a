//! TOML experiment configuration.
//!
//! ```toml
//! [[scenario]]
//! id = "two-class"
//! sources = [
//!   { alpha = 5.0, p = 0.8, L = 2, count = 5 },
//!   { alpha = 1.0, p = 0.4, L = 50, count = 5 },
//! ]
//! policies = [
//!   { kind = "srp" },                  # optimal probabilities
//!   { kind = "nsrp", mu = [0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1] },
//!   { kind = "greedy" },
//!   { kind = "mwl1" },
//!   { kind = "max_weight", constants = "without_length" },
//!   { kind = "fixed", assignment = [1, 2, 0] },   # 1-based sources, 0 = idle
//! ]
//! sim = { horizon = 1000000, warmup = 10000, seed = 7, replications = 5, mode = "refresh" }
//! sweep = { param = "p", values = [0.2, 0.4, 0.6] }  # optional; `sources = [1, 2]` restricts it
//! ```
//!
//! Policies without explicit probabilities are resolved to their optimal
//! design for each materialized parameter set.

use std::collections::HashSet;

use aoi_core::closed_form::optimal_srp;
use aoi_core::optimize::{optimize_nsrp, OptimizerSettings};
use aoi_core::policy::{mw_default_config, MwConstants};
use aoi_core::{Decision, GenerationMode, PolicySpec, SimConfig, SourceParams};
use serde::Deserialize;

use crate::error::{LabError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    scenario: Vec<RawScenario>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: String,
    sources: Vec<RawSource>,
    policies: Vec<PolicyConfig>,
    #[serde(default)]
    sim: RawSim,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    alpha: f64,
    p: f64,
    #[serde(rename = "L")]
    len: i64,
    #[serde(default = "one")]
    count: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    horizon: Option<u64>,
    warmup: Option<u64>,
    seed: Option<u64>,
    replications: Option<usize>,
    mode: Option<ModeName>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModeName {
    Refresh,
    Hold,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    param: String,
    values: Vec<f64>,
    sources: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsName {
    #[default]
    WithLength,
    WithoutLength,
}

/// Policy as written in a config; resolved against concrete parameters by
/// [`PolicyConfig::resolve`].
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyConfig {
    Srp {
        mu: Option<Vec<f64>>,
        label: Option<String>,
    },
    Nsrp {
        mu: Option<Vec<f64>>,
        label: Option<String>,
    },
    Greedy {
        label: Option<String>,
    },
    Mwl1 {
        label: Option<String>,
    },
    MaxWeight {
        #[serde(default)]
        constants: ConstantsName,
        v: Option<f64>,
        weight_by_p: Option<bool>,
        beta: Option<Vec<f64>>,
        gamma: Option<Vec<f64>>,
        q_bar: Option<Vec<f64>>,
        label: Option<String>,
    },
    Fixed {
        assignment: Vec<usize>,
        label: Option<String>,
    },
}

impl PolicyConfig {
    /// Optimal SRP, optimal NSRP, Greedy, MWL1 and default Max-Weight.
    pub fn standard_set() -> Vec<PolicyConfig> {
        vec![
            PolicyConfig::Srp { mu: None, label: None },
            PolicyConfig::Nsrp { mu: None, label: None },
            PolicyConfig::Greedy { label: None },
            PolicyConfig::Mwl1 { label: None },
            PolicyConfig::MaxWeight {
                constants: ConstantsName::WithLength,
                v: None,
                weight_by_p: None,
                beta: None,
                gamma: None,
                q_bar: None,
                label: None,
            },
        ]
    }

    /// Report label: explicit `label`, otherwise derived from the kind.
    pub fn label(&self) -> String {
        let (explicit, default) = match self {
            PolicyConfig::Srp { mu, label } => (label, if mu.is_some() { "srp" } else { "optimal_srp" }),
            PolicyConfig::Nsrp { mu, label } => {
                (label, if mu.is_some() { "nsrp" } else { "optimal_nsrp" })
            }
            PolicyConfig::Greedy { label } => (label, "greedy"),
            PolicyConfig::Mwl1 { label } => (label, "mwl1"),
            PolicyConfig::MaxWeight { label, .. } => (label, "max_weight"),
            PolicyConfig::Fixed { label, .. } => (label, "fixed"),
        };
        explicit.clone().unwrap_or_else(|| default.to_string())
    }

    /// Builds the concrete policy for `params`.
    pub fn resolve(&self, params: &[SourceParams]) -> aoi_core::Result<PolicySpec> {
        let spec = match self {
            PolicyConfig::Srp { mu, .. } => {
                PolicySpec::Srp { mu: mu.clone().map_or_else(|| optimal_srp(params), Ok)? }
            }
            PolicyConfig::Nsrp { mu, .. } => PolicySpec::Nsrp {
                mu: mu.clone().map_or_else(|| optimize_nsrp(params, &OptimizerSettings::default()), Ok)?,
            },
            PolicyConfig::Greedy { .. } => PolicySpec::Greedy,
            PolicyConfig::Mwl1 { .. } => PolicySpec::Mwl1,
            PolicyConfig::MaxWeight { constants, v, weight_by_p, beta, gamma, q_bar, .. } => {
                let constants = match constants {
                    ConstantsName::WithLength => MwConstants::WithLength,
                    ConstantsName::WithoutLength => MwConstants::WithoutLength,
                };
                let mut spec = mw_default_config(params, constants)?;
                if let Some(b) = beta {
                    spec.beta = b.clone();
                }
                if let Some(g) = gamma {
                    spec.gamma = g.clone();
                }
                if let Some(q) = q_bar {
                    spec.q_bar = q.clone();
                }
                if let Some(v) = v {
                    spec.v = *v;
                }
                if let Some(w) = weight_by_p {
                    spec.weight_by_p = *w;
                }
                PolicySpec::MaxWeight(spec)
            }
            PolicyConfig::Fixed { assignment, .. } => PolicySpec::FixedSchedule {
                assignment: assignment
                    .iter()
                    .map(|&k| if k == 0 { Decision::Idle } else { Decision::Transmit(k - 1) })
                    .collect(),
            },
        };
        spec.validate(params.len())?;
        Ok(spec)
    }
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    P,
    Alpha,
    Len,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::P => "p",
            SweepParam::Alpha => "alpha",
            SweepParam::Len => "L",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub value: f64,
}

/// One concrete experiment: a network, the policies to compare and the
/// simulation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub params: Vec<SourceParams>,
    pub policies: Vec<PolicyConfig>,
    pub sim: SimConfig,
    /// Sweep point this instance was materialized from.
    pub sweep: Option<Sweep>,
}

impl Scenario {
    /// Resolves every policy to `(label, spec)` for this parameter set.
    pub fn resolved_policies(&self) -> aoi_core::Result<Vec<(String, PolicySpec)>> {
        self.policies.iter().map(|p| Ok((p.label(), p.resolve(&self.params)?))).collect()
    }
}

/// Overrides applied on top of every scenario's `sim` table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimOverrides {
    pub horizon: Option<u64>,
    pub warmup: Option<u64>,
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub mode: Option<GenerationMode>,
}

impl SimOverrides {
    pub fn apply(&self, sim: &mut SimConfig) {
        if let Some(h) = self.horizon {
            sim.horizon = h;
            if self.warmup.is_none() {
                sim.warmup = h / 100;
            }
        }
        if let Some(w) = self.warmup {
            sim.warmup = w;
        }
        if let Some(s) = self.seed {
            sim.seed = s;
        }
        if let Some(r) = self.replications {
            sim.replications = r;
        }
        if let Some(m) = self.mode {
            sim.mode = m;
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Parses and validates a configuration, materializing sweeps.
pub fn parse_config(text: &str) -> Result<Vec<Scenario>> {
    let file: FileConfig = toml::from_str(text).map_err(|e| LabError::Syntax {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    if file.scenario.is_empty() {
        return Err(LabError::field("scenario", "at least one [[scenario]] is required"));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (k, raw) in file.scenario.into_iter().enumerate() {
        let at = format!("scenario[{k}]");
        if raw.id.trim().is_empty() {
            return Err(LabError::field(format!("{at}.id"), "must not be empty"));
        }
        if !seen.insert(raw.id.clone()) {
            return Err(LabError::field(format!("{at}.id"), format!("duplicate scenario id `{}`", raw.id)));
        }
        out.extend(materialize(&at, raw)?);
    }
    Ok(out)
}

fn build_sources(at: &str, raw: &[RawSource]) -> Result<Vec<SourceParams>> {
    if raw.is_empty() {
        return Err(LabError::field(format!("{at}.sources"), "at least one source is required"));
    }
    let mut params = Vec::new();
    for (j, s) in raw.iter().enumerate() {
        let path = |f: &str| format!("{at}.sources[{j}].{f}");
        if !(s.alpha.is_finite() && s.alpha > 0.0) {
            return Err(LabError::field(path("alpha"), format!("{} must be positive", s.alpha)));
        }
        if !(s.p > 0.0 && s.p <= 1.0) {
            return Err(LabError::field(path("p"), format!("{} must lie in (0, 1]", s.p)));
        }
        if s.len < 1 || s.len > u32::MAX as i64 {
            return Err(LabError::field(path("L"), format!("{} must be a positive integer", s.len)));
        }
        if s.count < 1 {
            return Err(LabError::field(path("count"), "must be at least 1"));
        }
        let sp = SourceParams::new(s.alpha, s.p, s.len as u32)?;
        params.extend(std::iter::repeat_n(sp, s.count));
    }
    Ok(params)
}

fn build_sim(at: &str, raw: &RawSim) -> Result<SimConfig> {
    let horizon = raw.horizon.unwrap_or(1_000_000);
    let sim = SimConfig {
        horizon,
        warmup: raw.warmup.unwrap_or(horizon / 100),
        seed: raw.seed.unwrap_or(1),
        mode: match raw.mode {
            Some(ModeName::Hold) => GenerationMode::HoldUntilDelivery,
            _ => GenerationMode::Refresh,
        },
        replications: raw.replications.unwrap_or(5),
        keep_cycles: false,
    };
    sim.validate().map_err(|e| LabError::field(format!("{at}.sim"), e))?;
    Ok(sim)
}

fn apply_sweep(params: &mut [SourceParams], param: SweepParam, value: f64, targets: &[usize]) {
    for &i in targets {
        match param {
            SweepParam::P => params[i].p = value,
            SweepParam::Alpha => params[i].alpha = value,
            SweepParam::Len => params[i].len = value as u32,
        }
    }
}

fn materialize(at: &str, raw: RawScenario) -> Result<Vec<Scenario>> {
    let params = build_sources(at, &raw.sources)?;
    let sim = build_sim(at, &raw.sim)?;
    if raw.policies.is_empty() {
        return Err(LabError::field(format!("{at}.policies"), "at least one policy is required"));
    }

    let instances: Vec<(String, Vec<SourceParams>, Option<Sweep>)> = match &raw.sweep {
        None => vec![(raw.id.clone(), params.clone(), None)],
        Some(sw) => {
            let param = match sw.param.as_str() {
                "p" => SweepParam::P,
                "alpha" => SweepParam::Alpha,
                "L" => SweepParam::Len,
                other => {
                    return Err(LabError::field(
                        format!("{at}.sweep.param"),
                        format!("unknown parameter `{other}`, expected p, alpha or L"),
                    ))
                }
            };
            if sw.values.is_empty() {
                return Err(LabError::field(format!("{at}.sweep.values"), "must not be empty"));
            }
            let targets: Vec<usize> = match &sw.sources {
                None => (0..params.len()).collect(),
                Some(list) => {
                    let mut t = Vec::new();
                    for &s in list {
                        if s < 1 || s > params.len() {
                            return Err(LabError::field(
                                format!("{at}.sweep.sources"),
                                format!("source {s} outside 1..={}", params.len()),
                            ));
                        }
                        t.push(s - 1);
                    }
                    t
                }
            };
            let mut seen = HashSet::new();
            let mut v = Vec::new();
            for (k, &value) in sw.values.iter().enumerate() {
                let ok = match param {
                    SweepParam::P => value > 0.0 && value <= 1.0,
                    SweepParam::Alpha => value.is_finite() && value > 0.0,
                    SweepParam::Len => value >= 1.0 && value.fract() == 0.0,
                };
                if !ok {
                    return Err(LabError::field(
                        format!("{at}.sweep.values[{k}]"),
                        format!("{value} is not a valid {}", param.name()),
                    ));
                }
                let id = format!("{}/{}={}", raw.id, param.name(), value);
                if !seen.insert(id.clone()) {
                    return Err(LabError::field(format!("{at}.sweep.values[{k}]"), "duplicate sweep value"));
                }
                let mut p = params.clone();
                apply_sweep(&mut p, param, value, &targets);
                v.push((id, p, Some(Sweep { param, value })));
            }
            v
        }
    };

    let mut out = Vec::with_capacity(instances.len());
    for (id, params, sweep) in instances {
        let scenario = Scenario { id, params, policies: raw.policies.clone(), sim: sim.clone(), sweep };
        // Resolve explicit parameters now so bad policies fail at parse time;
        // optimal designs are computed when the scenario runs.
        for (j, p) in scenario.policies.iter().enumerate() {
            let explicit = !matches!(
                p,
                PolicyConfig::Srp { mu: None, .. } | PolicyConfig::Nsrp { mu: None, .. }
            );
            if explicit {
                p.resolve(&scenario.params)
                    .map_err(|e| LabError::field(format!("{at}.policies[{j}]"), e))?;
            }
        }
        out.push(scenario);
    }
    Ok(out)
}
