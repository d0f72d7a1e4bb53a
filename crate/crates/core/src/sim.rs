//! Slotted simulation of a network under a policy.
//!
//! Randomness comes from ChaCha8 streams derived from the episode seed:
//! stream 0 drives the policy, stream `i + 1` the channel of source `i`. A
//! channel is sampled only when its source is scheduled, so two policies run
//! with the same seed see the same sequence of outcomes per source.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::closed_form::q_lb;
use crate::error::{Error, Result};
use crate::model::{Decision, DeliveryKind, GenerationMode, Network, SourceParams};
use crate::policy::{mw_index, PolicySpec, DEFAULT_Q_SLACK};
use crate::stats;

/// Per-cycle constant of the exact renewal identity.
pub const CYCLE_CONSTANT: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Number of simulated slots `T`.
    pub horizon: u64,
    /// Initial slots excluded from every average.
    pub warmup: u64,
    pub seed: u64,
    pub mode: GenerationMode,
    pub replications: usize,
    /// Keep every completed cycle, not only aggregate sums.
    pub keep_cycles: bool,
}

impl SimConfig {
    /// Refresh mode, one replication, warm-up of 1% of the horizon.
    pub fn new(horizon: u64, seed: u64) -> Self {
        Self {
            horizon,
            warmup: horizon / 100,
            seed,
            mode: GenerationMode::Refresh,
            replications: 1,
            keep_cycles: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon <= self.warmup {
            return Err(Error::Config(format!(
                "horizon {} leaves no slots after a warm-up of {}",
                self.horizon, self.warmup
            )));
        }
        if self.replications < 1 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        Ok(())
    }

    /// Slots that enter the averages.
    pub fn measured_slots(&self) -> u64 {
        self.horizon - self.warmup
    }
}

/// One completed update cycle of a source, in slot indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleRecord {
    /// Completion slot of the previous update.
    pub start: u64,
    /// Slot of the first delivered packet.
    pub first: u64,
    /// Completion slot.
    pub end: u64,
    /// Service time of the previous update.
    pub s_prev: u64,
}

impl CycleRecord {
    pub fn waiting(&self) -> u64 {
        self.first - self.start
    }

    pub fn service(&self) -> u64 {
        self.end - self.first
    }
}

/// Exact integer sums over completed cycles.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CycleStats {
    pub count: u64,
    pub sum_w: u128,
    pub sum_w2: u128,
    pub sum_s: u128,
    pub sum_s2: u128,
    pub sum_len: u128,
    pub sum_len2: u128,
    pub sum_sprev_len: u128,
}

impl CycleStats {
    fn push(&mut self, rec: &CycleRecord) {
        let (w, s) = (rec.waiting() as u128, rec.service() as u128);
        let len = w + s;
        self.count += 1;
        self.sum_w += w;
        self.sum_w2 += w * w;
        self.sum_s += s;
        self.sum_s2 += s * s;
        self.sum_len += len;
        self.sum_len2 += len * len;
        self.sum_sprev_len += rec.s_prev as u128 * len;
    }

    fn merge(&mut self, other: &CycleStats) {
        self.count += other.count;
        self.sum_w += other.sum_w;
        self.sum_w2 += other.sum_w2;
        self.sum_s += other.sum_s;
        self.sum_s2 += other.sum_s2;
        self.sum_len += other.sum_len;
        self.sum_len2 += other.sum_len2;
        self.sum_sprev_len += other.sum_sprev_len;
    }

    fn avg(&self, v: u128) -> f64 {
        v as f64 / self.count as f64
    }

    pub fn mean_w(&self) -> f64 {
        self.avg(self.sum_w)
    }

    pub fn mean_w2(&self) -> f64 {
        self.avg(self.sum_w2)
    }

    pub fn mean_s(&self) -> f64 {
        self.avg(self.sum_s)
    }

    pub fn mean_s2(&self) -> f64 {
        self.avg(self.sum_s2)
    }

    /// Per-source average age implied by the cycle sums,
    /// `M[(W+S)^2] / (2 M[W+S]) + M[S_prev (W+S)] / M[W+S] + constant`.
    pub fn implied_age(&self, constant: f64) -> f64 {
        let len = self.sum_len as f64;
        self.sum_len2 as f64 / (2.0 * len) + self.sum_sprev_len as f64 / len + constant
    }
}

/// Results of one episode. Averages cover the slots after the warm-up.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// `(1/N) sum_i alpha_i mean_h_i`.
    pub ewsaoi: f64,
    pub mean_h: Vec<f64>,
    /// Delivered packets per slot.
    pub throughput: Vec<f64>,
    /// Completed updates.
    pub updates: Vec<u64>,
    pub deliveries: Vec<u64>,
    /// Cycles starting after the warm-up; the final partial cycle is dropped.
    pub cycles: Vec<CycleStats>,
    /// Individual cycles, filled only with [`SimConfig::keep_cycles`].
    pub cycle_log: Vec<Vec<CycleRecord>>,
    /// Max-Weight only: completed updates whose last packet had a strictly
    /// smaller index than an earlier packet of the same update. The first
    /// update of each source is not checked.
    pub mw_order_violations: u64,
    pub mw_updates_checked: u64,
    pub debt_max: Vec<f64>,
    pub measured_slots: u64,
    pub seed: u64,
}

/// Seed of replication `r`, mixed SplitMix64-style from the base seed.
pub fn replication_seed(seed: u64, r: usize) -> u64 {
    let mut z = seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    for _ in 0..2 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Per-source state of the index-ordering check for the update in service.
#[derive(Debug, Clone, Copy, Default)]
struct OrderTrack {
    earlier_max: Option<f64>,
}

/// Simulates slots `1..=T` with the episode seed taken from `config.seed`.
pub fn run_episode(params: &[SourceParams], policy: &PolicySpec, config: &SimConfig) -> Result<Metrics> {
    config.validate()?;
    let mut net = Network::init_state(params)?;
    policy.validate(params.len())?;
    let n = params.len();

    let q_bar = match policy {
        PolicySpec::MaxWeight(spec) => spec.q_bar.clone(),
        _ => q_lb(params)?.into_iter().map(|q| q * (1.0 - DEFAULT_Q_SLACK)).collect(),
    };
    let mw_spec = match policy {
        PolicySpec::MaxWeight(spec) => Some(spec),
        _ => None,
    };

    let mut policy_rng = stream(config.seed, 0);
    let mut channels: Vec<ChaCha8Rng> = (0..n).map(|i| stream(config.seed, i as u64 + 1)).collect();

    let mut sum_h = vec![0u128; n];
    let mut deliveries = vec![0u64; n];
    let mut updates = vec![0u64; n];
    let mut completions_total = vec![0u64; n];
    let mut cycles = vec![CycleStats::default(); n];
    let mut cycle_log = vec![Vec::new(); n];
    let mut last_service = vec![0u64; n];
    let mut order = vec![OrderTrack::default(); n];
    let mut violations = 0u64;
    let mut checked = 0u64;
    let mut debt_max = vec![0.0f64; n];

    for t in 1..=config.horizon {
        let measuring = t > config.warmup;
        if measuring {
            for (acc, st) in sum_h.iter_mut().zip(net.states()) {
                *acc += st.h as u128;
            }
        }
        let decision = policy.decide(&net, &mut policy_rng)?;
        // Bookkeeping of the scheduled source, read before the state update.
        let mut scheduled = None;
        let mut channel_on = false;
        if let Decision::Transmit(i) = decision {
            channel_on = channels[i].gen::<f64>() < params[i].p;
            let st = net.state(i);
            let c = mw_spec.map(|s| mw_index(i, st, &params[i], s).c_value);
            scheduled = Some((c, st.first_delivery_slot, st.last_completion_slot));
        }

        let event = net.advance_slot(decision, channel_on, config.mode, &q_bar)?;
        net.check_invariants().map_err(|e| match e {
            Error::Invariant { slot, detail } => {
                Error::Invariant { slot, detail: format!("{detail}; state {:?}", net.states()) }
            }
            other => other,
        })?;

        if let (Some(ev), Some((c, first_slot, prev_completion))) = (event, scheduled) {
            let i = ev.source;
            if measuring {
                deliveries[i] += 1;
            }
            let complete = ev.kind == DeliveryKind::UpdateComplete;
            if let Some(c) = c {
                let track = &mut order[i];
                if !complete {
                    track.earlier_max = Some(track.earlier_max.map_or(c, |m| m.max(c)));
                } else {
                    if completions_total[i] > 0 {
                        if let Some(earlier) = track.earlier_max {
                            checked += 1;
                            if earlier > c + 1e-9 * c.abs().max(1.0) {
                                violations += 1;
                            }
                        }
                    }
                    track.earlier_max = None;
                }
            }
            if complete {
                // Single-packet updates start and finish in the same slot.
                let first = first_slot.unwrap_or(ev.slot);
                if let Some(start) = prev_completion {
                    if start > config.warmup {
                        let rec = CycleRecord { start, first, end: ev.slot, s_prev: last_service[i] };
                        cycles[i].push(&rec);
                        if config.keep_cycles {
                            cycle_log[i].push(rec);
                        }
                    }
                }
                if measuring {
                    updates[i] += 1;
                }
                completions_total[i] += 1;
                last_service[i] = ev.slot - first;
            }
        }
        for (m, st) in debt_max.iter_mut().zip(net.states()) {
            *m = m.max(st.x_debt);
        }
    }

    let measured = config.measured_slots();
    let mean_h: Vec<f64> = sum_h.iter().map(|&s| s as f64 / measured as f64).collect();
    let ewsaoi = mean_h.iter().zip(params).map(|(h, p)| p.alpha * h).sum::<f64>() / n as f64;
    Ok(Metrics {
        ewsaoi,
        throughput: deliveries.iter().map(|&d| d as f64 / measured as f64).collect(),
        mean_h,
        updates,
        deliveries,
        cycles,
        cycle_log,
        mw_order_violations: violations,
        mw_updates_checked: checked,
        debt_max,
        measured_slots: measured,
        seed: config.seed,
    })
}

/// Replication results in replication order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSummary {
    pub ewsaoi_mean: f64,
    /// Sample standard deviation across replications (`NaN` for one).
    pub ewsaoi_std: f64,
    /// Half-width of the 95% t-interval (`NaN` for one replication).
    pub ewsaoi_ci95: f64,
    pub ewsaoi_stderr: f64,
    pub mean_h: Vec<f64>,
    pub throughput: Vec<f64>,
    /// Standard error of each source's throughput across replications.
    pub throughput_stderr: Vec<f64>,
    pub episodes: Vec<Metrics>,
}

impl ReplicationSummary {
    /// Cycle sums pooled over all replications.
    pub fn pooled_cycles(&self) -> Vec<CycleStats> {
        let n = self.mean_h.len();
        let mut pooled = vec![CycleStats::default(); n];
        for ep in &self.episodes {
            for (p, c) in pooled.iter_mut().zip(&ep.cycles) {
                p.merge(c);
            }
        }
        pooled
    }
}

/// Runs `config.replications` independent episodes, replication `r` seeded
/// with [`replication_seed`]`(config.seed, r)`. Episodes run in parallel;
/// the reduction happens in replication order.
pub fn run_replications(
    params: &[SourceParams],
    policy: &PolicySpec,
    config: &SimConfig,
) -> Result<ReplicationSummary> {
    config.validate()?;
    let episodes: Vec<Metrics> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let cfg = SimConfig { seed: replication_seed(config.seed, r), ..config.clone() };
            run_episode(params, policy, &cfg)
        })
        .collect::<Result<_>>()?;
    Ok(summarize(episodes))
}

/// Reduces episodes (in the given order) to a summary.
pub fn summarize(episodes: Vec<Metrics>) -> ReplicationSummary {
    let values: Vec<f64> = episodes.iter().map(|m| m.ewsaoi).collect();
    let n = episodes.first().map_or(0, |m| m.mean_h.len());
    let per_source = |f: &dyn Fn(&Metrics) -> f64| -> Vec<f64> {
        let v: Vec<f64> = episodes.iter().map(f).collect();
        v
    };
    let mut mean_h = Vec::with_capacity(n);
    let mut throughput = Vec::with_capacity(n);
    let mut throughput_stderr = Vec::with_capacity(n);
    for i in 0..n {
        mean_h.push(stats::mean(&per_source(&|m| m.mean_h[i])));
        let q = per_source(&|m| m.throughput[i]);
        throughput.push(stats::mean(&q));
        throughput_stderr.push(if q.len() > 1 { stats::std_error(&q) } else { f64::NAN });
    }
    ReplicationSummary {
        ewsaoi_mean: stats::mean(&values),
        ewsaoi_std: stats::sample_std(&values),
        ewsaoi_ci95: stats::ci95_half_width(&values),
        ewsaoi_stderr: if values.len() > 1 { stats::std_error(&values) } else { f64::NAN },
        mean_h,
        throughput,
        throughput_stderr,
        episodes,
    }
}

/// EWSAoI rebuilt from cycle statistics with the exact per-cycle constant.
pub fn reconstruct_prop1(cycles: &[CycleStats], params: &[SourceParams]) -> Result<f64> {
    reconstruct_prop1_with(cycles, params, CYCLE_CONSTANT)
}

/// As [`reconstruct_prop1`] with an explicit per-cycle constant.
pub fn reconstruct_prop1_with(cycles: &[CycleStats], params: &[SourceParams], constant: f64) -> Result<f64> {
    if cycles.len() != params.len() {
        return Err(Error::LengthMismatch { expected: params.len(), actual: cycles.len() });
    }
    let mut total = 0.0;
    for (i, (c, p)) in cycles.iter().zip(params).enumerate() {
        if c.count == 0 {
            return Err(Error::NoCycles { source_index: i });
        }
        total += p.alpha * c.implied_age(constant);
    }
    Ok(total / params.len() as f64)
}
