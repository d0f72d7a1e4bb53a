//! Scheduling policies.
//!
//! Every policy is a pure function of the network state, its own parameters
//! and caller-supplied randomness. Ties are broken by the lowest source index.

use rand::Rng;

use crate::closed_form::q_lb;
use crate::error::{Error, Result};
use crate::model::{validate_params, Decision, Network, SourceParams, SourceState};

/// Relative slack below the lower-bound throughput used by the default
/// Max-Weight targets.
pub const DEFAULT_Q_SLACK: f64 = 1e-3;

/// Parameters of the Max-Weight index policy.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxWeightSpec {
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub v: f64,
    /// Throughput targets per source, in packets per slot.
    pub q_bar: Vec<f64>,
    /// Maximize `p_i C_i` instead of `C_i`.
    pub weight_by_p: bool,
}

impl MaxWeightSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        for (name, v) in [("beta", &self.beta), ("gamma", &self.gamma), ("q_bar", &self.q_bar)] {
            if v.len() != n {
                return Err(Error::Config(format!("{name} has {} entries, expected {n}", v.len())));
            }
        }
        for i in 0..n {
            let (b, g, q) = (self.beta[i], self.gamma[i], self.q_bar[i]);
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::Config(format!("beta[{i}] = {b} must be positive")));
            }
            if !(g >= b && g.is_finite()) {
                return Err(Error::Config(format!("gamma[{i}] = {g} must be at least beta[{i}] = {b}")));
            }
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::Config(format!("q_bar[{i}] = {q} must lie in (0, 1)")));
            }
        }
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(Error::Config(format!("V = {} must be positive", self.v)));
        }
        Ok(())
    }
}

/// Which published constants to use for `beta` and `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MwConstants {
    /// `beta = alpha L / q_bar`, `gamma = beta / sqrt(p)`.
    #[default]
    WithLength,
    /// `beta = alpha / q_bar`, `gamma = beta / sqrt(p)`.
    WithoutLength,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    /// Switching randomized policy: every slot, source `i` with probability `mu_i`.
    Srp { mu: Vec<f64> },
    /// No-switching randomized policy: like `Srp`, but stays with a source
    /// from its first delivered packet until the update completes.
    Nsrp { mu: Vec<f64> },
    /// Largest AoI.
    Greedy,
    /// Largest `sqrt(alpha p) h`, the single-packet Max-Weight rule.
    Mwl1,
    MaxWeight(MaxWeightSpec),
    /// Cyclic schedule; slot `t` (1-based) uses `assignment[(t - 1) % len]`.
    FixedSchedule { assignment: Vec<Decision> },
}

impl PolicySpec {
    /// Short human-readable name used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            PolicySpec::Srp { .. } => "srp",
            PolicySpec::Nsrp { .. } => "nsrp",
            PolicySpec::Greedy => "greedy",
            PolicySpec::Mwl1 => "mwl1",
            PolicySpec::MaxWeight(_) => "max_weight",
            PolicySpec::FixedSchedule { .. } => "fixed",
        }
    }

    /// Checks the parameters against a network of `n` sources.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            PolicySpec::Srp { mu } | PolicySpec::Nsrp { mu } => validate_mu(mu, n),
            PolicySpec::MaxWeight(spec) => spec.validate(n),
            PolicySpec::FixedSchedule { assignment } => {
                if assignment.is_empty() {
                    return Err(Error::Config("fixed schedule needs a period of at least 1".into()));
                }
                match assignment.iter().find(|d| matches!(d, Decision::Transmit(i) if *i >= n)) {
                    Some(Decision::Transmit(i)) => Err(Error::IndexOutOfRange { index: *i, n }),
                    _ => Ok(()),
                }
            }
            PolicySpec::Greedy | PolicySpec::Mwl1 => Ok(()),
        }
    }

    /// Decides the transmission of the current slot. Randomized policies
    /// draw exactly one uniform number per slot from `rng`.
    pub fn decide<R: Rng + ?Sized>(&self, net: &Network, rng: &mut R) -> Result<Decision> {
        Ok(match self {
            PolicySpec::Srp { mu } => srp_decide(mu, rng.gen()),
            PolicySpec::Nsrp { mu } => nsrp_decide(mu, net, rng.gen())?,
            PolicySpec::Greedy => greedy_decide(net.states()),
            PolicySpec::Mwl1 => mwl1_decide(net.states(), net.params()),
            PolicySpec::MaxWeight(spec) => mw_decide(net, spec),
            PolicySpec::FixedSchedule { assignment } => fixed_schedule_decide(assignment, net.slot()),
        })
    }
}

fn validate_mu(mu: &[f64], n: usize) -> Result<()> {
    if mu.len() != n {
        return Err(Error::Config(format!("mu has {} entries, expected {n}", mu.len())));
    }
    if let Some(i) = mu.iter().position(|&m| !(m > 0.0 && m <= 1.0)) {
        return Err(Error::Config(format!("mu[{i}] = {} must lie in (0, 1]", mu[i])));
    }
    let total: f64 = mu.iter().sum();
    if total > 1.0 + 1e-9 {
        return Err(Error::Config(format!("mu sums to {total} > 1")));
    }
    Ok(())
}

/// First index whose cumulative probability exceeds `u`; idle past `sum(mu)`.
pub fn srp_decide(mu: &[f64], u: f64) -> Decision {
    let mut acc = 0.0;
    for (i, &m) in mu.iter().enumerate() {
        acc += m;
        if u < acc {
            return Decision::Transmit(i);
        }
    }
    // Guards against `sum(mu) = 1 - eps` rounding when `mu` is a full distribution.
    if (acc - 1.0).abs() < 1e-12 && !mu.is_empty() {
        let last = mu.iter().rposition(|&m| m > 0.0).unwrap_or(0);
        return Decision::Transmit(last);
    }
    Decision::Idle
}

/// Keeps serving a source whose update is partially delivered; otherwise
/// samples like [`srp_decide`].
pub fn nsrp_decide(mu: &[f64], net: &Network, u: f64) -> Result<Decision> {
    let mut locked = None;
    for (i, (st, par)) in net.states().iter().zip(net.params()).enumerate() {
        if st.in_service(par.len) {
            if let Some(j) = locked {
                return Err(Error::Invariant {
                    slot: net.slot(),
                    detail: format!("sources {j} and {i} are both mid-update under NSRP"),
                });
            }
            locked = Some(i);
        }
    }
    Ok(locked.map_or_else(|| srp_decide(mu, u), Decision::Transmit))
}

/// Argmax with lowest-index tie-breaking over a non-empty iterator.
fn argmax(scores: impl Iterator<Item = f64>) -> Decision {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.enumerate() {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map_or(Decision::Idle, |(i, _)| Decision::Transmit(i))
}

pub fn greedy_decide(states: &[SourceState]) -> Decision {
    argmax(states.iter().map(|s| s.h as f64))
}

pub fn mwl1_decide(states: &[SourceState], params: &[SourceParams]) -> Decision {
    argmax(states.iter().zip(params).map(|(s, p)| (p.alpha * p.p).sqrt() * s.h as f64))
}

/// Value of the Max-Weight index of one source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MwIndex {
    pub source: usize,
    pub c_value: f64,
    /// The source's contribution to the constant part of the drift bound.
    pub b_contrib: f64,
}

/// Max-Weight index `C_i` of source `i`.
///
/// For single-packet sources (`L = 1`) the waiting and completing terms both
/// apply and are summed.
pub fn mw_index(i: usize, state: &SourceState, params: &SourceParams, spec: &MaxWeightSpec) -> MwIndex {
    let (beta, gamma) = (spec.beta[i], spec.gamma[i]);
    let big_l = params.len;
    let l = state.l_rem;
    let (h, z) = (state.h as f64, state.z as f64);
    let lf = l as f64;
    let mut c = 0.0;
    if l == big_l {
        c += beta * (2.0 * h - 1.0);
    }
    if l == 1 {
        let end = big_l as f64 + 1.0;
        c += beta * (h * h - 2.0 * h * z) + gamma * ((z + 2.0).powi(2) - end * end);
    }
    if l > 1 && l < big_l {
        c += gamma * (2.0 * z + 2.0 * lf - 1.0);
    }
    let debt = state.debt_plus();
    c += spec.v * debt;

    let mut b = spec.v * (debt * spec.q_bar[i] + 0.5);
    if l == big_l {
        b += beta * (2.0 * h - 1.0);
    }
    if l > 1 {
        b += gamma * (2.0 * (z + lf) - 1.0);
    }
    MwIndex { source: i, c_value: c, b_contrib: b }
}

/// Transmits to the source maximizing `p_i C_i` (or `C_i`); never idles.
pub fn mw_decide(net: &Network, spec: &MaxWeightSpec) -> Decision {
    argmax(net.states().iter().zip(net.params()).enumerate().map(|(i, (st, par))| {
        let c = mw_index(i, st, par, spec).c_value;
        if spec.weight_by_p {
            par.p * c
        } else {
            c
        }
    }))
}

/// Default Max-Weight parameters: targets just below the lower-bound
/// throughput, `V = 1e-3 min beta`, `p`-weighted index.
pub fn mw_default_config(params: &[SourceParams], constants: MwConstants) -> Result<MaxWeightSpec> {
    validate_params(params)?;
    let q_bar: Vec<f64> = q_lb(params)?.into_iter().map(|q| q * (1.0 - DEFAULT_Q_SLACK)).collect();
    let beta: Vec<f64> = params
        .iter()
        .zip(&q_bar)
        .map(|(s, q)| match constants {
            MwConstants::WithLength => s.alpha * s.len as f64 / q,
            MwConstants::WithoutLength => s.alpha / q,
        })
        .collect();
    let gamma = beta.iter().zip(params).map(|(b, s)| b / s.p.sqrt()).collect();
    let v = 1e-3 * beta.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(MaxWeightSpec { beta, gamma, v, q_bar, weight_by_p: true })
}

/// `assignment[(t - 1) mod period]` for a 1-based slot `t`.
pub fn fixed_schedule_decide(assignment: &[Decision], t: u64) -> Decision {
    if assignment.is_empty() {
        return Decision::Idle;
    }
    let period = assignment.len() as u64;
    assignment[((t.max(1) - 1) % period) as usize]
}

/// Source 0's `l1` slots split into `blocks` equal runs, each followed by
/// `l2` slots of source 1.
pub fn block_schedule(l1: u32, l2: u32, blocks: u32) -> Result<PolicySpec> {
    if l1 < 1 || l2 < 1 || blocks < 1 {
        return Err(Error::Config("update lengths and block count must be at least 1".into()));
    }
    if !l1.is_multiple_of(blocks) {
        return Err(Error::Config(format!("L1 = {l1} is not divisible into {blocks} blocks")));
    }
    let mut assignment = Vec::with_capacity((l1 + blocks * l2) as usize);
    for _ in 0..blocks {
        assignment.extend(std::iter::repeat_n(Decision::Transmit(0), (l1 / blocks) as usize));
        assignment.extend(std::iter::repeat_n(Decision::Transmit(1), l2 as usize));
    }
    Ok(PolicySpec::FixedSchedule { assignment })
}

/// The four two-source periodic schedules: no switching, switching twice,
/// switching ten times during source 0's update, and packet round robin.
pub fn table1_schedules(l1: u32, l2: u32) -> Result<[(&'static str, PolicySpec); 4]> {
    let blocks = |k: u32| block_schedule(l1, l2, k);
    Ok([
        ("no_switching", blocks(1)?),
        ("switch_twice", blocks(2)?),
        ("switch_10", blocks(10)?),
        (
            "round_robin",
            PolicySpec::FixedSchedule { assignment: vec![Decision::Transmit(0), Decision::Transmit(1)] },
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GenerationMode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn net(items: &[(f64, f64, u32)]) -> Network {
        let params: Vec<_> = items.iter().map(|&(a, p, l)| SourceParams::new(a, p, l).unwrap()).collect();
        Network::init_state(&params).unwrap()
    }

    fn with_h(n: &mut Network, h: &[u64]) {
        for (i, &v) in h.iter().enumerate() {
            let mut st = n.state(i).clone();
            st.h = v;
            n.set_state(i, st).unwrap();
        }
    }

    fn state(h: u64, z: u64, l_rem: u32) -> SourceState {
        SourceState { h, z, l_rem, x_debt: 0.0, first_delivery_slot: None, last_completion_slot: None }
    }

    fn spec(beta: f64, gamma: f64, v: f64) -> MaxWeightSpec {
        MaxWeightSpec { beta: vec![beta], gamma: vec![gamma], v, q_bar: vec![0.5], weight_by_p: true }
    }

    #[test]
    fn srp_partition() {
        assert_eq!(srp_decide(&[0.5, 0.5], 0.3), Decision::Transmit(0));
        assert_eq!(srp_decide(&[0.6, 0.3], 0.95), Decision::Idle);
        assert_eq!(srp_decide(&[1.0], 0.999_999), Decision::Transmit(0));
        assert_eq!(srp_decide(&[0.2, 0.8], 0.5), Decision::Transmit(1));
    }

    #[test]
    fn nsrp_lock() {
        let mut n = net(&[(1.0, 1.0, 5), (1.0, 1.0, 5)]);
        let mut st = n.state(1).clone();
        st.l_rem = 3;
        n.set_state(1, st).unwrap();
        for u in [0.0, 0.3, 0.99] {
            assert_eq!(nsrp_decide(&[0.5, 0.5], &n, u).unwrap(), Decision::Transmit(1));
        }
        let fresh = net(&[(1.0, 1.0, 5), (1.0, 1.0, 5)]);
        assert_eq!(nsrp_decide(&[0.2, 0.8], &fresh, 0.5).unwrap(), Decision::Transmit(1));
        assert_eq!(nsrp_decide(&[0.2, 0.7], &fresh, 0.95).unwrap(), Decision::Idle);

        let mut st = n.state(0).clone();
        st.l_rem = 2;
        n.set_state(0, st).unwrap();
        assert!(matches!(nsrp_decide(&[0.5, 0.5], &n, 0.1), Err(Error::Invariant { .. })));
    }

    #[test]
    fn greedy_examples() {
        let mut n = net(&[(1.0, 1.0, 1), (1.0, 1.0, 1)]);
        with_h(&mut n, &[5, 3]);
        assert_eq!(greedy_decide(n.states()), Decision::Transmit(0));
        with_h(&mut n, &[4, 4]);
        assert_eq!(greedy_decide(n.states()), Decision::Transmit(0));
        with_h(&mut n, &[1, 9]);
        assert_eq!(greedy_decide(n.states()), Decision::Transmit(1));
    }

    #[test]
    fn mwl1_examples() {
        let mut n = net(&[(1.0, 1.0, 1), (4.0, 1.0, 1)]);
        with_h(&mut n, &[4, 3]);
        assert_eq!(mwl1_decide(n.states(), n.params()), Decision::Transmit(1));
        // sqrt(4) * 2 = 4 ties with 1 * 4.
        with_h(&mut n, &[4, 2]);
        assert_eq!(mwl1_decide(n.states(), n.params()), Decision::Transmit(0));
        let mut n = net(&[(9.0, 1.0, 1), (1.0, 1.0, 1)]);
        with_h(&mut n, &[1, 3]);
        assert_eq!(mwl1_decide(n.states(), n.params()), Decision::Transmit(0));
        let n = net(&[(2.0, 0.5, 3), (2.0, 0.5, 3)]);
        assert_eq!(mwl1_decide(n.states(), n.params()), Decision::Transmit(0));
    }

    #[test]
    fn mw_index_regimes() {
        let c = |st: SourceState, len: u32, s: &MaxWeightSpec| {
            mw_index(0, &st, &SourceParams::new(1.0, 1.0, len).unwrap(), s).c_value
        };
        assert_eq!(c(state(5, 2, 1), 2, &spec(1.0, 2.0, 0.0)), 19.0);
        assert_eq!(c(state(9, 4, 2), 3, &spec(0.5, 1.0, 0.0)), 11.0);
        assert_eq!(c(state(3, 1, 4), 4, &spec(2.0, 3.0, 0.0)), 10.0);
        // L = 1: waiting and completing terms are both active.
        let both = c(state(3, 1, 1), 1, &spec(1.0, 1.0, 0.0));
        assert_eq!(both, (2.0 * 3.0 - 1.0) + (9.0 - 6.0) + (9.0 - 4.0));
    }

    #[test]
    fn mw_index_debt_term() {
        let mut st = state(3, 1, 4);
        st.x_debt = 2.5;
        let s = spec(2.0, 3.0, 0.1);
        let idx = mw_index(0, &st, &SourceParams::new(1.0, 1.0, 4).unwrap(), &s);
        assert!((idx.c_value - (10.0 + 0.25)).abs() < 1e-12);
        assert!((idx.b_contrib - (0.1 * (2.5 * 0.5 + 0.5) + 10.0 + 3.0 * 9.0)).abs() < 1e-12);
        st.x_debt = -4.0;
        let idx = mw_index(0, &st, &SourceParams::new(1.0, 1.0, 4).unwrap(), &s);
        assert_eq!(idx.c_value, 10.0);
    }

    #[test]
    fn mw_weighting() {
        // Source 0 (p=0.5, L=1): C = beta((2h-1) + h^2 - 2hz) + gamma((z+2)^2 - 4).
        // With h=2, z=1, beta=gamma=1: C = 3 + 0 + 5 = 8. Source 1 (p=1): waiting, L=2, h=2 -> C = 3·beta.
        let n = {
            let mut n = net(&[(1.0, 0.5, 1), (1.0, 1.0, 2)]);
            n.set_state(0, state(2, 1, 1)).unwrap();
            n.set_state(1, state(2, 1, 2)).unwrap();
            n
        };
        let mut s = MaxWeightSpec {
            beta: vec![1.0, 2.0],
            gamma: vec![1.0, 2.0],
            v: 1e-3,
            q_bar: vec![0.3, 0.3],
            weight_by_p: true,
        };
        // Scores: 0.5·8 = 4 vs 1·6 = 6.
        assert_eq!(mw_decide(&n, &s), Decision::Transmit(1));
        s.weight_by_p = false;
        s.beta[1] = 1.0 + 1.0 / 3.0;
        s.gamma[1] = s.beta[1];
        // Scores: 8 vs 4.
        assert_eq!(mw_decide(&n, &s), Decision::Transmit(0));
    }

    #[test]
    fn mw_transmits_when_all_negative() {
        let mut n = net(&[(1.0, 1.0, 3), (1.0, 1.0, 3)]);
        n.set_state(0, state(2, 2, 1)).unwrap();
        n.set_state(1, state(2, 2, 1)).unwrap();
        let s = mw_default_config(n.params(), MwConstants::WithLength).unwrap();
        for i in 0..2 {
            assert!(mw_index(i, n.state(i), &n.params()[i], &s).c_value < 0.0);
        }
        assert_eq!(mw_decide(&n, &s), Decision::Transmit(0));
    }

    #[test]
    fn default_config() {
        let one = [SourceParams::new(1.0, 1.0, 1).unwrap()];
        let s = mw_default_config(&one, MwConstants::WithLength).unwrap();
        assert!((s.q_bar[0] - 0.999).abs() < 1e-12);
        assert!((s.beta[0] - 1.0 / 0.999).abs() < 1e-12);
        assert!((s.gamma[0] - 1.0 / 0.999).abs() < 1e-12);
        s.validate(1).unwrap();

        let mixed: Vec<_> = [(1.0, 0.3, 5), (2.0, 0.8, 1), (1.0, 0.3, 5)]
            .iter()
            .map(|&(a, p, l)| SourceParams::new(a, p, l).unwrap())
            .collect();
        for constants in [MwConstants::WithLength, MwConstants::WithoutLength] {
            let s = mw_default_config(&mixed, constants).unwrap();
            assert_eq!(s.beta[0], s.beta[2]);
            assert_eq!(s.gamma[0], s.gamma[2]);
            for (i, p) in mixed.iter().enumerate() {
                assert!((s.gamma[i] / s.beta[i] - 1.0 / p.p.sqrt()).abs() < 1e-12);
            }
        }
        let with = mw_default_config(&mixed, MwConstants::WithLength).unwrap();
        let without = mw_default_config(&mixed, MwConstants::WithoutLength).unwrap();
        assert!((with.beta[0] / without.beta[0] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn max_weight_validation() {
        let mut s = spec(2.0, 1.0, 0.1);
        assert!(s.validate(1).is_err());
        s.gamma = vec![2.0];
        s.validate(1).unwrap();
        s.v = 0.0;
        assert!(s.validate(1).is_err());
        assert!(spec(1.0, 1.0, 0.1).validate(2).is_err());
    }

    #[test]
    fn fixed_schedule() {
        let a = [Decision::Transmit(0), Decision::Transmit(1)];
        assert_eq!(fixed_schedule_decide(&a, 3), Decision::Transmit(0));
        assert_eq!(fixed_schedule_decide(&a, 2), Decision::Transmit(1));
        let b = [Decision::Idle, Decision::Transmit(0), Decision::Transmit(0)];
        assert_eq!(fixed_schedule_decide(&b, 1), Decision::Idle);
        assert_eq!(fixed_schedule_decide(&b, 4), fixed_schedule_decide(&b, 1));
    }

    #[test]
    fn table1_periods() {
        let all = table1_schedules(100, 2).unwrap();
        let periods: Vec<usize> = all
            .iter()
            .map(|(_, s)| match s {
                PolicySpec::FixedSchedule { assignment } => assignment.len(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(periods, vec![102, 104, 120, 2]);
        match &block_schedule(2, 2, 2).unwrap() {
            PolicySpec::FixedSchedule { assignment } => {
                use Decision::Transmit as T;
                assert_eq!(assignment, &vec![T(0), T(1), T(1), T(0), T(1), T(1)]);
            }
            _ => unreachable!(),
        }
        assert!(matches!(table1_schedules(5, 2), Err(Error::Config(_))));
    }

    #[test]
    fn decide_is_reproducible() {
        let n = net(&[(1.0, 0.5, 3), (2.0, 0.9, 1)]);
        let specs = [
            PolicySpec::Srp { mu: vec![0.4, 0.5] },
            PolicySpec::Nsrp { mu: vec![0.4, 0.6] },
            PolicySpec::Greedy,
            PolicySpec::Mwl1,
            PolicySpec::MaxWeight(mw_default_config(n.params(), MwConstants::WithLength).unwrap()),
        ];
        for s in &specs {
            s.validate(2).unwrap();
            let a: Vec<_> = {
                let mut rng = ChaCha8Rng::seed_from_u64(7);
                (0..50).map(|_| s.decide(&n, &mut rng).unwrap()).collect()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let b: Vec<_> = (0..50).map(|_| s.decide(&n, &mut rng).unwrap()).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn nsrp_lock_holds_end_to_end() {
        let mut n = net(&[(1.0, 0.6, 4), (1.0, 0.3, 3), (2.0, 0.9, 1)]);
        let s = PolicySpec::Nsrp { mu: vec![0.3, 0.3, 0.3] };
        let q = vec![0.0; 3];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20_000 {
            let d = s.decide(&n, &mut rng).unwrap();
            let on = match d {
                Decision::Transmit(i) => rng.gen::<f64>() < n.params()[i].p,
                Decision::Idle => false,
            };
            n.advance_slot(d, on, GenerationMode::Refresh, &q).unwrap();
            let busy = n.states().iter().zip(n.params()).filter(|(s, p)| s.in_service(p.len)).count();
            assert!(busy <= 1);
        }
    }

    #[test]
    fn srp_frequencies_match_mu() {
        // Chi-square goodness of fit over 10^6 draws, 3 categories + idle.
        let mu = [0.2, 0.5, 0.25];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0u64; 4];
        let draws = 1_000_000;
        for _ in 0..draws {
            match srp_decide(&mu, rng.gen()) {
                Decision::Transmit(i) => counts[i] += 1,
                Decision::Idle => counts[3] += 1,
            }
        }
        let expected = [0.2, 0.5, 0.25, 0.05].map(|p| p * draws as f64);
        let chi2: f64 = counts.iter().zip(&expected).map(|(&c, e)| (c as f64 - e).powi(2) / e).sum();
        // 99.9% quantile of chi-square with 3 degrees of freedom.
        assert!(chi2 < 16.27, "chi2 = {chi2}");
    }

    #[test]
    fn mw_decision_is_scale_invariant() {
        let mut n = net(&[(1.0, 0.5, 4), (3.0, 0.9, 2), (1.0, 0.7, 1)]);
        let base = mw_default_config(n.params(), MwConstants::WithLength).unwrap();
        let scaled = MaxWeightSpec {
            beta: base.beta.iter().map(|b| b * 7.5).collect(),
            gamma: base.gamma.iter().map(|g| g * 7.5).collect(),
            v: base.v * 7.5,
            ..base.clone()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5000 {
            let d = mw_decide(&n, &base);
            assert_eq!(d, mw_decide(&n, &scaled));
            let on = match d {
                Decision::Transmit(i) => rng.gen::<f64>() < n.params()[i].p,
                Decision::Idle => false,
            };
            n.advance_slot(d, on, GenerationMode::Refresh, &base.q_bar).unwrap();
        }
    }
}
