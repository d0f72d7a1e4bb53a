//! Network state and the exact slot-by-slot dynamics.
//!
//! Each source keeps a single update buffer holding the freshest update. Per
//! slot the order is: update generation, scheduling decision, channel draw
//! for the scheduled source, state update. The rules applied by
//! [`Network::advance_slot`] are
//!
//! ```text
//! scheduled, delivered, l_rem = 1   : h' = z + 1, z' = 1,     l_rem' = L
//! scheduled, delivered, l_rem > 1   : h' = h + 1, z' = z + 1, l_rem' = l_rem - 1
//! not delivered, Refresh,  l_rem = L: h' = h + 1, z' = 1
//! not delivered, otherwise          : h' = h + 1, z' = z + 1
//! every source                      : x' = x + q_bar - d
//! ```
//!
//! Source indices are zero-based throughout the crate.

use crate::error::{Error, Result};

/// Static per-source parameters: priority weight, channel reliability and
/// update length in packets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams {
    pub alpha: f64,
    pub p: f64,
    pub len: u32,
}

impl SourceParams {
    pub fn new(alpha: f64, p: f64, len: u32) -> Result<Self> {
        let params = Self { alpha, p, len };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::Config(format!("p must lie in (0, 1], got {}", self.p)));
        }
        if self.len < 1 {
            return Err(Error::Config("L must be at least 1".into()));
        }
        Ok(())
    }
}

/// Checks a whole parameter list.
pub fn validate_params(params: &[SourceParams]) -> Result<()> {
    if params.is_empty() {
        return Err(Error::Config("network needs at least one source".into()));
    }
    params.iter().try_for_each(SourceParams::validate)
}

/// Dynamic per-source state.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceState {
    /// Age of information, in slots.
    pub h: u64,
    /// System time of the buffered update, in slots.
    pub z: u64,
    /// Packets of the buffered update still to be delivered.
    pub l_rem: u32,
    /// Throughput debt in packets; may be negative.
    pub x_debt: f64,
    /// Slot of the first delivered packet of the update in service.
    pub first_delivery_slot: Option<u64>,
    /// Slot in which the last update was completed.
    pub last_completion_slot: Option<u64>,
}

impl SourceState {
    fn initial(len: u32) -> Self {
        Self {
            h: 1,
            z: 0,
            l_rem: len,
            x_debt: 0.0,
            first_delivery_slot: None,
            last_completion_slot: None,
        }
    }

    /// Positive part of the throughput debt.
    pub fn debt_plus(&self) -> f64 {
        self.x_debt.max(0.0)
    }

    /// True once the first packet of the buffered update has been delivered.
    pub fn in_service(&self, len: u32) -> bool {
        self.l_rem < len
    }
}

/// Scheduling output for one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Idle,
    Transmit(usize),
}

/// Update generation semantics for sources that did not deliver in a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GenerationMode {
    /// A waiting source replaces its buffered update every slot, so a fresh
    /// update is always the one whose transmission starts.
    #[default]
    Refresh,
    /// A new update is generated only when the previous one completes; the
    /// buffered update keeps ageing while it waits.
    HoldUntilDelivery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeliveryKind {
    FirstPacket,
    MidPacket,
    UpdateComplete,
}

/// One successful packet delivery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeliveryEvent {
    pub source: usize,
    pub slot: u64,
    pub kind: DeliveryKind,
    /// System time of the update at the start of the slot.
    pub z_at_event: u64,
}

/// A network of sources and their state at the beginning of slot `slot`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    params: Vec<SourceParams>,
    states: Vec<SourceState>,
    slot: u64,
}

impl Network {
    /// Builds the initial state: `h = 1`, `z = 0`, `l_rem = L`, zero debt.
    pub fn init_state(params: &[SourceParams]) -> Result<Self> {
        validate_params(params)?;
        Ok(Self {
            params: params.to_vec(),
            states: params.iter().map(|p| SourceState::initial(p.len)).collect(),
            slot: 1,
        })
    }

    pub fn params(&self) -> &[SourceParams] {
        &self.params
    }

    pub fn states(&self) -> &[SourceState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &SourceState {
        &self.states[i]
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Index of the current slot (starts at 1).
    pub fn slot(&self) -> u64 {
        self.slot
    }

    /// Replaces one source state. Intended for tests and what-if analysis.
    pub fn set_state(&mut self, i: usize, state: SourceState) -> Result<()> {
        let n = self.len();
        let len = self.params.get(i).ok_or(Error::IndexOutOfRange { index: i, n })?.len;
        if state.l_rem < 1 || state.l_rem > len {
            return Err(Error::Config(format!("l_rem {} outside [1, {len}]", state.l_rem)));
        }
        self.states[i] = state;
        Ok(())
    }

    /// Applies one slot of the dynamics.
    ///
    /// `channel_on` is the channel draw of the scheduled source and is ignored
    /// when the decision is [`Decision::Idle`]. At most one packet is
    /// delivered per slot, so at most one event is returned.
    pub fn advance_slot(
        &mut self,
        decision: Decision,
        channel_on: bool,
        mode: GenerationMode,
        q_bar: &[f64],
    ) -> Result<Option<DeliveryEvent>> {
        let n = self.len();
        if q_bar.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: q_bar.len() });
        }
        let delivered = match decision {
            Decision::Idle => None,
            Decision::Transmit(i) if i >= n => return Err(Error::IndexOutOfRange { index: i, n }),
            Decision::Transmit(i) => channel_on.then_some(i),
        };
        let slot = self.slot;
        let mut event = None;

        for (i, (st, par)) in self.states.iter_mut().zip(&self.params).enumerate() {
            if delivered == Some(i) {
                let z_at_event = st.z;
                let kind = if st.l_rem == 1 {
                    st.h = st.z + 1;
                    st.z = 1;
                    st.l_rem = par.len;
                    st.first_delivery_slot = None;
                    st.last_completion_slot = Some(slot);
                    DeliveryKind::UpdateComplete
                } else {
                    let first = st.l_rem == par.len;
                    if first {
                        st.first_delivery_slot = Some(slot);
                    }
                    st.l_rem -= 1;
                    st.z += 1;
                    st.h += 1;
                    if first {
                        DeliveryKind::FirstPacket
                    } else {
                        DeliveryKind::MidPacket
                    }
                };
                st.x_debt += q_bar[i] - 1.0;
                event = Some(DeliveryEvent { source: i, slot, kind, z_at_event });
            } else {
                st.h += 1;
                st.z = match mode {
                    GenerationMode::Refresh if st.l_rem == par.len => 1,
                    _ => st.z + 1,
                };
                st.x_debt += q_bar[i];
            }
        }
        self.slot += 1;
        Ok(event)
    }

    /// `(1/N) * sum_i alpha_i * h_i` for the current slot.
    pub fn weighted_aoi(&self) -> f64 {
        weighted_aoi(&self.states, &self.params).expect("network keeps params and states aligned")
    }

    /// Checks the per-source state invariants.
    ///
    /// `z <= h` is checked rather than `z < h`: an update of length one
    /// delivered in slot 1 leaves `h = z = 1` (initial `z` is zero), and in
    /// hold mode the tie persists until the next completion.
    pub fn check_invariants(&self) -> Result<()> {
        for (i, (st, par)) in self.states.iter().zip(&self.params).enumerate() {
            let bad = if st.l_rem < 1 || st.l_rem > par.len {
                Some(format!("source {i}: l_rem {} outside [1, {}]", st.l_rem, par.len))
            } else if st.z > st.h {
                Some(format!("source {i}: z {} exceeds h {}", st.z, st.h))
            } else if !st.x_debt.is_finite() {
                Some(format!("source {i}: non-finite debt"))
            } else if st.first_delivery_slot.is_some() != (st.l_rem < par.len) {
                Some(format!("source {i}: first-delivery bookkeeping out of sync"))
            } else {
                None
            };
            if let Some(detail) = bad {
                return Err(Error::Invariant { slot: self.slot, detail });
            }
        }
        Ok(())
    }
}

/// `(1/N) * sum_i alpha_i * h_i` over explicit state and parameter slices.
pub fn weighted_aoi(states: &[SourceState], params: &[SourceParams]) -> Result<f64> {
    if states.len() != params.len() {
        return Err(Error::LengthMismatch { expected: params.len(), actual: states.len() });
    }
    if params.is_empty() {
        return Err(Error::Config("network needs at least one source".into()));
    }
    let total: f64 = states.iter().zip(params).map(|(s, p)| p.alpha * s.h as f64).sum();
    Ok(total / params.len() as f64)
}
