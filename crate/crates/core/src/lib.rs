//! Age-of-Information scheduling for sources whose updates span several
//! packets, sent one packet per slot over unreliable channels.
//!
//! The crate provides the network model ([`model`]), scheduling policies
//! ([`policy`]), analytical performance expressions ([`closed_form`]), a
//! numerical designer for the no-switching randomized policy ([`optimize`])
//! and a seeded slotted simulator ([`sim`]).

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod error;
pub mod model;
pub mod optimize;
pub mod policy;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use model::{
    Decision, DeliveryEvent, DeliveryKind, GenerationMode, Network, SourceParams, SourceState,
};
pub use policy::{MaxWeightSpec, MwConstants, PolicySpec};
pub use sim::{Metrics, ReplicationSummary, SimConfig};
