//! Experiment layer: config files, built-in scenario grids, batch runs,
//! CSV reports and the self-validation suite.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod scenarios;
pub mod validate;
