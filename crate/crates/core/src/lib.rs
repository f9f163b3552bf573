//! Respondent-driven sampling laboratory: network generation and retuning,
//! recruitment simulation with reporting error, proportion estimators,
//! chain-bootstrap intervals, and an experiment harness.

pub mod bootstrap;
pub mod estimate;
pub mod harness;
pub mod netcore;
pub mod netgen;
pub mod rdssim;
pub mod rng;
