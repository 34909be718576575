//! Investor-sentiment econometrics: bullishness-index construction from
//! classified stock-forum comments, classical stationarity and causality
//! tests, and Bayesian estimation of a time-varying-parameter VAR with
//! stochastic volatility, with posterior diagnostics and time-varying
//! impulse-response surfaces.
//!
//! The crate is organized as a library; `examples/` holds one runnable
//! program per major capability and the `sentivar` binary exposes the batch
//! pipeline as subcommands.

pub mod econ;
pub mod error;
pub mod ingest;
pub mod oracles;
pub mod posterior;
pub mod sentiment;
pub mod ssm;
pub mod stats;
pub mod synthetic;
pub mod tvp;

pub use error::{Error, Result};
