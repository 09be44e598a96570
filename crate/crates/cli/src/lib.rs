//! Command-line front end for the rigsim library: unit-suffixed TOML
//! configurations, CSV time series, deterministic result bundles and a few
//! reporting commands on top of them.

pub mod bundle;
pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod timeseries;
pub mod units;
