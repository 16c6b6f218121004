//! Experiment runner: builds field graphs, checks the mixing and counting
//! inequalities and geometric facts, sweeps VC-dimension against size
//! thresholds, and writes CSV/JSON/SVG reports.

pub mod config;
pub mod context;
pub mod counts;
pub mod error;
pub mod geometry;
pub mod inputs;
pub mod mixing;
pub mod plot;
pub mod report;
pub mod seeds;
pub mod suites;
pub mod threshold;
pub mod vcsweep;

pub use error::{HarnessError, Result};
