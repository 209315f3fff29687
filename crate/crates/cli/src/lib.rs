//! Command-line orchestration: configuration, the detect and regress
//! stages, reports and charts.

pub mod chart;
pub mod config;
pub mod detect;
pub mod output;
pub mod regress;
pub mod report;
pub mod synth;

pub use config::RunConfig;
