//! Drift-timing analysis for intervention studies on daily count series.
//!
//! The pipeline per region is: cumulative counts ([`data`]) → daily counts →
//! Holt-Winters forecast fitted on a pre-intervention window ([`forecast`]) →
//! SMAPE error stream monitored with a Page-Hinkley test ([`drift`]) → time lags
//! between interventions and the detected drift ([`lag`]). The lags feed a
//! Lasso model evaluated with nested cross-validation ([`lasso`]). [`synth`]
//! produces ground-truth streams for exercising the whole chain.

pub mod data;
pub mod date;
pub mod drift;
pub mod error;
pub mod forecast;
pub mod lag;
pub mod lasso;
pub mod pipeline;
pub mod region;
pub mod seed;
pub mod synth;

pub use date::Day;
pub use error::{Error, Result};
pub use region::{InterventionKind, RegionId, RegionKind};
