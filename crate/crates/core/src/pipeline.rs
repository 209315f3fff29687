//! Per-series detection chain: training window → grid search → refit →
//! static forecast → Page-Hinkley on SMAPE.

use serde::{Deserialize, Serialize};

use crate::date::Day;
use crate::drift::{detect_drift_values, DriftResult, PhtConfig};
use crate::error::{Error, Result};
use crate::forecast::{
    fit, floor_rule, grid_search_over, hw_forecast, ForecastSeries, GridResult, HoltWintersState,
    DEFAULT_WINDOW_OFFSET, GRID, VALIDATION_DAYS,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Days after the first intervention that still count as training data.
    pub window_offset: i32,
    /// Candidate values for each of α, β and γ.
    pub grid: Vec<f64>,
    pub pht: PhtConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            window_offset: DEFAULT_WINDOW_OFFSET,
            grid: GRID.to_vec(),
            pht: PhtConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRun {
    pub window_end: Day,
    pub grid: GridResult,
    pub final_state: HoltWintersState,
    /// In-sample one-step predictions over the training window.
    pub in_sample: ForecastSeries,
    /// Static multi-horizon forecast over the monitored days.
    pub forecast: ForecastSeries,
    pub drift: DriftResult,
}

/// Runs the chain on raw daily values starting at `start`. The monitored
/// stream begins the day after the training window and includes the three
/// validation days used by the grid search.
pub fn run_series(
    start: Day,
    raw: &[f64],
    first_npi: Day,
    cfg: &PipelineConfig,
) -> Result<SeriesRun> {
    if raw.is_empty() {
        return Err(Error::Empty);
    }
    let last = start + (raw.len() as i32 - 1);
    let window_end = first_npi + cfg.window_offset;
    let train_len = window_end - start + 1;
    if train_len < 1 || window_end + VALIDATION_DAYS as i32 > last {
        return Err(Error::InsufficientData {
            end: window_end,
            last,
        });
    }
    let train_len = train_len as usize;
    let train = floor_rule(&raw[..train_len]);
    let validation = &raw[train_len..train_len + VALIDATION_DAYS];
    let grid = grid_search_over(&train, validation, &cfg.grid)?;
    let (one_step, final_state) = fit(&train, &grid.params)?;

    let monitored = &raw[train_len..];
    let forecast = ForecastSeries {
        start: window_end + 1,
        values: hw_forecast(&final_state, monitored.len()),
    };
    let drift = detect_drift_values(forecast.start, monitored, &forecast, &cfg.pht)?;
    Ok(SeriesRun {
        window_end,
        grid,
        final_state,
        in_sample: ForecastSeries {
            start,
            values: one_step,
        },
        forecast,
        drift,
    })
}
