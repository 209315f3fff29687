//! SMAPE error stream and change detection on it.
//!
//! The Page-Hinkley test is one-sided: it only flags increases of the
//! monitored error. ADWIN is provided as a cross-check.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::DailySeries;
use crate::date::Day;
use crate::error::{Error, Result};
use crate::forecast::ForecastSeries;

/// Symmetric absolute percentage error `2|f − a| / (a + f)`, 0 when both are 0.
pub fn smape(actual: f64, forecast: f64) -> Result<f64> {
    if !actual.is_finite() || !forecast.is_finite() {
        return Err(Error::NonFinite);
    }
    if actual < 0.0 || forecast < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "smape needs non-negative inputs, got ({actual}, {forecast})"
        )));
    }
    let denom = actual + forecast;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * (forecast - actual).abs() / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhtConfig {
    pub threshold: f64,
    pub min_instances: usize,
    pub delta: f64,
    pub forgetting: f64,
}

impl Default for PhtConfig {
    fn default() -> Self {
        PhtConfig {
            threshold: 0.3,
            min_instances: 3,
            delta: 0.005,
            forgetting: 0.9999,
        }
    }
}

impl PhtConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold {} must be positive",
                self.threshold
            )));
        }
        if self.min_instances == 0 {
            return Err(Error::InvalidParameter(
                "min_instances must be positive".into(),
            ));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta {} must be non-negative",
                self.delta
            )));
        }
        if !(self.forgetting > 0.0 && self.forgetting <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "forgetting {} must lie in (0, 1]",
                self.forgetting
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhtState {
    pub n: usize,
    pub mean: f64,
    /// Effective sample weight behind `mean`.
    pub weight: f64,
    pub cum: f64,
    pub cum_min: f64,
}

impl PhtState {
    /// The Page-Hinkley statistic `m_T − min m_t`.
    pub fn statistic(&self) -> f64 {
        self.cum - self.cum_min
    }
}

/// Feeds one observation. The running mean uses exponentially decaying
/// weights (`forgetting = 1` gives the plain mean) and is updated before the
/// deviation is accumulated.
pub fn pht_step(state: &PhtState, x: f64, cfg: &PhtConfig) -> (PhtState, bool) {
    let mut s = *state;
    s.n += 1;
    s.weight = cfg.forgetting * s.weight + 1.0;
    s.mean += (x - s.mean) / s.weight;
    s.cum += x - s.mean - cfg.delta;
    s.cum_min = s.cum_min.min(s.cum);
    let alarm = s.n >= cfg.min_instances && s.statistic() > cfg.threshold;
    (s, alarm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftResult {
    pub monitor_start: Day,
    pub drift_date: Option<Day>,
    /// 1-based position of the first alarm in the monitored stream.
    pub alarm_index: Option<usize>,
    pub ph_trace: Vec<f64>,
    pub smape_trace: Vec<f64>,
}

/// Runs the test over a whole stream. Only the first alarm is reported; the
/// statistic keeps being traced afterwards for plotting.
pub fn pht_scan(xs: &[f64], cfg: &PhtConfig) -> (Option<usize>, Vec<f64>) {
    let mut state = PhtState::default();
    let mut first = None;
    let mut trace = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let (next, alarm) = pht_step(&state, x, cfg);
        state = next;
        trace.push(state.statistic());
        if alarm && first.is_none() {
            first = Some(i + 1);
        }
    }
    (first, trace)
}

/// Compares raw actuals against a static forecast day by day and applies
/// the Page-Hinkley test to the SMAPE stream.
pub fn detect_drift(
    actuals: &DailySeries,
    forecasts: &ForecastSeries,
    cfg: &PhtConfig,
) -> Result<DriftResult> {
    let raw: Vec<f64> = actuals.values.iter().map(|&v| v as f64).collect();
    detect_drift_values(actuals.start, &raw, forecasts, cfg)
}

pub fn detect_drift_values(
    start: Day,
    actuals: &[f64],
    forecasts: &ForecastSeries,
    cfg: &PhtConfig,
) -> Result<DriftResult> {
    cfg.validate()?;
    if start != forecasts.start || actuals.len() != forecasts.values.len() {
        return Err(Error::Misaligned);
    }
    if actuals.is_empty() {
        return Err(Error::Empty);
    }
    let smape_trace = actuals
        .iter()
        .zip(&forecasts.values)
        .map(|(&a, &f)| smape(a, f))
        .collect::<Result<Vec<_>>>()?;
    let (alarm_index, ph_trace) = pht_scan(&smape_trace, cfg);
    Ok(DriftResult {
        monitor_start: start,
        drift_date: alarm_index.map(|i| start + (i as i32 - 1)),
        alarm_index,
        ph_trace,
        smape_trace,
    })
}

/// `date,smape,ph_stat,alarm` rows; `alarm` is 1 only on the drift date.
pub fn trace_csv(result: &DriftResult) -> String {
    let mut out = String::from("date,smape,ph_stat,alarm\n");
    for (i, (s, ph)) in result.smape_trace.iter().zip(&result.ph_trace).enumerate() {
        let alarm = u8::from(result.alarm_index == Some(i + 1));
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{}",
            result.monitor_start + i as i32,
            s,
            ph,
            alarm
        );
    }
    out
}

/// Adaptive windowing detector. The window is kept whole (no bucket
/// compression), which is fine for streams of a few hundred points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdwinState {
    pub window: Vec<f64>,
}

impl AdwinState {
    pub fn mean(&self) -> Option<f64> {
        (!self.window.is_empty())
            .then(|| self.window.iter().sum::<f64>() / self.window.len() as f64)
    }
}

/// Appends `x` and looks for a split whose sub-window means differ by more
/// than `sqrt(ln(4|W|/δ) / (2m))`, `m` being the harmonic mean of the two
/// sizes. On alarm the older part up to the largest such split is dropped.
pub fn adwin_step(state: &AdwinState, x: f64, confidence_delta: f64) -> (AdwinState, bool) {
    let mut window = state.window.clone();
    window.push(x);
    let n = window.len();
    let total: f64 = window.iter().sum();
    let ln_term = (4.0 * n as f64 / confidence_delta).ln();
    let mut cut = None;
    let mut head = 0.0;
    for split in 1..n {
        head += window[split - 1];
        let (n0, n1) = (split as f64, (n - split) as f64);
        let diff = (head / n0 - (total - head) / n1).abs();
        let m = 1.0 / (1.0 / n0 + 1.0 / n1);
        if diff > (ln_term / (2.0 * m)).sqrt() {
            cut = Some(split);
        }
    }
    match cut {
        Some(split) => (
            AdwinState {
                window: window.split_off(split),
            },
            true,
        ),
        None => (AdwinState { window }, false),
    }
}
