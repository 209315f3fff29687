//! Holt-Winters smoothing with a multiplicative trend and an additive
//! 7-day season.
//!
//! Fitting works on values already floored at 1 (see [`floor_rule`]); the
//! multiplicative trend breaks on zero-count days otherwise.

use serde::{Deserialize, Serialize};

use crate::data::{DailySeries, InterventionEvent};
use crate::date::Day;
use crate::drift::smape;
use crate::error::{Error, Result};

pub const SEASON: usize = 7;
/// Lower clamp for level, trend and forecasts.
pub const EPS: f64 = 1e-6;
/// Smoothing parameter grid 0.1, 0.2, …, 0.9.
pub const GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const VALIDATION_DAYS: usize = 3;
pub const DEFAULT_WINDOW_OFFSET: i32 = 7;

// Scores closer than this are treated as ties so that rounding noise cannot
// override the lexicographic tie-break.
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl SmoothingParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must lie in (0, 1)"
                )));
            }
        }
        Ok(SmoothingParams { alpha, beta, gamma })
    }

    /// All 729 grid candidates in lexicographic (α, β, γ) order.
    pub fn grid() -> impl Iterator<Item = SmoothingParams> {
        Self::grid_over(&GRID)
    }

    /// The cube `values³` in lexicographic order.
    pub fn grid_over(values: &[f64]) -> impl Iterator<Item = SmoothingParams> + '_ {
        values.iter().flat_map(move |&alpha| {
            values.iter().flat_map(move |&beta| {
                values
                    .iter()
                    .map(move |&gamma| SmoothingParams { alpha, beta, gamma })
            })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoltWintersState {
    pub level: f64,
    pub trend: f64,
    pub seasonal: [f64; SEASON],
    pub season_index: usize,
}

impl HoltWintersState {
    /// Checks the positivity and indexing invariants.
    pub fn is_valid(&self) -> bool {
        self.level >= EPS
            && self.trend >= EPS
            && self.level.is_finite()
            && self.trend.is_finite()
            && self.seasonal.iter().all(|s| s.is_finite())
            && self.season_index < SEASON
    }

    /// One-step-ahead prediction from this state.
    pub fn one_step(&self) -> f64 {
        (self.level * self.trend + self.seasonal[self.season_index]).max(EPS)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastSeries {
    pub start: Day,
    pub values: Vec<f64>,
}

impl ForecastSeries {
    pub fn date_of(&self, idx: usize) -> Day {
        self.start + idx as i32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingWindow {
    pub series: DailySeries,
    pub end_date: Day,
}

/// Floors counts at 1 for fitting; reported values stay raw.
pub fn floor_rule(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| v.max(1.0)).collect()
}

/// Training data: every day up to `offset_days` after the region's first
/// intervention, inclusive.
pub fn training_window(
    series: &DailySeries,
    events: &[InterventionEvent],
    offset_days: i32,
) -> Result<TrainingWindow> {
    let first = events
        .iter()
        .filter(|e| e.region == series.region)
        .map(|e| e.date)
        .min()
        .ok_or(Error::NoInterventions)?;
    let end_date = first + offset_days;
    if end_date > series.end() || end_date < series.start {
        return Err(Error::InsufficientData {
            end: end_date,
            last: series.end(),
        });
    }
    Ok(TrainingWindow {
        series: series.between(series.start, end_date),
        end_date,
    })
}

/// Two-week initialisation: level from week one, trend from the ratio of
/// weekly means, season from week-one deviations.
pub fn init_state(train: &[f64]) -> Result<HoltWintersState> {
    if train.len() < 2 * SEASON {
        return Err(Error::TooShort {
            needed: 2 * SEASON,
            got: train.len(),
        });
    }
    if train.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let week1 = train[..SEASON].iter().sum::<f64>() / SEASON as f64;
    let week2 = train[SEASON..2 * SEASON].iter().sum::<f64>() / SEASON as f64;
    let level = week1.max(1.0);
    let trend = if week1 > 0.0 {
        (week2 / week1).max(0.0).powf(1.0 / SEASON as f64).max(EPS)
    } else {
        1.0
    };
    let mut seasonal = [0.0; SEASON];
    for (s, y) in seasonal.iter_mut().zip(train) {
        *s = y - level;
    }
    Ok(HoltWintersState {
        level,
        trend,
        seasonal,
        season_index: 0,
    })
}

/// One smoothing step. Written in error-correction form, which is
/// algebraically the textbook recursion but keeps fixed points exact.
pub fn hw_update(
    state: &HoltWintersState,
    y: f64,
    p: &SmoothingParams,
) -> Result<HoltWintersState> {
    if !y.is_finite() {
        return Err(Error::NonFinite);
    }
    let idx = state.season_index;
    let s_old = state.seasonal[idx];
    let projected = state.level * state.trend;
    let level = (projected + p.alpha * (y - s_old - projected)).max(EPS);
    let trend = (state.trend + p.beta * (level / state.level - state.trend)).max(EPS);
    let mut seasonal = state.seasonal;
    seasonal[idx] = s_old + p.gamma * (y - projected - s_old);
    let next = HoltWintersState {
        level,
        trend,
        seasonal,
        season_index: (idx + 1) % SEASON,
    };
    // A level clamped to ε followed by a large observation can blow the
    // trend ratio up until the state overflows.
    if !next.is_valid() {
        return Err(Error::NonFinite);
    }
    Ok(next)
}

/// ŷ_{t+h} = max(ℓ·b^h + s_{(idx+h−1) mod 7}, ε) for h = 1..=horizon.
pub fn hw_forecast(state: &HoltWintersState, horizon: usize) -> Vec<f64> {
    let mut growth = 1.0;
    (1..=horizon)
        .map(|h| {
            growth *= state.trend;
            let s = state.seasonal[(state.season_index + h - 1) % SEASON];
            (state.level * growth + s).max(EPS)
        })
        .collect()
}

/// Runs the recursions over `ys` from a given state, recording the
/// one-step-ahead prediction made before each observation.
pub fn fit_from_state(
    state: HoltWintersState,
    ys: &[f64],
    p: &SmoothingParams,
) -> Result<(Vec<f64>, HoltWintersState)> {
    let mut state = state;
    let mut one_step = Vec::with_capacity(ys.len());
    for &y in ys {
        one_step.push(state.one_step());
        state = hw_update(&state, y, p)?;
    }
    Ok((one_step, state))
}

/// Initialises on `train` and smooths over all of it.
pub fn fit(train: &[f64], p: &SmoothingParams) -> Result<(Vec<f64>, HoltWintersState)> {
    fit_from_state(init_state(train)?, train, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub params: SmoothingParams,
    /// Mean SMAPE of the 3-step forecast on the validation days.
    pub score: f64,
    pub candidates: usize,
}

fn candidate_score(
    init: &HoltWintersState,
    train: &[f64],
    validation: &[f64],
    p: &SmoothingParams,
) -> Result<Option<f64>> {
    let state = match fit_from_state(*init, train, p) {
        Ok((_, state)) => state,
        Err(Error::NonFinite) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut score = 0.0;
    for (a, f) in validation.iter().zip(hw_forecast(&state, VALIDATION_DAYS)) {
        match smape(*a, f) {
            Ok(v) => score += v,
            Err(Error::NonFinite) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(score / VALIDATION_DAYS as f64))
}

/// Exhaustive search over the 9×9×9 grid. `train` is fitted as given
/// (callers apply [`floor_rule`]); `validation` holds the raw counts of the
/// three following days.
pub fn grid_search(train: &[f64], validation: &[f64]) -> Result<GridResult> {
    grid_search_over(train, validation, &GRID)
}

/// As [`grid_search`] over a custom set of per-parameter values, which are
/// sorted ascending so the tie-break stays lexicographic.
pub fn grid_search_over(train: &[f64], validation: &[f64], values: &[f64]) -> Result<GridResult> {
    if values.is_empty() || values.iter().any(|v| !(*v > 0.0 && *v < 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "grid values {values:?} must lie in (0, 1)"
        )));
    }
    let mut values = values.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    if validation.len() != VALIDATION_DAYS {
        return Err(Error::ValidationLength {
            expected: VALIDATION_DAYS,
            got: validation.len(),
        });
    }
    let init = init_state(train)?;
    let mut best: Option<(SmoothingParams, f64)> = None;
    let mut candidates = 0;
    for p in SmoothingParams::grid_over(&values) {
        candidates += 1;
        // Candidates whose recursion overflows are skipped.
        let Some(score) = candidate_score(&init, train, validation, &p)? else {
            continue;
        };
        match best {
            Some((_, b)) if score >= b - TIE_EPS => {}
            _ => best = Some((p, score)),
        }
    }
    let (params, score) = best.ok_or(Error::NonFinite)?;
    Ok(GridResult {
        params,
        score,
        candidates,
    })
}
