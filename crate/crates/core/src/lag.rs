//! Time lags between interventions and detected drift, reaction times
//! relative to the death threshold, and the regression design matrix.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{InterventionEvent, RegionMeta};
use crate::date::Day;
use crate::drift::DriftResult;
use crate::error::{Error, Result};
use crate::region::{InterventionKind, RegionId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagRecord {
    pub region: RegionId,
    pub kind: InterventionKind,
    pub npi_date: Day,
    pub drift_date: Day,
    /// drift − npi; positive when the intervention came first.
    pub lag_days: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSummary {
    pub kind: InterventionKind,
    pub mean_days: f64,
    /// Sample standard deviation; 0 for a single record.
    pub sd_days: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReactionTime {
    pub region: RegionId,
    pub kind: InterventionKind,
    /// npi − threshold; negative when acting before the threshold.
    pub days: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegressionTarget {
    pub region: RegionId,
    /// drift − threshold.
    pub days: i32,
}

pub fn compute_lags(drift: &DriftResult, events: &[InterventionEvent]) -> Result<Vec<LagRecord>> {
    let drift_date = drift.drift_date.ok_or(Error::NoDrift)?;
    Ok(events
        .iter()
        .map(|e| LagRecord {
            region: e.region.clone(),
            kind: e.kind,
            npi_date: e.date,
            drift_date,
            lag_days: drift_date - e.date,
        })
        .collect())
}

/// Mean and sample standard deviation per kind, in [`InterventionKind::ALL`] order.
pub fn summarize_lags(records: &[LagRecord]) -> Result<Vec<LagSummary>> {
    if records.is_empty() {
        return Err(Error::Empty);
    }
    let mut groups: BTreeMap<InterventionKind, Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry(r.kind).or_default().push(r.lag_days as f64);
    }
    Ok(InterventionKind::ALL
        .iter()
        .filter_map(|k| groups.get(k).map(|v| (*k, v)))
        .map(|(kind, v)| {
            let n = v.len();
            let mean = v.iter().sum::<f64>() / n as f64;
            let sd = if n > 1 {
                (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            LagSummary {
                kind,
                mean_days: mean,
                sd_days: sd,
                n,
            }
        })
        .collect())
}

pub fn reaction_time(
    event: &InterventionEvent,
    threshold_date: Option<Day>,
) -> Result<ReactionTime> {
    let threshold = threshold_date.ok_or(Error::ThresholdNotReached)?;
    Ok(ReactionTime {
        region: event.region.clone(),
        kind: event.kind,
        days: event.date - threshold,
    })
}

/// Everything the regression needs to know about one region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionOutcome {
    pub region: RegionId,
    pub drift_date: Option<Day>,
    pub threshold_date: Option<Day>,
    pub events: Vec<InterventionEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionDataset {
    pub regions: Vec<RegionId>,
    /// Row-major, one row per region.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub names: Vec<String>,
    /// Regions left out, with the reason.
    pub dropped: Vec<(RegionId, String)>,
}

pub fn feature_names() -> Vec<String> {
    InterventionKind::REGRESSORS
        .iter()
        .map(|k| format!("reaction_{}", k.as_str()))
        .chain(RegionMeta::FEATURE_NAMES.iter().map(|s| s.to_string()))
        .collect()
}

/// Builds the 13-column design: four reaction times (mask wearing is never
/// a regressor) followed by the nine metadata columns. Regions lacking any of
/// the four interventions, a drift or a threshold date are dropped and
/// listed; a region that qualifies but has no metadata row is an error.
pub fn regression_dataset(
    outcomes: &[RegionOutcome],
    meta: &BTreeMap<RegionId, RegionMeta>,
) -> Result<RegressionDataset> {
    let mut ds = RegressionDataset {
        regions: Vec::new(),
        x: Vec::new(),
        y: Vec::new(),
        names: feature_names(),
        dropped: Vec::new(),
    };
    for o in outcomes {
        let (Some(drift), Some(threshold)) = (o.drift_date, o.threshold_date) else {
            let why = if o.drift_date.is_none() {
                "no drift"
            } else {
                "death threshold not reached"
            };
            ds.dropped.push((o.region.clone(), why.into()));
            continue;
        };
        let mut row = Vec::with_capacity(13);
        let mut missing = None;
        for kind in InterventionKind::REGRESSORS {
            match o.events.iter().find(|e| e.kind == kind) {
                Some(e) => row.push(reaction_time(e, Some(threshold))?.days as f64),
                None => {
                    missing = Some(kind);
                    break;
                }
            }
        }
        if let Some(kind) = missing {
            ds.dropped
                .push((o.region.clone(), format!("no {} event", kind.as_str())));
            continue;
        }
        let m = meta
            .get(&o.region)
            .ok_or_else(|| Error::MissingMetadata(o.region.to_string()))?;
        row.extend(m.features());
        ds.regions.push(o.region.clone());
        ds.x.push(row);
        ds.y.push((drift - threshold) as f64);
    }
    Ok(ds)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskRow {
    pub region: RegionId,
    pub drift_date: Day,
    pub mask_date: Day,
    /// mask − drift; positive when masks came after the drift.
    pub days_after_drift: i32,
}

pub fn mask_rows(records: &[LagRecord]) -> Vec<MaskRow> {
    records
        .iter()
        .filter(|r| r.kind == InterventionKind::MaskWearing)
        .map(|r| MaskRow {
            region: r.region.clone(),
            drift_date: r.drift_date,
            mask_date: r.npi_date,
            days_after_drift: -r.lag_days,
        })
        .collect()
}
