//! The `regress` stage: reaction-time design matrix and nested-CV Lasso.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use driftlag_core::data::{load_region_meta, RegionMeta};
use driftlag_core::lag::{regression_dataset, RegionOutcome, RegressionDataset};
use driftlag_core::lasso::{nested_cv, FeatureMatrix, NestedCvReport};
use serde::Serialize;

use crate::config::RunConfig;
use crate::detect::{read_regions, RegionRow, REGIONS_FILE};
use crate::output::write_text;

/// Penalised objective minimised by every fit, stated in the output
/// because the scaling changes what λ means.
pub const OBJECTIVE: &str = "(1/(2n))*||y - b0 - X*b||^2 + lambda*||b||_1 on standardised X";

#[derive(Debug, Clone, Serialize)]
pub struct RegressionOutput {
    pub seed: u64,
    pub config: RunConfig,
    pub objective: &'static str,
    pub dataset: RegressionDataset,
    pub report: NestedCvReport,
}

/// Builds the design matrix; regions without a metadata row are dropped and
/// listed instead of failing the run.
pub fn build_dataset(rows: &[RegionRow], meta: &BTreeMap<driftlag_core::RegionId, RegionMeta>) -> Result<RegressionDataset> {
    let mut missing = Vec::new();
    let outcomes: Vec<RegionOutcome> = rows
        .iter()
        .filter_map(|r| {
            let o = RegionOutcome {
                region: r.region.clone(),
                drift_date: r.drift_date,
                threshold_date: r.threshold_date,
                events: r.events.clone(),
            };
            if meta.contains_key(&r.region) {
                Some(o)
            } else {
                missing.push((r.region.clone(), "no metadata".to_string()));
                None
            }
        })
        .collect();
    let mut ds = regression_dataset(&outcomes, meta)?;
    ds.dropped.extend(missing);
    ds.dropped.sort();
    Ok(ds)
}

pub fn regress(rows: &[RegionRow], meta: &BTreeMap<driftlag_core::RegionId, RegionMeta>, cfg: &RunConfig) -> Result<RegressionOutput> {
    let dataset = build_dataset(rows, meta)?;
    let x = FeatureMatrix::from_rows(&dataset.x, dataset.names.clone())?;
    let report = nested_cv(&x, &dataset.y, &cfg.regression, cfg.seed)
        .with_context(|| format!("nested CV on {} rows", dataset.y.len()))?;
    Ok(RegressionOutput {
        seed: cfg.seed,
        config: cfg.clone(),
        objective: OBJECTIVE,
        dataset,
        report,
    })
}

pub fn run_regress(cfg: &RunConfig, detect_dir: &Path) -> Result<RegressionOutput> {
    let rows = read_regions(&detect_dir.join(REGIONS_FILE))?;
    let meta_path = cfg.meta.as_ref().context("regression needs a metadata file (--meta)")?;
    let text = std::fs::read_to_string(meta_path).with_context(|| format!("reading {}", meta_path.display()))?;
    let meta = load_region_meta(&text)?;
    regress(&rows, &meta, cfg)
}

pub fn write_regress(out: &RegressionOutput, dir: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(out)?;
    write_text(&dir.join("regression.json"), &(json + "\n"))
}
