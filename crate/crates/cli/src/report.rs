//! Plain-text summary of a detect run (and regression, when present).

use std::fmt::Write;
use std::path::Path;

use anyhow::{Context, Result};

use crate::detect::{read_regions, REGIONS_FILE};

pub fn summary(detect_dir: &Path, regression: Option<&Path>) -> Result<String> {
    let rows = read_regions(&detect_dir.join(REGIONS_FILE))?;
    let mut s = String::new();
    let detected = rows.iter().filter(|r| r.drift_date.is_some()).count();
    let _ = writeln!(s, "{} regions, {} with a detected drift\n", rows.len(), detected);
    let _ = writeln!(s, "{:<28} {:<12} {:<12} note", "region", "drift", "threshold");
    for r in &rows {
        let d = |x: Option<driftlag_core::Day>| x.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:<28} {:<12} {:<12} {}",
            r.region.to_string(),
            d(r.drift_date),
            d(r.threshold_date),
            r.exclusion.as_deref().unwrap_or("")
        );
    }

    let text = std::fs::read_to_string(detect_dir.join("lag_summary.csv")).context("reading lag_summary.csv")?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let _ = writeln!(s, "\n{:<24} {:>10} {:>10} {:>4}", "intervention", "mean lag", "sd", "n");
    for rec in rdr.records() {
        let rec = rec?;
        let _ = writeln!(s, "{:<24} {:>10} {:>10} {:>4}", &rec[0], &rec[1], &rec[2], &rec[3]);
    }

    if let Some(dir) = regression {
        let path = dir.join("regression.json");
        let v: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?,
        )?;
        let m = &v["report"]["metrics"];
        let _ = writeln!(
            s,
            "\nnested CV: MAE {} RMSE {} R2 {}; lambdas {}",
            m["mae"], m["rmse"], m["r2"], v["report"]["per_fold_lambda"]
        );
    }
    Ok(s)
}
