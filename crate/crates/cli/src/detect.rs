//! The `detect` stage: per-region drift detection, lags and their outputs.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use anyhow::{Context, Result};
use driftlag_core::data::{
    death_threshold_date_at, load_interventions, load_region_meta, parse_jhu, to_daily, us_states_above, AliasMap,
    CumulativeSeries, DailySeries, InterventionEvent, Measure, RegionMeta,
};
use driftlag_core::forecast::SmoothingParams;
use driftlag_core::lag::{compute_lags, mask_rows, summarize_lags, LagRecord, LagSummary, MaskRow};
use driftlag_core::pipeline::{run_series, SeriesRun};
use driftlag_core::{Day, Error, InterventionKind, RegionId, RegionKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::render_chart;
use crate::config::RunConfig;
use crate::output::{write_csv, write_text};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub region: RegionId,
    pub first_npi: Option<Day>,
    pub window_end: Option<Day>,
    pub params: Option<SmoothingParams>,
    pub grid_score: Option<f64>,
    pub drift_date: Option<Day>,
    pub alarm_index: Option<usize>,
    pub threshold_date: Option<Day>,
    pub events: Vec<InterventionEvent>,
    pub lags: Vec<LagRecord>,
    /// Why the region has no drift date; set exactly when `drift_date` is not.
    pub exclusion: Option<String>,
}

impl RegionReport {
    fn new(region: RegionId) -> Self {
        RegionReport {
            region,
            first_npi: None,
            window_end: None,
            params: None,
            grid_score: None,
            drift_date: None,
            alarm_index: None,
            threshold_date: None,
            events: Vec::new(),
            lags: Vec::new(),
            exclusion: None,
        }
    }

    pub fn event_date(&self, kind: InterventionKind) -> Option<Day> {
        self.events.iter().find(|e| e.kind == kind).map(|e| e.date)
    }
}

/// A report plus the series behind it, kept for traces and charts.
#[derive(Debug, Clone)]
pub struct RegionRun {
    pub report: RegionReport,
    pub daily: Option<DailySeries>,
    pub series_run: Option<SeriesRun>,
}

#[derive(Debug, Clone)]
pub struct DetectRun {
    pub regions: Vec<RegionRun>,
    pub lags: Vec<LagRecord>,
    pub summary: Vec<LagSummary>,
    pub masks: Vec<MaskRow>,
}

impl DetectRun {
    pub fn report(&self, region: &RegionId) -> Option<&RegionReport> {
        self.regions.iter().map(|r| &r.report).find(|r| &r.region == region)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub cases: BTreeMap<RegionId, CumulativeSeries>,
    pub deaths: BTreeMap<RegionId, CumulativeSeries>,
    pub events: Vec<InterventionEvent>,
    pub meta: BTreeMap<RegionId, RegionMeta>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_all(paths: &[std::path::PathBuf], measure: Measure) -> Result<BTreeMap<RegionId, CumulativeSeries>> {
    let mut out = BTreeMap::new();
    for p in paths {
        let parsed = parse_jhu(&read(p)?, measure).with_context(|| format!("parsing {}", p.display()))?;
        out.extend(parsed);
    }
    Ok(out)
}

pub fn load_inputs(cfg: &RunConfig) -> Result<Inputs> {
    anyhow::ensure!(!cfg.cases.is_empty(), "no case files given");
    let mut inputs = Inputs {
        cases: parse_all(&cfg.cases, Measure::Cases)?,
        deaths: parse_all(&cfg.deaths, Measure::Deaths)?,
        ..Inputs::default()
    };
    if let Some(p) = &cfg.npis {
        inputs.events = load_interventions(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
    }
    if let Some(p) = &cfg.meta {
        inputs.meta = load_region_meta(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
    }
    if let Some(p) = &cfg.aliases {
        let aliases = AliasMap::parse(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
        inputs.cases = aliases.apply_series(inputs.cases);
        inputs.deaths = aliases.apply_series(inputs.deaths);
        inputs.events = aliases.apply_events(inputs.events);
    }
    Ok(inputs)
}

/// Regions named in the intervention or metadata files (or the explicit
/// filter). US states are kept only above the case cutoff; explicitly
/// requested states below it are still reported, as exclusions.
pub fn select_regions(inputs: &Inputs, cfg: &RunConfig) -> Result<(Vec<RegionId>, BTreeSet<RegionId>)> {
    let filter = cfg.region_filter()?;
    let above = us_states_above(&inputs.cases, cfg.us_case_cutoff, cfg.us_cutoff_date);
    let below = |r: &RegionId| r.kind == RegionKind::UsState && !above.contains(r);
    if !filter.is_empty() {
        let below_set = filter.iter().filter(|r| below(r)).cloned().collect();
        let unique: BTreeSet<RegionId> = filter.into_iter().collect();
        return Ok((unique.into_iter().collect(), below_set));
    }
    let universe: BTreeSet<RegionId> =
        inputs.events.iter().map(|e| e.region.clone()).chain(inputs.meta.keys().cloned()).collect();
    Ok((universe.into_iter().filter(|r| !below(r)).collect(), BTreeSet::new()))
}

pub fn process_region(region: &RegionId, inputs: &Inputs, cfg: &RunConfig, below_cutoff: bool) -> RegionRun {
    let mut report = RegionReport::new(region.clone());
    let mut events: Vec<InterventionEvent> = inputs.events.iter().filter(|e| &e.region == region).cloned().collect();
    events.sort_by_key(|e| (e.date, e.kind));
    report.events = events;
    report.first_npi = report.events.iter().map(|e| e.date).min();
    if let (Some(deaths), Some(meta)) = (inputs.deaths.get(region), inputs.meta.get(region)) {
        report.threshold_date = death_threshold_date_at(deaths, meta.population, cfg.death_threshold);
    }
    let mut run = RegionRun { report, daily: None, series_run: None };

    if below_cutoff {
        run.report.exclusion = Some(format!(
            "at most {} cumulative cases on {}",
            cfg.us_case_cutoff, cfg.us_cutoff_date
        ));
        return run;
    }
    let Some(cases) = inputs.cases.get(region) else {
        run.report.exclusion = Some("no case data".into());
        return run;
    };
    let daily = match to_daily(cases) {
        Ok(d) => d,
        Err(e) => {
            run.report.exclusion = Some(e.to_string());
            return run;
        }
    };
    let Some(first_npi) = run.report.first_npi else {
        run.report.exclusion = Some(Error::NoInterventions.to_string());
        run.daily = Some(daily);
        return run;
    };
    let raw: Vec<f64> = daily.values.iter().map(|&v| v as f64).collect();
    match run_series(daily.start, &raw, first_npi, &cfg.pipeline()) {
        Ok(sr) => {
            run.report.window_end = Some(sr.window_end);
            run.report.params = Some(sr.grid.params);
            run.report.grid_score = Some(sr.grid.score);
            run.report.drift_date = sr.drift.drift_date;
            run.report.alarm_index = sr.drift.alarm_index;
            match compute_lags(&sr.drift, &run.report.events) {
                Ok(lags) => run.report.lags = lags,
                Err(e) => run.report.exclusion = Some(e.to_string()),
            }
            run.series_run = Some(sr);
        }
        Err(e) => run.report.exclusion = Some(e.to_string()),
    }
    run.daily = Some(daily);
    run
}

pub fn detect(inputs: &Inputs, cfg: &RunConfig) -> Result<DetectRun> {
    cfg.validate()?;
    let (regions, below) = select_regions(inputs, cfg)?;
    let runs: Vec<RegionRun> =
        regions.par_iter().map(|r| process_region(r, inputs, cfg, below.contains(r))).collect();
    let lags: Vec<LagRecord> = runs.iter().flat_map(|r| r.report.lags.iter().cloned()).collect();
    let summary = match summarize_lags(&lags) {
        Ok(s) => s,
        Err(Error::Empty) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let masks = mask_rows(&lags);
    Ok(DetectRun { regions: runs, lags, summary, masks })
}

pub fn run_detect(cfg: &RunConfig) -> Result<DetectRun> {
    detect(&load_inputs(cfg)?, cfg)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const REGIONS_FILE: &str = "regions.csv";

pub fn write_detect(run: &DetectRun, cfg: &RunConfig, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out.join("traces"))?;
    std::fs::create_dir_all(out.join("charts"))?;
    let header = cfg.csv_header();

    let mut head = vec![
        "region", "status", "exclusion", "first_npi", "window_end", "alpha", "beta", "gamma", "grid_score",
        "drift_date", "alarm_index", "threshold_date",
    ];
    head.extend(InterventionKind::ALL.iter().map(|k| k.as_str()));
    let rows = run.regions.iter().map(|r| {
        let rep = &r.report;
        let mut row = vec![
            rep.region.to_string(),
            if rep.drift_date.is_some() { "ok" } else { "excluded" }.to_string(),
            rep.exclusion.clone().unwrap_or_default(),
            opt(rep.first_npi),
            opt(rep.window_end),
            opt(rep.params.map(|p| p.alpha)),
            opt(rep.params.map(|p| p.beta)),
            opt(rep.params.map(|p| p.gamma)),
            opt(rep.grid_score.map(|s| format!("{s:.6}"))),
            opt(rep.drift_date),
            opt(rep.alarm_index),
            opt(rep.threshold_date),
        ];
        row.extend(InterventionKind::ALL.iter().map(|&k| opt(rep.event_date(k))));
        row
    });
    write_csv(&out.join(REGIONS_FILE), &header, &head, rows)?;

    write_csv(
        &out.join("lags.csv"),
        &header,
        &["region", "kind", "npi_date", "drift_date", "lag_days"],
        run.lags.iter().map(|l| {
            vec![
                l.region.to_string(),
                l.kind.as_str().to_string(),
                l.npi_date.to_string(),
                l.drift_date.to_string(),
                l.lag_days.to_string(),
            ]
        }),
    )?;

    write_csv(
        &out.join("lag_summary.csv"),
        &header,
        &["kind", "mean_days", "sd_days", "n"],
        run.summary.iter().map(|s| {
            vec![
                s.kind.as_str().to_string(),
                format!("{:.4}", s.mean_days),
                format!("{:.4}", s.sd_days),
                s.n.to_string(),
            ]
        }),
    )?;

    write_csv(
        &out.join("mask_report.csv"),
        &header,
        &["region", "drift_date", "mask_date", "days_after_drift"],
        run.masks.iter().map(|m| {
            vec![
                m.region.to_string(),
                m.drift_date.to_string(),
                m.mask_date.to_string(),
                m.days_after_drift.to_string(),
            ]
        }),
    )?;

    let echo = cfg.echo_json();
    for r in &run.regions {
        let slug = r.report.region.slug();
        if let (Some(daily), Some(sr)) = (&r.daily, &r.series_run) {
            write_csv(
                &out.join("traces").join(format!("{slug}.csv")),
                &header,
                &["date", "actual", "forecast", "smape", "ph_stat", "alarm"],
                sr.forecast.values.iter().enumerate().map(|(i, f)| {
                    let date = sr.forecast.date_of(i);
                    let actual = daily.index_of(date).map(|k| daily.values[k]).unwrap_or_default();
                    vec![
                        date.to_string(),
                        actual.to_string(),
                        format!("{f:.6}"),
                        format!("{:.6}", sr.drift.smape_trace[i]),
                        format!("{:.6}", sr.drift.ph_trace[i]),
                        u8::from(sr.drift.alarm_index == Some(i + 1)).to_string(),
                    ]
                }),
            )?;
        }
        if let Some(daily) = &r.daily {
            let svg = render_chart(&r.report, daily, r.series_run.as_ref(), cfg.seed, &echo);
            write_text(&out.join("charts").join(format!("{slug}.svg")), &svg)?;
        }
    }
    Ok(())
}

/// One region's row as read back from `regions.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionRow {
    pub region: RegionId,
    pub drift_date: Option<Day>,
    pub threshold_date: Option<Day>,
    pub events: Vec<InterventionEvent>,
    pub exclusion: Option<String>,
}

pub fn read_regions(path: &Path) -> Result<Vec<RegionRow>> {
    let text = read(path)?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("{} lacks column {name}", path.display()))
    };
    let (c_region, c_drift, c_threshold, c_excl) =
        (col("region")?, col("drift_date")?, col("threshold_date")?, col("exclusion")?);
    let kind_cols: Vec<(InterventionKind, usize)> =
        InterventionKind::ALL.iter().map(|&k| col(k.as_str()).map(|c| (k, c))).collect::<Result<_>>()?;
    let date = |s: &str| -> Result<Option<Day>> {
        if s.is_empty() {
            Ok(None)
        } else {
            Ok(Some(s.parse()?))
        }
    };
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let region: RegionId = rec[c_region].parse()?;
        let mut events = Vec::new();
        for &(kind, c) in &kind_cols {
            if let Some(d) = date(&rec[c])? {
                events.push(InterventionEvent { region: region.clone(), kind, date: d });
            }
        }
        out.push(RegionRow {
            drift_date: date(&rec[c_drift])?,
            threshold_date: date(&rec[c_threshold])?,
            exclusion: Some(rec[c_excl].to_string()).filter(|s| !s.is_empty()),
            events,
            region,
        });
    }
    Ok(out)
}
