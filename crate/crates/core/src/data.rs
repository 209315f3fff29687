//! Case/death series, intervention tables and region metadata.
//!
//! Readers accept the wide JHU CSSE time-series layouts (global and US) and
//! the artifact's own `interventions.csv`, `region_meta.csv` and
//! `aliases.csv` files. Everything is parsed from in-memory text; file IO is
//! left to the caller.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::date::Day;
use crate::error::{Error, Result};
use crate::region::{InterventionKind, RegionId, RegionKind};

const GLOBAL_PREFIX: [&str; 4] = ["Province/State", "Country/Region", "Lat", "Long"];

/// Default per-capita death threshold (one death per million inhabitants).
pub const DEATHS_PER_CAPITA_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    Cases,
    Deaths,
}

/// Cumulative counts, one value per day with no gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeSeries {
    pub region: RegionId,
    pub start: Day,
    pub values: Vec<u64>,
    pub measure: Measure,
}

impl CumulativeSeries {
    pub fn end(&self) -> Day {
        self.start + (self.values.len() as i32 - 1)
    }

    pub fn value_on(&self, day: Day) -> Option<u64> {
        let idx = day - self.start;
        (idx >= 0)
            .then(|| self.values.get(idx as usize).copied())
            .flatten()
    }
}

/// Daily new counts derived from a cumulative series.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeries {
    pub region: RegionId,
    pub start: Day,
    pub values: Vec<u64>,
    /// Indices where a negative first difference was clamped to zero.
    pub clamped_days: Vec<usize>,
}

impl DailySeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end(&self) -> Day {
        self.start + (self.values.len() as i32 - 1)
    }

    pub fn date_of(&self, idx: usize) -> Day {
        self.start + idx as i32
    }

    pub fn index_of(&self, day: Day) -> Option<usize> {
        let idx = day - self.start;
        (idx >= 0 && (idx as usize) < self.values.len()).then_some(idx as usize)
    }

    /// Inclusive date range `[from, to]`, clipped to the available data.
    pub fn between(&self, from: Day, to: Day) -> DailySeries {
        let lo = (from - self.start).clamp(0, self.values.len() as i32) as usize;
        let hi = ((to - self.start) + 1).clamp(lo as i32, self.values.len() as i32) as usize;
        DailySeries {
            region: self.region.clone(),
            start: self.start + lo as i32,
            values: self.values[lo..hi].to_vec(),
            clamped_days: self
                .clamped_days
                .iter()
                .filter(|&&i| i >= lo && i < hi)
                .map(|i| i - lo)
                .collect(),
        }
    }

    /// Values as reals, floored at 1 for the multiplicative-trend model.
    pub fn floored(&self) -> Vec<f64> {
        self.values.iter().map(|&v| (v as f64).max(1.0)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterventionEvent {
    pub region: RegionId,
    pub kind: InterventionKind,
    pub date: Day,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMeta {
    pub region: RegionId,
    pub population: u64,
    pub density_per_km2: f64,
    pub urban_share: f64,
    pub gdp_per_capita_usd: f64,
    pub gini: f64,
    pub health_exp_per_capita_usd: f64,
    pub hospital_beds_per_100k: f64,
    pub avg_temp_march_2020_c: f64,
    pub household_size: f64,
}

impl RegionMeta {
    pub const FEATURE_NAMES: [&'static str; 9] = [
        "population",
        "density_per_km2",
        "urban_share",
        "gdp_per_capita_usd",
        "gini",
        "health_exp_per_capita_usd",
        "hospital_beds_per_100k",
        "avg_temp_march_2020_c",
        "household_size",
    ];

    pub fn features(&self) -> [f64; 9] {
        [
            self.population as f64,
            self.density_per_km2,
            self.urban_share,
            self.gdp_per_capita_usd,
            self.gini,
            self.health_exp_per_capita_usd,
            self.hospital_beds_per_100k,
            self.avg_temp_march_2020_c,
            self.household_size,
        ]
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn parse_count(cell: &str, line: u64) -> Result<i64> {
    let cell = cell.trim();
    let non_numeric = || Error::NonNumericCell {
        line,
        value: cell.to_string(),
    };
    if let Ok(v) = cell.parse::<i64>() {
        return Ok(v);
    }
    // Some exports write integral counts as `12.0`.
    let v: f64 = cell.parse().map_err(|_| non_numeric())?;
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 9e15 {
        Ok(v as i64)
    } else {
        Err(non_numeric())
    }
}

/// Parses date headers and checks that consecutive columns are one day apart.
fn contiguous_dates(headers: &[&str]) -> Result<Day> {
    let first = headers
        .first()
        .ok_or_else(|| Error::MalformedHeader("no date columns".into()))?;
    let start = Day::parse_mdy(first)
        .map_err(|_| Error::MalformedHeader(format!("bad date column {first:?}")))?;
    let mut prev = start;
    for (pair, h) in headers.windows(2).zip(headers.iter().skip(1)) {
        let d = Day::parse_mdy(h)
            .map_err(|_| Error::MalformedHeader(format!("bad date column {h:?}")))?;
        if d != prev + 1 {
            return Err(Error::NonContiguousDates {
                prev: pair[0].to_string(),
                next: h.to_string(),
            });
        }
        prev = d;
    }
    Ok(start)
}

type Partial = BTreeMap<RegionId, (Day, Vec<i64>)>;

// Individual rows may carry small negative corrections (JHU has a few);
// only the aggregated region total must be non-negative.
fn accumulate(out: &mut Partial, region: RegionId, start: Day, values: Vec<i64>) {
    match out.entry(region) {
        Entry::Vacant(e) => {
            e.insert((start, values));
        }
        Entry::Occupied(mut e) => {
            for (acc, v) in e.get_mut().1.iter_mut().zip(values) {
                *acc += v;
            }
        }
    }
}

fn finish(partial: Partial, measure: Measure) -> Result<BTreeMap<RegionId, CumulativeSeries>> {
    partial
        .into_iter()
        .map(|(region, (start, values))| {
            let values = values
                .into_iter()
                .map(|v| {
                    u64::try_from(v).map_err(|_| Error::InvalidRow {
                        line: 0,
                        message: format!("negative cumulative total {v} for {region}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let series = CumulativeSeries {
                region: region.clone(),
                start,
                values,
                measure,
            };
            Ok((region, series))
        })
        .collect()
}

/// Reads the JHU CSSE global wide layout; rows sharing a `Country/Region`
/// are summed into one country series.
pub fn parse_jhu_global(
    csv_text: &str,
    measure: Measure,
) -> Result<BTreeMap<RegionId, CumulativeSeries>> {
    let mut rdr = reader(csv_text);
    let headers = rdr.headers()?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.len() < 5 || cols[..4] != GLOBAL_PREFIX {
        return Err(Error::MalformedHeader(format!(
            "expected {} followed by dates",
            GLOBAL_PREFIX.join(",")
        )));
    }
    let start = contiguous_dates(&cols[4..])?;
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::InvalidRow {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let region =
            RegionId::new(&rec[1], RegionKind::Country).map_err(|_| Error::InvalidRow {
                line,
                message: "empty Country/Region".into(),
            })?;
        let values = rec
            .iter()
            .skip(4)
            .map(|c| parse_count(c, line))
            .collect::<Result<Vec<_>>>()?;
        accumulate(&mut out, region, start, values);
    }
    finish(out, measure)
}

/// Reads the JHU CSSE US wide layout (county rows); rows are summed to
/// state level by `Province_State`. Date columns are the trailing run of
/// `M/D/YY` headers, so the extra `Population` column of the deaths file is
/// skipped.
pub fn parse_jhu_us(
    csv_text: &str,
    measure: Measure,
) -> Result<BTreeMap<RegionId, CumulativeSeries>> {
    let mut rdr = reader(csv_text);
    let headers = rdr.headers()?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    let state_col = cols
        .iter()
        .position(|&c| c == "Province_State")
        .ok_or_else(|| Error::MalformedHeader("missing Province_State column".into()))?;
    let first_date = cols
        .iter()
        .position(|c| Day::parse_mdy(c).is_ok())
        .ok_or_else(|| Error::MalformedHeader("no date columns".into()))?;
    if first_date <= state_col {
        return Err(Error::MalformedHeader(
            "date columns must follow Province_State".into(),
        ));
    }
    let start = contiguous_dates(&cols[first_date..])?;
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::InvalidRow {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let region =
            RegionId::new(&rec[state_col], RegionKind::UsState).map_err(|_| Error::InvalidRow {
                line,
                message: "empty Province_State".into(),
            })?;
        let values = rec
            .iter()
            .skip(first_date)
            .map(|c| parse_count(c, line))
            .collect::<Result<Vec<_>>>()?;
        accumulate(&mut out, region, start, values);
    }
    finish(out, measure)
}

/// Dispatches on the header: global files start with `Province/State`.
pub fn parse_jhu(csv_text: &str, measure: Measure) -> Result<BTreeMap<RegionId, CumulativeSeries>> {
    if csv_text
        .trim_start_matches('\u{feff}')
        .starts_with("Province/State")
    {
        parse_jhu_global(csv_text, measure)
    } else {
        parse_jhu_us(csv_text, measure)
    }
}

/// First differences with negative corrections clamped to zero.
pub fn to_daily(cum: &CumulativeSeries) -> Result<DailySeries> {
    if cum.values.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: cum.values.len(),
        });
    }
    let mut values = Vec::with_capacity(cum.values.len());
    let mut clamped_days = Vec::new();
    values.push(cum.values[0]);
    for (i, w) in cum.values.windows(2).enumerate() {
        if w[1] < w[0] {
            clamped_days.push(i + 1);
            values.push(0);
        } else {
            values.push(w[1] - w[0]);
        }
    }
    Ok(DailySeries {
        region: cum.region.clone(),
        start: cum.start,
        values,
        clamped_days,
    })
}

#[derive(Debug, Deserialize)]
struct EventRow {
    region: String,
    kind: String,
    date: String,
}

/// Reads `region,kind,date` rows. At most one event per (region, kind).
pub fn load_interventions(csv_text: &str) -> Result<Vec<InterventionEvent>> {
    let mut rdr = reader(csv_text);
    let headers = rdr.headers()?.clone();
    for col in ["region", "kind", "date"] {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::MissingColumn(col.into()));
        }
    }
    let mut seen = BTreeSet::new();
    let mut events = Vec::new();
    for row in rdr.deserialize::<EventRow>() {
        let row = row?;
        let region: RegionId = row.region.parse()?;
        let kind: InterventionKind = row.kind.parse()?;
        let date: Day = row.date.parse()?;
        if !seen.insert((region.clone(), kind)) {
            return Err(Error::DuplicateEvent {
                region: region.to_string(),
                kind: kind.to_string(),
            });
        }
        events.push(InterventionEvent { region, kind, date });
    }
    Ok(events)
}

/// Reads `region_meta.csv`: a `region` column plus the nine metadata columns.
pub fn load_region_meta(csv_text: &str) -> Result<BTreeMap<RegionId, RegionMeta>> {
    let mut rdr = reader(csv_text);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let region_col = col("region")?;
    let idx: Vec<usize> = RegionMeta::FEATURE_NAMES
        .iter()
        .map(|n| col(n))
        .collect::<Result<_>>()?;

    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let region: RegionId = rec[region_col].parse()?;
        let mut vals = [0.0; 9];
        for (v, &i) in vals.iter_mut().zip(&idx) {
            *v = rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::NonNumericCell {
                    line,
                    value: rec[i].to_string(),
                })?;
        }
        let out_of_range = |field: &'static str, value: f64| Error::OutOfRange {
            region: region.to_string(),
            field,
            value,
        };
        let [population, density, urban, gdp, gini, health, beds, temp, household] = vals;
        if !(population >= 1.0) || population.fract() != 0.0 {
            return Err(out_of_range("population", population));
        }
        for (field, v) in [
            ("density_per_km2", density),
            ("gdp_per_capita_usd", gdp),
            ("health_exp_per_capita_usd", health),
            ("hospital_beds_per_100k", beds),
            ("household_size", household),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(out_of_range(field, v));
            }
        }
        for (field, v) in [("urban_share", urban), ("gini", gini)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(out_of_range(field, v));
            }
        }
        if !temp.is_finite() {
            return Err(out_of_range("avg_temp_march_2020_c", temp));
        }
        let meta = RegionMeta {
            region: region.clone(),
            population: population as u64,
            density_per_km2: density,
            urban_share: urban,
            gdp_per_capita_usd: gdp,
            gini,
            health_exp_per_capita_usd: health,
            hospital_beds_per_100k: beds,
            avg_temp_march_2020_c: temp,
            household_size: household,
        };
        if out.insert(region.clone(), meta).is_some() {
            return Err(Error::InvalidRow {
                line,
                message: format!("duplicate metadata row for {region}"),
            });
        }
    }
    Ok(out)
}

/// Raw → canonical region names, read from `aliases.csv` (`raw,canonical`).
#[derive(Debug, Clone, Default)]
pub struct AliasMap {
    map: BTreeMap<RegionId, RegionId>,
}

impl AliasMap {
    pub fn parse(csv_text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            raw: String,
            canonical: String,
        }
        let mut map = BTreeMap::new();
        for row in reader(csv_text).deserialize::<Row>() {
            let row = row?;
            map.insert(row.raw.parse()?, row.canonical.parse()?);
        }
        Ok(AliasMap { map })
    }

    pub fn canonical(&self, region: &RegionId) -> RegionId {
        self.map
            .get(region)
            .cloned()
            .unwrap_or_else(|| region.clone())
    }

    /// Renames series keys; series that collapse onto one name are summed.
    pub fn apply_series(
        &self,
        series: BTreeMap<RegionId, CumulativeSeries>,
    ) -> BTreeMap<RegionId, CumulativeSeries> {
        let mut out: BTreeMap<RegionId, CumulativeSeries> = BTreeMap::new();
        for (region, s) in series {
            match out.entry(self.canonical(&region)) {
                Entry::Vacant(e) => {
                    let region = e.key().clone();
                    e.insert(CumulativeSeries { region, ..s });
                }
                Entry::Occupied(mut e) => {
                    for (acc, v) in e.get_mut().values.iter_mut().zip(s.values) {
                        *acc += v;
                    }
                }
            }
        }
        out
    }

    pub fn apply_events(&self, events: Vec<InterventionEvent>) -> Vec<InterventionEvent> {
        events
            .into_iter()
            .map(|mut e| {
                e.region = self.canonical(&e.region);
                e
            })
            .collect()
    }
}

/// First date on which cumulative deaths per inhabitant reach `per_capita`.
pub fn death_threshold_date_at(
    deaths: &CumulativeSeries,
    population: u64,
    per_capita: f64,
) -> Option<Day> {
    debug_assert_eq!(deaths.measure, Measure::Deaths);
    let needed = per_capita * population as f64;
    deaths
        .values
        .iter()
        .position(|&d| d as f64 >= needed)
        .map(|i| deaths.start + i as i32)
}

/// First date with at least one cumulative death per million inhabitants.
pub fn death_threshold_date(deaths: &CumulativeSeries, population: u64) -> Option<Day> {
    death_threshold_date_at(deaths, population, DEATHS_PER_CAPITA_THRESHOLD)
}

/// US states whose cumulative cases on `cutoff` exceed `min_cumulative`.
pub fn us_states_above(
    cases: &BTreeMap<RegionId, CumulativeSeries>,
    min_cumulative: u64,
    cutoff: Day,
) -> BTreeSet<RegionId> {
    cases
        .values()
        .filter(|s| s.region.kind == RegionKind::UsState)
        .filter(|s| {
            let on = s
                .value_on(cutoff)
                .or_else(|| (cutoff > s.end()).then(|| *s.values.last().unwrap()));
            on.is_some_and(|v| v > min_cumulative)
        })
        .map(|s| s.region.clone())
        .collect()
}
