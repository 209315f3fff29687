//! Run configuration: defaults, TOML loading and the echo embedded in
//! every output file.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use driftlag_core::data::DEATHS_PER_CAPITA_THRESHOLD;
use driftlag_core::drift::PhtConfig;
use driftlag_core::forecast::{DEFAULT_WINDOW_OFFSET, GRID};
use driftlag_core::lasso::NestedCvConfig;
use driftlag_core::pipeline::PipelineConfig;
use driftlag_core::{Day, RegionId};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 2020;
pub const DEFAULT_US_CASE_CUTOFF: u64 = 10_000;

pub fn default_us_cutoff_date() -> Day {
    Day::from_ymd(2020, 5, 13).expect("valid date")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// JHU cumulative case files (global and/or US layout).
    pub cases: Vec<PathBuf>,
    pub deaths: Vec<PathBuf>,
    pub npis: Option<PathBuf>,
    pub meta: Option<PathBuf>,
    pub aliases: Option<PathBuf>,
    /// Restrict the run to these regions (`Italy`, `US:New York`); empty means all.
    pub regions: Vec<String>,
    pub window_offset: i32,
    pub grid: Vec<f64>,
    pub pht: PhtConfig,
    /// Cumulative deaths per inhabitant that define the threshold date.
    pub death_threshold: f64,
    /// US states need more than this many cumulative cases on `us_cutoff_date`.
    pub us_case_cutoff: u64,
    pub us_cutoff_date: Day,
    pub seed: u64,
    pub regression: NestedCvConfig,
    /// Not echoed: identical runs written to different places stay identical.
    #[serde(skip_serializing)]
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cases: Vec::new(),
            deaths: Vec::new(),
            npis: None,
            meta: None,
            aliases: None,
            regions: Vec::new(),
            window_offset: DEFAULT_WINDOW_OFFSET,
            grid: GRID.to_vec(),
            pht: PhtConfig::default(),
            death_threshold: DEATHS_PER_CAPITA_THRESHOLD,
            us_case_cutoff: DEFAULT_US_CASE_CUTOFF,
            us_cutoff_date: default_us_cutoff_date(),
            seed: DEFAULT_SEED,
            regression: NestedCvConfig::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Reads a TOML file. Relative input paths are resolved against the
    /// file's directory so configs can live next to their data.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.cases.iter_mut().for_each(fix);
        cfg.deaths.iter_mut().for_each(fix);
        for p in [&mut cfg.npis, &mut cfg.meta, &mut cfg.aliases].into_iter().flatten() {
            fix(p);
        }
        Ok(cfg)
    }

    /// Inputs from the bundled `data/` directory.
    pub fn bundled(data_dir: &Path) -> Self {
        RunConfig {
            cases: vec![data_dir.join("jhu_global_confirmed.csv"), data_dir.join("jhu_us_confirmed.csv")],
            deaths: vec![data_dir.join("jhu_global_deaths.csv"), data_dir.join("jhu_us_deaths.csv")],
            npis: Some(data_dir.join("interventions.csv")),
            meta: Some(data_dir.join("region_meta.csv")),
            aliases: Some(data_dir.join("aliases.csv")),
            ..RunConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pht.validate()?;
        anyhow::ensure!(!self.grid.is_empty(), "grid must not be empty");
        anyhow::ensure!(
            self.grid.iter().all(|v| *v > 0.0 && *v < 1.0),
            "grid values must lie in (0, 1)"
        );
        anyhow::ensure!(
            self.death_threshold > 0.0 && self.death_threshold.is_finite(),
            "death_threshold must be positive"
        );
        anyhow::ensure!(self.window_offset >= 0, "window_offset must be non-negative");
        for r in &self.regions {
            r.parse::<RegionId>().with_context(|| format!("bad region {r:?}"))?;
        }
        Ok(())
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            window_offset: self.window_offset,
            grid: self.grid.clone(),
            pht: self.pht,
        }
    }

    pub fn region_filter(&self) -> Result<Vec<RegionId>> {
        self.regions
            .iter()
            .map(|r| r.parse::<RegionId>().with_context(|| format!("bad region {r:?}")))
            .collect()
    }

    /// Single-line JSON of the effective configuration.
    pub fn echo_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    /// Comment header placed at the top of every CSV output.
    pub fn csv_header(&self) -> String {
        format!("# seed: {}\n# config: {}\n", self.seed, self.echo_json())
    }
}
