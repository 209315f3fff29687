//! Synthetic daily counts with a weekly reporting pattern and a single
//! growth-rate break, used as ground truth for the detection chain.

use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::data::DailySeries;
use crate::date::Day;
use crate::error::{Error, Result};
use crate::pipeline::{run_series, PipelineConfig};
use crate::region::RegionId;
use crate::seed;

/// Relative weekday offsets; the two negative entries mimic weekend
/// under-reporting.
pub const WEEKLY_PATTERN: [f64; 7] = [0.0, 0.1, 0.15, 0.15, 0.1, -0.25, -0.25];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Noise {
    #[default]
    None,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_days: usize,
    pub base_level: f64,
    pub growth_pre: f64,
    pub growth_post: f64,
    pub break_day: usize,
    #[serde(default)]
    pub season_amplitude: f64,
    #[serde(default)]
    pub noise: Noise,
    #[serde(default)]
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_days == 0 {
            return bad("n_days must be positive".into());
        }
        if self.break_day >= self.n_days {
            return bad(format!(
                "break_day {} must be below n_days {}",
                self.break_day, self.n_days
            ));
        }
        if !(self.base_level > 0.0 && self.base_level.is_finite()) {
            return bad(format!("base_level {} must be positive", self.base_level));
        }
        for (name, g) in [
            ("growth_pre", self.growth_pre),
            ("growth_post", self.growth_post),
        ] {
            if !(g > 0.8 && g < 1.5) {
                return bad(format!("{name} {g} must lie in (0.8, 1.5)"));
            }
        }
        if !(self.season_amplitude >= 0.0 && self.season_amplitude.is_finite()) {
            return bad(format!(
                "season_amplitude {} must be non-negative",
                self.season_amplitude
            ));
        }
        Ok(())
    }

    /// Underlying trajectory μ_t, continuous at the break.
    pub fn trend(&self) -> Vec<f64> {
        let at_break = self.base_level * self.growth_pre.powi(self.break_day as i32);
        (0..self.n_days)
            .map(|t| {
                if t <= self.break_day {
                    self.base_level * self.growth_pre.powi(t as i32)
                } else {
                    at_break * self.growth_post.powi((t - self.break_day) as i32)
                }
            })
            .collect()
    }

    /// Expected count per day: μ_t scaled by the weekly pattern, floored at 0.
    pub fn expected(&self) -> Vec<f64> {
        self.trend()
            .into_iter()
            .enumerate()
            .map(|(t, mu)| (mu * (1.0 + self.season_amplitude * WEEKLY_PATTERN[t % 7])).max(0.0))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSeries {
    pub start: Day,
    pub values: Vec<f64>,
}

impl SyntheticSeries {
    /// Rounded counts in the same shape as parsed data.
    pub fn to_daily(&self, region: RegionId) -> DailySeries {
        DailySeries {
            region,
            start: self.start,
            values: self
                .values
                .iter()
                .map(|v| v.round().max(0.0) as u64)
                .collect(),
            clamped_days: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.start + i as i32, v));
        }
        out
    }
}

/// Day 0 of every synthetic series.
pub fn synthetic_start() -> Day {
    Day::from_ymd(2020, 1, 1).expect("valid date")
}

pub const NOISE_STREAM: &str = "synth-noise";

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticSeries> {
    spec.validate()?;
    let expected = spec.expected();
    let values = match spec.noise {
        Noise::None => expected,
        Noise::Poisson => {
            let mut rng = seed::stream(spec.seed, NOISE_STREAM);
            expected
                .into_iter()
                .map(|mu| {
                    if mu > 0.0 {
                        Poisson::new(mu).map(|d| d.sample(&mut rng)).unwrap_or(mu)
                    } else {
                        0.0
                    }
                })
                .collect()
        }
    };
    Ok(SyntheticSeries {
        start: synthetic_start(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DelayConfig {
    /// The synthetic first intervention is placed this many days before the break.
    pub npi_lead_days: usize,
    pub pipeline: PipelineConfig,
}

impl Default for DelayConfig {
    fn default() -> Self {
        DelayConfig {
            npi_lead_days: 10,
            pipeline: PipelineConfig::default(),
        }
    }
}

/// Detected drift day minus break day; `None` when nothing is detected.
pub fn measure_detection_delay(spec: &SyntheticSpec, cfg: &DelayConfig) -> Result<Option<i32>> {
    if cfg.npi_lead_days > spec.break_day {
        return Err(Error::InvalidParameter(format!(
            "npi_lead_days {} exceeds break_day {}",
            cfg.npi_lead_days, spec.break_day
        )));
    }
    let series = generate(spec)?;
    let npi = series.start + (spec.break_day - cfg.npi_lead_days) as i32;
    let run = run_series(series.start, &series.values, npi, &cfg.pipeline)?;
    Ok(run
        .drift
        .drift_date
        .map(|d| (d - series.start) - spec.break_day as i32))
}
