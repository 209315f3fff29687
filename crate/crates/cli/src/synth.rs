//! The `synth` subcommand: write a synthetic stream and optionally measure
//! how long the detector takes to flag its break.

use std::path::Path;

use anyhow::{Context, Result};
use driftlag_core::synth::{generate, measure_detection_delay, DelayConfig, SyntheticSpec};
use serde::{Deserialize, Serialize};

use crate::output::write_text;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthFile {
    #[serde(flatten)]
    pub spec: SyntheticSpec,
    #[serde(default)]
    pub detection: DelayConfig,
}

pub fn load_spec(path: &Path) -> Result<SynthFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// CSV text with the synthetic parameters echoed in comment lines.
pub fn synth_csv(file: &SynthFile) -> Result<String> {
    let series = generate(&file.spec)?;
    let mut out = format!(
        "# seed: {}\n# config: {}\n",
        file.spec.seed,
        serde_json::to_string(file)?
    );
    out.push_str(&series.to_csv());
    Ok(out)
}

pub fn run_synth(file: &SynthFile, out: &Path) -> Result<()> {
    write_text(out, &synth_csv(file)?)
}

pub fn delay(file: &SynthFile) -> Result<Option<i32>> {
    Ok(measure_detection_delay(&file.spec, &file.detection)?)
}
