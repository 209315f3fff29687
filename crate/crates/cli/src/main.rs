use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use driftlag::config::RunConfig;
use driftlag::detect::{run_detect, write_detect};
use driftlag::regress::{run_regress, write_regress};
use driftlag::{report, synth};
use driftlag_core::lasso::{InnerMetric, Standardization};

#[derive(Parser)]
#[command(name = "driftlag", version, about = "Concept-drift dating of epidemic curves and intervention lags")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit forecasters, date the drift per region and write lags, traces and charts.
    Detect(DetectArgs),
    /// Nested-CV Lasso of reaction times on region covariates.
    Regress(RegressArgs),
    /// Generate a synthetic stream from a TOML spec.
    Synth(SynthArgs),
    /// Print a summary of a detect run.
    Report(ReportArgs),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    common: Common,
    /// Cumulative case file (JHU global or US layout); repeatable.
    #[arg(long)]
    cases: Vec<PathBuf>,
    #[arg(long)]
    deaths: Vec<PathBuf>,
    #[arg(long)]
    npis: Option<PathBuf>,
    #[arg(long)]
    meta: Option<PathBuf>,
    #[arg(long)]
    aliases: Option<PathBuf>,
    /// Only these regions (`Italy`, `US:New York`); repeatable.
    #[arg(long = "region")]
    regions: Vec<String>,
    #[arg(long)]
    window_offset: Option<i32>,
    #[arg(long)]
    pht_threshold: Option<f64>,
    #[arg(long)]
    pht_min_instances: Option<usize>,
    #[arg(long)]
    pht_delta: Option<f64>,
    #[arg(long)]
    pht_forgetting: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Mse,
    Mae,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scaling {
    PerFold,
    Global,
}

#[derive(Args)]
struct RegressArgs {
    #[command(flatten)]
    common: Common,
    /// Output directory of a previous `detect` run.
    #[arg(long)]
    detect_out: PathBuf,
    #[arg(long)]
    meta: Option<PathBuf>,
    #[arg(long)]
    n_draws: Option<usize>,
    #[arg(long, value_enum)]
    metric: Option<Metric>,
    #[arg(long, value_enum)]
    standardization: Option<Scaling>,
}

#[derive(Args)]
struct SynthArgs {
    /// TOML file with the synthetic series parameters.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Also run the detector and print the detection delay.
    #[arg(long)]
    delay: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    detect_out: PathBuf,
    /// Directory holding regression.json.
    #[arg(long)]
    regress_out: Option<PathBuf>,
}

fn base_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.out = o.clone();
    }
    Ok(cfg)
}

fn detect_cmd(a: DetectArgs) -> Result<()> {
    let mut cfg = base_config(&a.common)?;
    if !a.cases.is_empty() {
        cfg.cases = a.cases;
    }
    if !a.deaths.is_empty() {
        cfg.deaths = a.deaths;
    }
    if !a.regions.is_empty() {
        cfg.regions = a.regions;
    }
    cfg.npis = a.npis.or(cfg.npis);
    cfg.meta = a.meta.or(cfg.meta);
    cfg.aliases = a.aliases.or(cfg.aliases);
    if let Some(w) = a.window_offset {
        cfg.window_offset = w;
    }
    if let Some(v) = a.pht_threshold {
        cfg.pht.threshold = v;
    }
    if let Some(v) = a.pht_min_instances {
        cfg.pht.min_instances = v;
    }
    if let Some(v) = a.pht_delta {
        cfg.pht.delta = v;
    }
    if let Some(v) = a.pht_forgetting {
        cfg.pht.forgetting = v;
    }
    let run = run_detect(&cfg)?;
    write_detect(&run, &cfg, &cfg.out)?;
    let ok = run.regions.iter().filter(|r| r.report.drift_date.is_some()).count();
    eprintln!("{} regions, {ok} with a drift date; written to {}", run.regions.len(), cfg.out.display());
    for r in &run.regions {
        if let Some(why) = &r.report.exclusion {
            eprintln!("  excluded {}: {why}", r.report.region);
        }
    }
    Ok(())
}

fn regress_cmd(a: RegressArgs) -> Result<()> {
    let mut cfg = base_config(&a.common)?;
    cfg.meta = a.meta.or(cfg.meta);
    if let Some(n) = a.n_draws {
        cfg.regression.n_draws = n;
    }
    if let Some(m) = a.metric {
        cfg.regression.metric = match m {
            Metric::Mse => InnerMetric::Mse,
            Metric::Mae => InnerMetric::Mae,
        };
    }
    if let Some(s) = a.standardization {
        cfg.regression.standardization = match s {
            Scaling::PerFold => Standardization::PerFold,
            Scaling::Global => Standardization::Global,
        };
    }
    let out = run_regress(&cfg, &a.detect_out)?;
    write_regress(&out, &cfg.out)?;
    let m = &out.report.metrics;
    eprintln!(
        "{} rows x {} features; MAE {:.3} RMSE {:.3}; written to {}",
        out.dataset.y.len(),
        out.dataset.names.len(),
        m.mae,
        m.rmse,
        cfg.out.join("regression.json").display()
    );
    Ok(())
}

fn synth_cmd(a: SynthArgs) -> Result<()> {
    let mut file = synth::load_spec(&a.spec)?;
    if let Some(s) = a.seed {
        file.spec.seed = s;
    }
    synth::run_synth(&file, &a.out)?;
    if a.delay {
        match synth::delay(&file)? {
            Some(d) => println!("detection delay: {d} days after the break"),
            None => println!("no drift detected"),
        }
    }
    Ok(())
}

fn report_cmd(a: ReportArgs) -> Result<()> {
    let text = report::summary(&a.detect_out, a.regress_out.as_deref().map(Path::new))
        .with_context(|| format!("summarising {}", a.detect_out.display()))?;
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Detect(a) => detect_cmd(a),
        Command::Regress(a) => regress_cmd(a),
        Command::Synth(a) => synth_cmd(a),
        Command::Report(a) => report_cmd(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
