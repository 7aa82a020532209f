//! `cryoion`: batch front end for the trapped-ion simulations.
//!
//! Every subcommand reads an optional JSON config (`--config`), writes CSV
//! tables, a `summary.json` and a `manifest.json` into `--out`, and exits
//! with 0 on success, 2 for configuration errors, 3 for physics errors and
//! 4 for I/O errors.

mod commands;
mod config;
mod error;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use commands::{Context, RunReport};
use cryoion::axial::Curvature;
use cryoion::experiments::{CoolingRunConfig, FlipExperimentConfig};
use error::{CliError, CliResult};
use output::OutDir;

#[derive(Parser)]
#[command(name = "cryoion", version, about = "Trapped-ion chain simulations and cryostat calculators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// JSON config, or the manifest.json of an earlier run to repeat it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the seed of a manifest.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, env = "CRYOION_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Output directory.
    #[arg(long, default_value = "cryoion-out")]
    out: PathBuf,
    /// Print a progress line every this many samples; 0 disables.
    #[arg(long, default_value_t = 100)]
    progress_every: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlipPreset {
    /// Seven ions, 2×10³ periods.
    Desk,
    /// Thirty-one ions, 2×10⁴ periods, 5×10⁵ samples.
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HeatPreset {
    PaperAppendixA,
}

#[derive(Subcommand)]
enum Command {
    /// Axial equilibrium of an N-ion chain.
    Equilibrium {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, value_parser = parse_curvature)]
        curvature: Option<Curvature>,
    },
    /// Quartic coefficient β minimizing the spacing spread.
    OptimizeBeta {
        #[command(flatten)]
        common: Common,
        /// Chain lengths (repeatable).
        #[arg(long)]
        n: Vec<usize>,
    },
    /// Ion–H₂ scattering angles and mean energy transfer.
    Scatter {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        temperature: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Zig-zag flip probability Monte Carlo.
    FlipMc {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "desk")]
        preset: FlipPreset,
        #[arg(long)]
        temperature: Option<f64>,
    },
    /// Background pressure from reconfiguration or inelastic rates.
    Pressure {
        #[command(flatten)]
        common: Common,
    },
    /// Cryostat heat-load budget.
    Heatload {
        #[command(flatten)]
        common: Common,
        /// Built-in budget, used when no config is given.
        #[arg(long, value_enum)]
        preset: Option<HeatPreset>,
    },
    /// Helical resonator Q and tuning.
    Resonator {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        q_load: Option<f64>,
        #[arg(long)]
        reflected_power: Option<f64>,
    },
    /// Doppler cooling of a hot ion.
    CoolDemo {
        #[command(flatten)]
        common: Common,
    },
}

fn parse_curvature(s: &str) -> Result<Curvature, String> {
    match s {
        "confining" => Ok(Curvature::Confining),
        "anticonfining" => Ok(Curvature::Anticonfining),
        _ => Err(format!("expected confining or anticonfining, got {s}")),
    }
}

#[derive(Serialize)]
struct Batch {
    batch: usize,
    first_sample: usize,
    samples: usize,
    /// Sample i draws from ChaCha8(master_seed) on stream i.
    streams: [usize; 2],
}

#[derive(Serialize)]
struct Failure {
    sample: usize,
    message: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    manifest_version: u32,
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    config: serde_json::Value,
    master_seed: u64,
    workers: usize,
    wall_time_s: f64,
    batches: Vec<Batch>,
    failures: Vec<Failure>,
    outputs: Vec<String>,
}

fn run(cli: Cli) -> CliResult<()> {
    let started = Instant::now();
    let (name, common) = match &cli.command {
        Command::Equilibrium { common, .. } => ("equilibrium", common),
        Command::OptimizeBeta { common, .. } => ("optimize-beta", common),
        Command::Scatter { common, .. } => ("scatter", common),
        Command::FlipMc { common, .. } => ("flip-mc", common),
        Command::Pressure { common } => ("pressure", common),
        Command::Heatload { common, .. } => ("heatload", common),
        Command::Resonator { common, .. } => ("resonator", common),
        Command::CoolDemo { common } => ("cool-demo", common),
    };
    let common = common.clone();
    let path = common.config.as_deref();
    let mut out = OutDir::create(&common.out)?;
    let mut manifest_seed = None;
    let mut ctx = Context {
        seed: 0,
        workers: common.workers,
        progress_every: common.progress_every,
        out: &mut out,
        name,
    };
    macro_rules! load {
        ($base:expr) => {{
            let loaded = config::load(path, $base)?;
            manifest_seed = loaded.manifest_seed;
            ctx.seed = common.seed.or(manifest_seed).unwrap_or(0);
            loaded.config
        }};
    }
    let report: RunReport = match cli.command {
        Command::Equilibrium {
            n, beta, curvature, ..
        } => {
            let mut c: commands::EquilibriumConfig = load!(Default::default());
            c.ions = n.unwrap_or(c.ions);
            c.beta = beta.unwrap_or(c.beta);
            c.curvature = curvature.unwrap_or(c.curvature);
            commands::equilibrium(&mut ctx, c)?
        }
        Command::OptimizeBeta { n, .. } => {
            let mut c: commands::OptimizeBetaConfig = load!(Default::default());
            if !n.is_empty() {
                c.ions = n;
            }
            commands::optimize_beta_cmd(&mut ctx, c)?
        }
        Command::Scatter {
            temperature, samples, ..
        } => {
            let mut c: commands::ScatterConfig = load!(Default::default());
            c.gas_temperature_k = temperature.unwrap_or(c.gas_temperature_k);
            c.samples = samples.unwrap_or(c.samples);
            commands::scatter(&mut ctx, c)?
        }
        Command::FlipMc {
            preset, temperature, ..
        } => {
            let base = match preset {
                FlipPreset::Desk => FlipExperimentConfig::desk(),
                FlipPreset::Full => FlipExperimentConfig::default(),
            };
            let mut c: FlipExperimentConfig = load!(base);
            c.gas_temperature_k = temperature.unwrap_or(c.gas_temperature_k);
            commands::flip_mc(&mut ctx, c)?
        }
        Command::Pressure { .. } => {
            // variants differ in fields, so a config replaces the default whole
            let c = match path {
                Some(p) => {
                    let loaded = config::load_whole::<commands::PressureConfig>(p)?;
                    manifest_seed = loaded.manifest_seed;
                    loaded.config
                }
                None => Default::default(),
            };
            ctx.seed = common.seed.or(manifest_seed).unwrap_or(0);
            commands::pressure(&mut ctx, c)?
        }
        Command::Heatload { .. } => {
            let c = match path {
                Some(p) => {
                    let loaded = config::load_whole::<commands::HeatloadConfig>(p)?;
                    Some(loaded.config)
                }
                None => None,
            };
            ctx.seed = common.seed.unwrap_or(0);
            commands::heatload(&mut ctx, c)?
        }
        Command::Resonator {
            q_load,
            reflected_power,
            ..
        } => {
            let mut c: commands::ResonatorConfig = load!(Default::default());
            c.resonator.q_load = q_load.unwrap_or(c.resonator.q_load);
            c.resonator.reflected_power = reflected_power.unwrap_or(c.resonator.reflected_power);
            commands::resonator(&mut ctx, c)?
        }
        Command::CoolDemo { .. } => {
            let c: CoolingRunConfig = load!(Default::default());
            commands::cool_demo(&mut ctx, c)?
        }
    };
    let seed = ctx.seed;
    let manifest = Manifest {
        manifest_version: config::MANIFEST_VERSION,
        tool: "cryoion",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: name,
        config: report.config,
        master_seed: seed,
        workers: common.workers,
        wall_time_s: started.elapsed().as_secs_f64(),
        batches: report
            .batches
            .iter()
            .enumerate()
            .map(|(batch, &(first, n))| Batch {
                batch,
                first_sample: first,
                samples: n,
                streams: [first, first + n - 1],
            })
            .collect(),
        failures: report
            .failures
            .into_iter()
            .map(|(sample, message)| Failure { sample, message })
            .collect(),
        outputs: out.written().to_vec(),
    };
    let path = common.out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::physics(e.to_string()))? + "\n";
    std::fs::write(&path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            eprintln!("{}", e.report());
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
