//! Command-line front end: named scenario runs, PSD/SNR table export, and
//! the stochastic validation suite.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 oracle mismatch.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, FrequencyUnit, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "speedmeter",
    about = "Noise spectra, matched filters and SNRs for optomechanical impulse sensors",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output path (CSV or JSON depending on the command).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Interpret configured frequencies as ordinary Hz or angular rad/s.
    #[arg(long, value_parser = parse_freq_unit)]
    freq_unit: Option<FrequencyUnit>,

    /// RNG seed override.
    #[arg(long)]
    seed: Option<u64>,

    /// Frequency band LO:HI (in the configured frequency unit).
    #[arg(long, value_parser = parse_band)]
    band: Option<(f64, f64)>,
}

fn parse_freq_unit(s: &str) -> Result<FrequencyUnit, String> {
    s.parse()
}

fn parse_band(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("band must be LO:HI, got '{s}'"))?;
    let lo: f64 = lo.parse().map_err(|_| format!("bad band edge '{lo}'"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad band edge '{hi}'"))?;
    if !(lo >= 0.0) || lo > hi {
        return Err(format!("band must satisfy 0 <= lo <= hi, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Subcommand)]
enum Command {
    /// Export force-noise PSD tables (shot, thermal, back-action, total).
    Psd(CommonArgs),

    /// Sweep flyby time and export exact and closed-form SNRs per meter.
    Snr(CommonArgs),

    /// Run a named scenario and print a report plus JSON.
    Scenario {
        /// gas-collision | dark-matter-flyby
        name: String,

        /// Override scenario inputs, e.g. --set mass=4e-3 (repeatable).
        #[arg(long = "set", value_parser = parse_override)]
        overrides: Vec<(String, f64)>,

        #[command(flatten)]
        common: CommonArgs,
    },

    /// Validate analytic spectra and SNRs against time-domain simulation.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,

        /// Shorter durations, looser tolerances (smoke-test mode).
        #[arg(long)]
        quick: bool,

        /// Write the first validation trace as CSV.
        #[arg(long)]
        dump_trace: Option<PathBuf>,
    },
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("override must be key=value, got '{s}'"))?;
    let v: f64 = v
        .parse()
        .map_err(|_| format!("override value for '{k}' must be a number"))?;
    Ok((k.trim().to_string(), v))
}

fn load_config(common: &CommonArgs) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = match &common.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(u) = common.freq_unit {
        cfg.freq_unit = u;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(b) = common.band {
        cfg.band = Some(b);
    }
    Ok(cfg)
}

fn init_thread_pool() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("SPEEDMETER_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_ORACLE: u8 = 4;

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Psd(common) => match load_config(common) {
            Ok(cfg) => commands::psd::run(&cfg, common.out.as_deref()),
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        Command::Snr(common) => match load_config(common) {
            Ok(cfg) => commands::snr::run(&cfg, common.out.as_deref()),
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        Command::Scenario {
            name,
            overrides,
            common,
        } => match load_config(common) {
            Ok(cfg) => commands::scenario::run(name, overrides, &cfg, common.out.as_deref()),
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        Command::Oracle {
            common,
            quick,
            dump_trace,
        } => match load_config(common) {
            Ok(cfg) => {
                return match commands::oracle::run(&cfg, *quick, dump_trace.as_deref()) {
                    Ok(true) => ExitCode::SUCCESS,
                    Ok(false) => ExitCode::from(EXIT_ORACLE),
                    Err(e) => {
                        eprintln!("error: {e}");
                        ExitCode::from(EXIT_NUMERICAL)
                    }
                }
            }
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
