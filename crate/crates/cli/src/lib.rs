//! Subcommand implementations for the `squitter-sim` binary.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use squitter_sim::metrics::calibrate_noise_floor;
use squitter_sim::output;
use squitter_sim::presets::{self, PRESETS};
use squitter_sim::scenario::{load_scenario, ScenarioConfig};
use squitter_sim::sweep::{run_sweep, sweep_csv, SweepSpec};
use squitter_sim::{run, run_replicated};

pub const OUT_DIR_ENV: &str = "SQUITTER_SIM_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "squitter-sim", version, about = "1090 MHz ADS-B channel capacity simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file, or the name of a shipped preset (see `presets`).
    #[arg(long)]
    pub scenario: String,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; defaults to stdout, or to a file inside $SQUITTER_SIM_OUT_DIR when set.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario (replicated when --reps > 1).
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        reps: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Sweep one parameter over a list of values.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// n_planes, n_uavs, noise_floor_dbm or deadline_s
        #[arg(long)]
        param: String,
        /// Comma-separated values, in output order.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, default_value_t = 10)]
        reps: u32,
    },
    /// Find the noise floor that yields a target mean received ratio.
    Calibrate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: f64,
        #[arg(long, default_value_t = 3)]
        reps: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// List the shipped scenario presets, or write them to a directory.
    Presets {
        #[arg(long)]
        write_to: Option<PathBuf>,
    },
}

pub fn load_config(spec: &str, seed: Option<u64>) -> Result<ScenarioConfig> {
    let path = Path::new(spec);
    let mut cfg = if path.exists() {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading scenario {}", path.display()))?;
        load_scenario(&text).with_context(|| format!("in scenario {}", path.display()))?
    } else if let Some(p) = presets::find(spec) {
        p.config()?
    } else {
        bail!("scenario not found: {spec}");
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: &Option<PathBuf>, default_name: &str, body: &str) -> Result<Option<PathBuf>> {
    let target = match out {
        Some(p) => Some(p.clone()),
        None => std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(default_name)),
    };
    match target {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
            Ok(Some(path))
        }
        None => {
            print!("{body}");
            Ok(None)
        }
    }
}

fn ext(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

pub fn cmd_run(common: &Common, reps: u32, format: Format) -> Result<String> {
    let cfg = load_config(&common.scenario, common.seed)?;
    let body = if reps <= 1 {
        let report = run(&cfg)?;
        match format {
            Format::Json => output::report_json(&report),
            Format::Csv => output::report_csv(&report),
        }
    } else {
        let rep = run_replicated(&cfg, reps)?;
        match format {
            Format::Json => output::replicated_json(&rep),
            Format::Csv => output::replicated_csv(&rep),
        }
    };
    emit(&common.out, &format!("run.{}", ext(format)), &body)?;
    Ok(body)
}

pub fn cmd_sweep(common: &Common, param: &str, values: &str, reps: u32) -> Result<String> {
    let cfg = load_config(&common.scenario, common.seed)?;
    let spec = SweepSpec::new(param, values, reps)?;
    let points = run_sweep(&spec, &cfg)?;
    let body = sweep_csv(&spec, &points);
    emit(&common.out, &format!("sweep_{param}.csv"), &body)?;
    Ok(body)
}

pub fn cmd_calibrate(common: &Common, target: f64, reps: u32, format: Format) -> Result<String> {
    let cfg = load_config(&common.scenario, common.seed)?;
    let cal = calibrate_noise_floor(target, &cfg, reps)
        .map_err(|e| anyhow!("calibration failed: {e}"))?;
    let body = match format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "schema": "squitter-sim/calibration/v1",
            "target": output::round_sig6(cal.target),
            "noise_floor_dbm": output::round_sig6(cal.noise_floor_dbm),
            "achieved_ratio": output::round_sig6(cal.achieved_ratio),
            "replications": cal.replications,
            "evaluations": cal.evaluations.iter()
                .map(|(f, r)| [output::round_sig6(*f), output::round_sig6(*r)])
                .collect::<Vec<_>>(),
        }))? + "\n",
        Format::Csv => {
            let mut s = format!(
                "# schema: squitter-sim/calibration/v1\n\
                 target,noise_floor_dbm,achieved_ratio,replications\n{},{},{},{}\n\n\
                 noise_floor_dbm,mean_received_ratio\n",
                output::fmt_sig6(cal.target),
                output::fmt_sig6(cal.noise_floor_dbm),
                output::fmt_sig6(cal.achieved_ratio),
                cal.replications
            );
            for (f, r) in &cal.evaluations {
                s.push_str(&format!("{},{}\n", output::fmt_sig6(*f), output::fmt_sig6(*r)));
            }
            s
        }
    };
    emit(&common.out, &format!("calibration.{}", ext(format)), &body)?;
    Ok(body)
}

pub fn cmd_presets(write_to: Option<&Path>) -> Result<String> {
    let mut s = String::new();
    for p in PRESETS {
        s.push_str(&format!("{:<10} {}\n", p.file_name(), p.description()));
        if let Some(dir) = write_to {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(p.file_name()), p.text)?;
        }
    }
    print!("{s}");
    Ok(s)
}

pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            common,
            reps,
            format,
        } => cmd_run(&common, reps, format).map(drop),
        Command::Sweep {
            common,
            param,
            values,
            reps,
        } => cmd_sweep(&common, &param, &values, reps).map(drop),
        Command::Calibrate {
            common,
            target,
            reps,
            format,
        } => cmd_calibrate(&common, target, reps, format).map(drop),
        Command::Presets { write_to } => cmd_presets(write_to.as_deref()).map(drop),
    }
}
