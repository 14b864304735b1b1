use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use chsh_decoherence::commands::{
    self, factors_json, real_grid, Emit, Format, Method, RunManifest, TrajectoryOptions,
};
use chsh_decoherence::decoherence::SpinBathSpec;
use chsh_decoherence::geometry::ViolationSet;
use chsh_decoherence::selftest::{self, SelfTestOptions};
use chsh_decoherence::DecoherenceFactor;

const EXIT_INVALID_INPUT: u8 = 1;
const EXIT_INVARIANT_FAILURE: u8 = 2;

/// CHSH violation of a decohering Bell pair: maximal violation, violating
/// volume, spin-bath trajectories.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Monte Carlo samples (volume: 1000000, trajectory: 10000, selftest: 10000)
    #[arg(long, global = true)]
    samples: Option<u64>,

    #[arg(long, global = true, default_value = "csv")]
    format: Format,

    /// Output file; a `<PATH>.manifest.json` is written next to it
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Factors {
    /// Decoherence factors, e.g. `0.5`, `0.3+0.4i` (comma separated or repeated)
    #[arg(long = "r", value_delimiter = ',', allow_hyphen_values = true)]
    r: Vec<String>,

    /// Use the real grid 0, 1/N, ..., 1 instead of --r
    #[arg(long)]
    r_steps: Option<usize>,
}

impl Factors {
    fn resolve(&self) -> chsh_decoherence::Result<Vec<DecoherenceFactor>> {
        let mut out = match self.r_steps {
            Some(n) => real_grid(n),
            None => Vec::new(),
        };
        for text in &self.r {
            out.push(commands::parse_factor(text)?);
        }
        if out.is_empty() {
            out = real_grid(10);
        }
        Ok(out)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Maximal |<B>| per decoherence factor
    MaxViolation {
        #[command(flatten)]
        factors: Factors,
        #[arg(long, default_value = "both")]
        method: Method,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
    /// Monte Carlo fraction of violating measurement directions
    Volume {
        #[command(flatten)]
        factors: Factors,
        #[arg(long, default_value = "L")]
        set: ViolationSet,
    },
    /// Decoherence factor of a spin bath over time
    Trajectory {
        /// Bath JSON: {"couplings": [...], "weights": [[wa, wb], ...]}
        #[arg(long)]
        bath: PathBuf,
        /// Second, independent environment acting on the other particle
        #[arg(long)]
        bath2: Option<PathBuf>,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value = "r")]
        emit: Emit,
        #[arg(long, default_value = "L")]
        set: ViolationSet,
    },
    /// Invariant suite at reduced sample counts
    Selftest,
}

enum Failure {
    Input(String),
    Invariant(String),
}

impl From<chsh_decoherence::Error> for Failure {
    fn from(e: chsh_decoherence::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_bath(path: &PathBuf) -> Result<SpinBathSpec, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    SpinBathSpec::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, data: &str, manifest: &RunManifest) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => {
            let io = |e: std::io::Error| Failure::Input(format!("{}: {e}", path.display()));
            fs::write(path, data).map_err(io)?;
            fs::write(RunManifest::sidecar_path(path), manifest.to_json()).map_err(io)?;
        }
        None => {
            print!("{data}");
            eprintln!(
                "manifest: {}",
                serde_json::to_string(manifest).unwrap_or_default()
            );
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let seed = cli.seed;
    match &cli.command {
        Command::MaxViolation {
            factors,
            method,
            restarts,
        } => {
            let rs = factors.resolve()?;
            let table = commands::max_violation_table(&rs, *method, *restarts, seed)?;
            let params = json!({"r": factors_json(&rs), "method": method, "restarts": restarts});
            emit(
                cli,
                &table.render(cli.format),
                &RunManifest::new("max-violation", params, seed),
            )
        }
        Command::Volume { factors, set } => {
            let rs = factors.resolve()?;
            let samples = cli.samples.unwrap_or(1_000_000);
            let table = commands::volume_table(&rs, samples, seed, *set)?;
            let params = json!({"r": factors_json(&rs), "samples": samples, "set": set});
            emit(
                cli,
                &table.render(cli.format),
                &RunManifest::new("volume", params, seed),
            )
        }
        Command::Trajectory {
            bath,
            bath2,
            t_max,
            steps,
            emit: mode,
            set,
        } => {
            let first = read_bath(bath)?;
            let second = bath2.as_ref().map(read_bath).transpose()?;
            let opts = TrajectoryOptions {
                t_max: *t_max,
                steps: *steps,
                emit: *mode,
                samples: cli.samples.unwrap_or(10_000),
                seed,
                set: *set,
            };
            let table = commands::trajectory_table(&first, second.as_ref(), &opts)?;
            let params = json!({
                "bath": first,
                "bath2": second,
                "t_max": t_max,
                "steps": steps,
                "emit": mode,
                "samples": opts.samples,
                "set": set,
            });
            emit(
                cli,
                &table.render(cli.format),
                &RunManifest::new("trajectory", params, seed),
            )
        }
        Command::Selftest => {
            let samples = cli.samples.unwrap_or(10_000);
            let report = selftest::run(&SelfTestOptions::new(samples, seed));
            let text = commands::render_report(&report, cli.format);
            let params = json!({"samples": samples});
            emit(cli, &text, &RunManifest::new("selftest", params, seed))?;
            if report.passed() {
                Ok(())
            } else {
                let names: Vec<_> = report.failed().map(|c| c.name).collect();
                Err(Failure::Invariant(format!(
                    "failed checks: {}",
                    names.join(", ")
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INVALID_INPUT);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID_INPUT)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant failure: {msg}");
            ExitCode::from(EXIT_INVARIANT_FAILURE)
        }
    }
}
