//! thermavg: thermal averages of small spin models from a two-stage
//! statevector pipeline (variational mixed-state preparation + reweighting),
//! verified against an exact diagonalization oracle.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{cmd_oracle, cmd_solve, cmd_sweep, cmd_validate, resolve_config};

/// Keys recognized both as `key=value` operands and as `--key=value` flags.
const CONFIG_KEYS: &[&str] = &[
    "model.q_s",
    "model.j",
    "model.h",
    "model.periodic",
    "q_s",
    "j",
    "h",
    "periodic",
    "q_a",
    "mixing.family",
    "mixing.param",
    "ansatz.layers",
    "layers",
    "optimizer.method",
    "optimizer.max_iterations",
    "optimizer.learning_rate",
    "optimizer.learning_rate_final",
    "optimizer.tolerance",
    "optimizer.restarts",
    "mode",
    "shots",
    "betas.min",
    "betas.max",
    "betas.count",
    "betas.spacing",
    "observable",
    "seed",
    "out",
];

#[derive(Parser)]
#[command(
    name = "thermavg",
    about = "Thermal averages from mixed-state VQE plus reweighting on a statevector simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the variational stage; writes theta_star.txt, trace.csv, summary.txt
    Solve(CommonArgs),
    /// Prepare the state from theta_star.txt, estimate the spectrum, sweep beta;
    /// writes spectrum.csv, curve.csv, summary.txt
    Sweep(SweepArgs),
    /// Write the exact spectrum and thermal curve of the configured model
    Oracle(CommonArgs),
    /// Run the property-check suite; exits 1 on any failing check
    Validate(ValidateArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (line-oriented `key = value`)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the `out` key)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed (overrides the `seed` key)
    #[arg(long)]
    seed: Option<u64>,
    /// Stream optimizer progress to stdout
    #[arg(long)]
    trace: bool,
    /// Subsample long-running suites
    #[arg(long)]
    quick: bool,
    /// Configuration overrides, `key=value` (also accepted as `--key=value`)
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Angle file produced by `solve` (default: <out>/theta_star.txt)
    #[arg(long)]
    theta: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Deliberately inject a fault to self-test the harness (e.g. `gradient`)
    #[arg(long = "break", value_name = "NAME")]
    break_: Option<String>,
}

/// Rewrite `--<config key>=<value>` arguments into plain `key=value`
/// operands so every configuration key doubles as a long flag.
fn preprocess_args() -> Vec<String> {
    std::env::args()
        .map(|arg| {
            if let Some(rest) = arg.strip_prefix("--") {
                if let Some((key, _)) = rest.split_once('=') {
                    if CONFIG_KEYS.contains(&key) {
                        return rest.to_string();
                    }
                }
            }
            arg
        })
        .collect()
}

fn split_overrides(raw: &[String]) -> Result<Vec<(String, String)>, error::CliError> {
    raw.iter()
        .map(|item| {
            item.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| {
                    error::CliError::Config(format!("override {item:?} is not `key=value`"))
                })
        })
        .collect()
}

fn run() -> Result<(), error::CliError> {
    let cli = Cli::parse_from(preprocess_args());
    match cli.command {
        Command::Solve(args) => {
            let overrides = split_overrides(&args.overrides)?;
            let cfg = resolve_config(
                args.config.as_deref(),
                &overrides,
                args.out.as_deref(),
                args.seed,
            )?;
            cmd_solve(&cfg, args.trace)
        }
        Command::Sweep(args) => {
            let overrides = split_overrides(&args.common.overrides)?;
            let cfg = resolve_config(
                args.common.config.as_deref(),
                &overrides,
                args.common.out.as_deref(),
                args.common.seed,
            )?;
            cmd_sweep(&cfg, args.theta.as_deref())
        }
        Command::Oracle(args) => {
            let overrides = split_overrides(&args.overrides)?;
            let cfg = resolve_config(
                args.config.as_deref(),
                &overrides,
                args.out.as_deref(),
                args.seed,
            )?;
            cmd_oracle(&cfg)
        }
        Command::Validate(args) => {
            cmd_validate(args.common.quick, args.break_.as_deref(), args.common.seed)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("thermavg: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
