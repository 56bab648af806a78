//! `witnesskit` command-line tool.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on domain errors. Domain
//! errors are printed to stdout as a single JSON line
//! `{"error": {"code": ..., "message": ...}}`.

mod commands;
mod error;
mod output;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use witnesskit::montecarlo::{DEFAULT_ALPHA_BINS, DEFAULT_P_POINTS, DEFAULT_SAMPLES};
use witnesskit::seesaw::DEFAULT_RESTARTS;

use commands::{ConventionArg, Mode};
use error::{CliError, CliResult};
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "witnesskit", version, about = "Entanglement witnesses and local measurement settings")]
struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the payload here and a manifest to `<out>.manifest.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build catalog states.
    #[command(subcommand)]
    State(StateCommand),
    /// Build witnesses and separability thresholds.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Decompose a witness into local measurement settings.
    Decompose(DecomposeOpts),
    /// Monte Carlo error curves and false-separable rates.
    #[command(subcommand)]
    Montecarlo(MonteCarloCommand),
    /// Estimate a witness from simulated measurement shots.
    Simulate(SimulateOpts),
}

#[derive(Subcommand, Debug)]
enum StateCommand {
    Make {
        #[arg(long, value_parser = spec::FAMILIES)]
        family: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        /// Chessboard parameters `m,n,a,b,c,d`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Option<Vec<f64>>,
    },
}

#[derive(Subcommand, Debug)]
enum WitnessCommand {
    Build {
        /// State spec such as `noisy-bell:p=0.8` or `horodecki:b=0.5`.
        #[arg(long = "for")]
        state: String,
        /// Edge-state witness `P + Q^T_A - eps 1`.
        #[arg(long)]
        edge: bool,
        /// A number, `optimize` or `primed`.
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<String>,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
    },
    Thresholds {
        #[arg(long)]
        d: f64,
        #[arg(long)]
        p: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct DecomposeOpts {
    /// `w0`, `ghz`, `w1`, `w2`, `upb[:variant=..,eps=..]`,
    /// `horodecki:b=..[,eps=..]`, `npt:<state spec>` or `@witness.json`.
    #[arg(long)]
    target: String,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Restarts when a shift has to be optimized.
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    /// Also report generator coefficients in this convention.
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
}

#[derive(Subcommand, Debug)]
enum MonteCarloCommand {
    Curve {
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_P_POINTS)]
        p_points: usize,
        #[arg(long, default_value_t = DEFAULT_ALPHA_BINS)]
        alpha_bins: usize,
    },
    Falserate {
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_P_POINTS)]
        p_points: usize,
    },
}

#[derive(Args, Debug)]
struct SimulateOpts {
    #[arg(long)]
    state: String,
    /// JSON written by `decompose`.
    #[arg(long)]
    decomposition: PathBuf,
    #[arg(long)]
    shots: u64,
    /// Noise radius for the verdict; defaults to the state's own.
    #[arg(long)]
    d: Option<f64>,
    /// Known mixing weight, switching the verdict to the sharper threshold.
    #[arg(long)]
    p: Option<f64>,
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("WITNESSKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("WITNESSKIT_THREADS must be a positive integer, found `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    let seed = cli.seed;
    let json = cli.format.unwrap_or(Format::Json);
    let (name, payload) = match &cli.command {
        Command::State(StateCommand::Make { family, p, d, b, params }) => {
            let args = commands::StateArgs {
                family: family.clone(),
                p: *p,
                d: *d,
                b: *b,
                params: params.clone(),
            };
            ("state make", commands::state_make(&args, seed, json)?)
        }
        Command::Witness(WitnessCommand::Build {
            state,
            edge,
            epsilon,
            restarts,
        }) => {
            let args = commands::WitnessArgs {
                state: state.clone(),
                edge: *edge,
                epsilon: epsilon.clone(),
                restarts: *restarts,
            };
            ("witness build", commands::witness_build(&args, seed, json)?)
        }
        Command::Witness(WitnessCommand::Thresholds { d, p }) => {
            ("witness thresholds", commands::witness_thresholds(*d, *p, json)?)
        }
        Command::Decompose(o) => {
            let args = commands::DecomposeArgs {
                target: o.target.clone(),
                mode: o.mode,
                restarts: o.restarts,
                convention: o.convention,
            };
            ("decompose", commands::decompose(&args, seed, json)?)
        }
        Command::Montecarlo(MonteCarloCommand::Curve {
            d,
            samples,
            p_points,
            alpha_bins,
        }) => {
            let format = cli.format.unwrap_or(Format::Csv);
            let payload = commands::montecarlo_curve(d, *samples, *p_points, *alpha_bins, seed, format)?;
            ("montecarlo curve", payload)
        }
        Command::Montecarlo(MonteCarloCommand::Falserate { d, samples, p_points }) => {
            let format = cli.format.unwrap_or(Format::Csv);
            ("montecarlo falserate", commands::montecarlo_falserate(d, *samples, *p_points, seed, format)?)
        }
        Command::Simulate(o) => {
            let args = commands::SimulateArgs {
                state: o.state.clone(),
                decomposition: o.decomposition.clone(),
                shots: o.shots,
                d: o.d,
                p: o.p,
            };
            ("simulate", commands::simulate(&args, seed, json)?)
        }
    };
    output::emit(&payload, cli.out.as_deref(), name, seed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.exit_code() == 1 {
                eprintln!("error: {}", e.message());
            } else {
                println!("{}", e.to_json_line());
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
