use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twodof_sea::cli::{self, CommandResult, TransferKind};

#[derive(Parser)]
#[command(
    name = "twodof-sea",
    version,
    about = "2-DOF SEA force controller design and simulation"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design the configured controller and write it as JSON.
    Design {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the configured scenario; write the trace CSV and metrics JSON.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Trace CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Metrics JSON path (default: trace path with `.metrics.json`).
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Simulate every point of the config's `sweep` grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Frequency response of the plant or a closed-loop transfer.
    Freqresp {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        w_min: f64,
        #[arg(long, default_value_t = 1000.0)]
        w_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, value_enum, default_value = "t_ref")]
        transfer: TransferKind,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result: CommandResult = match args.command {
        Command::Design { config, out } => cli::cmd_design(&config, &out),
        Command::Simulate {
            config,
            out,
            metrics,
            seed,
        } => {
            let metrics = metrics.unwrap_or_else(|| out.with_extension("metrics.json"));
            cli::cmd_simulate(&config, &out, &metrics, seed)
        }
        Command::Sweep { config, out, seed } => cli::cmd_sweep(&config, &out, seed),
        Command::Freqresp {
            config,
            out,
            w_min,
            w_max,
            points,
            transfer,
        } => cli::cmd_freqresp(&config, &out, w_min, w_max, points, transfer),
    };
    if result.is_success() {
        println!("{}", result.message);
    } else {
        eprintln!("error: {}", result.message);
    }
    ExitCode::from(result.exit_code as u8)
}
