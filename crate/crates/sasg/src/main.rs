use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sasg::cli::{self, CommandKind};

/// Sensor Access Signaling Game toolkit: enumerate equilibria, sweep Nature's
/// probability, or simulate the repeated game. All commands read a JSON
/// config and write deterministic CSV files.
#[derive(Parser)]
#[command(name = "sasg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate and verify pure and hybrid equilibria; writes pbne.csv.
    Enumerate(CommonArgs),
    /// Monte Carlo sweep over Nature's probability; writes
    /// sweep_<scenario>.csv and its closed-form oracle companion.
    Sweep(CommonArgs),
    /// Repeated game with reward/punishment strategies; writes
    /// repeated_trace.csv and repeated_summary.csv.
    Repeated(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config's output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run() -> Result<(), cli::CliError> {
    let parsed = Cli::parse();
    let (kind, args) = match &parsed.command {
        Command::Enumerate(a) => (CommandKind::Enumerate, a),
        Command::Sweep(a) => (CommandKind::Sweep, a),
        Command::Repeated(a) => (CommandKind::Repeated, a),
    };
    let cfg = cli::load_config(&args.config, kind)?;
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    match kind {
        CommandKind::Enumerate => cli::cmd_enumerate(&cfg, &out_dir),
        CommandKind::Sweep => cli::cmd_sweep(&cfg, &out_dir, seed),
        CommandKind::Repeated => cli::cmd_repeated(&cfg, &out_dir, seed),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sasg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
