mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use trxsave::Error;

#[derive(Parser, Debug)]
#[command(
    name = "trxsave",
    version,
    about = "BTS power-saving simulator and hysteresis tuner"
)]
struct Cli {
    /// TOML file with default values for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Root seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic fleet: per-scan traffic and busy-hour KPIs.
    Generate(GenerateArgs),
    /// Cluster cells on their KPIs.
    Cluster(ClusterArgs),
    /// Map clusters to BTSPSHYST values.
    Assign(AssignArgs),
    /// Run the network with and without power saving.
    Simulate(SimulateArgs),
    /// Print a saved comparison summary.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub days: Option<u32>,
}

#[derive(Args, Debug)]
pub struct ClusterArgs {
    /// KPI CSV.
    #[arg(long)]
    pub kpis: Option<PathBuf>,
    /// Fixed number of clusters; skips silhouette selection.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub components: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Score {
    Traffic,
    Composite,
}

#[derive(Args, Debug)]
pub struct AssignArgs {
    /// Cluster CSV written by `cluster`.
    #[arg(long)]
    pub clusters: Option<PathBuf>,
    /// BTSPSHYST per cluster, least loaded first.
    #[arg(long)]
    pub policy: Option<String>,
    #[arg(long, value_enum)]
    pub score: Option<Score>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PsMode {
    On,
    Off,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Demand {
    Rounded,
    Poisson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Packed,
    Scattered,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Traffic CSV (`cell_id,scan_index,offered_erlang`).
    #[arg(long)]
    pub traffic: Option<PathBuf>,
    /// KPI CSV; its `ts_count` column gives each cell's TRX count.
    #[arg(long)]
    pub kpis: Option<PathBuf>,
    /// Assignment CSV written by `assign`.
    #[arg(long)]
    pub assignment: Option<PathBuf>,
    /// BTSPSHYST for cells without an assignment.
    #[arg(long)]
    pub hysteresis: Option<u32>,
    #[arg(long)]
    pub off_target: Option<u32>,
    #[arg(long)]
    pub on_target: Option<u32>,
    #[arg(long)]
    pub off_delay: Option<u32>,
    #[arg(long)]
    pub on_offset: Option<u32>,
    /// Control-channel slots on TRX 1.
    #[arg(long)]
    pub cch: Option<u32>,
    /// Leading scans excluded from the settled maxima.
    #[arg(long)]
    pub settle_scans: Option<usize>,
    #[arg(long, value_enum)]
    pub ps: Option<PsMode>,
    #[arg(long, value_enum)]
    pub demand: Option<Demand>,
    #[arg(long, value_enum)]
    pub strategy: Option<Strategy>,
    /// Write per-cell timeline CSVs.
    #[arg(long)]
    pub timelines: bool,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// `summary.json` written by `simulate`.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Validation { .. } | Error::Io(_) => 2,
        Error::Input(_) | Error::Parse { .. } | Error::Json(_) => 3,
        Error::Invariant(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config::RunConfig::load_optional(cli.config.as_deref()).and_then(|cfg| {
        let ctx = commands::Context {
            seed: config::pick(cli.seed, cfg.seed, 7),
            out: config::pick(cli.out.clone(), cfg.out.clone(), PathBuf::from("out")),
            cfg,
        };
        match &cli.command {
            Command::Generate(a) => commands::generate(&ctx, a),
            Command::Cluster(a) => commands::cluster(&ctx, a),
            Command::Assign(a) => commands::assign(&ctx, a),
            Command::Simulate(a) => commands::simulate(&ctx, a),
            Command::Report(a) => commands::report(&ctx, a),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
