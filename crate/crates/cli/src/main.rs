mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{Manifest, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] dyncache::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "dyncache",
    version,
    about = "Dynamic cache instantiation models and sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

/// Parameters shared by every command; defaults are the reference workload.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Catalog size.
    #[arg(long = "n", global = true, default_value_t = 100_000)]
    pub n: usize,
    /// Zipf exponent.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub alpha: f64,
    /// Insertion threshold; a comma-separated list where a command sweeps k.
    #[arg(long = "k", global = true, value_delimiter = ',')]
    pub k: Option<Vec<u32>>,
    /// Cache lifetime in requests.
    #[arg(long = "l", global = true)]
    pub l: Option<u64>,
    /// Candidate window in requests (defaults to the lifetime).
    #[arg(long = "w", global = true)]
    pub w: Option<u64>,
    /// Cache capacity in objects.
    #[arg(long, global = true)]
    pub capacity: Option<f64>,
    /// Size-independent cost per minute.
    #[arg(long, global = true, default_value_t = 500.0)]
    pub b: f64,
    /// Required fraction of the period's requests served from the cache.
    #[arg(long, global = true, default_value_t = 0.4)]
    pub hmin: f64,
    /// Period in minutes.
    #[arg(long = "T", global = true, default_value_t = 1440.0)]
    pub period: f64,
    /// Peak request rate per minute.
    #[arg(long, global = true, default_value_t = 20.0)]
    pub lambda_high: f64,
    /// Low request rate of the plateau/valley profile (default 0.1 of the peak).
    #[arg(long, global = true)]
    pub lambda_low: Option<f64>,
    /// Plateau/valley shape in [-1, 1]; triangular profile when absent.
    #[arg(long = "h", global = true, allow_hyphen_values = true)]
    pub h: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Requests per steady-state simulation, warmup included.
    #[arg(long, global = true, default_value_t = 6_000_000)]
    pub requests: u64,
    #[arg(long, global = true, default_value_t = 2_000_000)]
    pub warmup: u64,
    /// CSV destination (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Manifest destination (defaults to `<out>.manifest`, or stderr).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Approx,
}

impl From<ModeArg> for dyncache::Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => dyncache::Mode::Exact,
            ModeArg::Approx => dyncache::Mode::Approx,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    B,
    Hmin,
    LambdaHigh,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Rcw,
    Lru,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady-state RCW metrics across target occupancies.
    SteadySweep {
        /// Target occupancies as fractions of the catalog.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.0001,0.001,0.01,0.1,0.2"
        )]
        grid: Vec<f64>,
        /// Add LRU and RCW simulation columns.
        #[arg(long)]
        sim: bool,
    },
    /// Insertion fraction needed for each target hit rate, per k.
    Tradeoff {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.05,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"
        )]
        targets: Vec<f64>,
    },
    /// Fill-period hit rates after instantiation.
    TransientSweep {
        #[arg(long, value_delimiter = ',', default_value = "0.001,0.01,0.1,0.2")]
        grid: Vec<f64>,
        /// Add simulated fill-period columns.
        #[arg(long)]
        sim: bool,
        #[arg(long, default_value_t = 2000)]
        max_periods: u64,
    },
    /// Minimal cost relative to the lower bound along one parameter.
    OptimizeSweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
        /// Log-spaced capacities searched.
        #[arg(long, default_value_t = 200)]
        capacities: usize,
        /// Duration step in minutes.
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
    /// Lower bounds on duration and cost.
    Bound {
        #[arg(long, value_delimiter = ',')]
        hmins: Option<Vec<f64>>,
        #[arg(long, default_value_t = 200)]
        capacities: usize,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
    /// One simulation run.
    Simulate {
        #[arg(long, value_enum, default_value_t = PolicyArg::Rcw)]
        policy: PolicyArg,
        /// Measure fill periods instead of steady state.
        #[arg(long)]
        transient: bool,
        #[arg(long, default_value_t = 2000)]
        max_periods: u64,
    },
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SteadySweep { .. } => "steady-sweep",
            Command::Tradeoff { .. } => "tradeoff",
            Command::TransientSweep { .. } => "transient-sweep",
            Command::OptimizeSweep { .. } => "optimize-sweep",
            Command::Bound { .. } => "bound",
            Command::Simulate { .. } => "simulate",
            Command::Replay { .. } => "replay",
        }
    }
}

/// Table plus whether every row was infeasible.
pub struct Output {
    pub table: Table,
    pub all_infeasible: bool,
}

fn run(argv: Vec<String>) -> Result<ExitCode, CliError> {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(ExitCode::SUCCESS);
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let common = &cli.common;
    let output = match &cli.command {
        Command::Replay { manifest } => {
            let text = std::fs::read_to_string(manifest).map_err(|source| CliError::Io {
                path: manifest.display().to_string(),
                source,
            })?;
            let args = Manifest::parse_args(&text);
            if args.is_empty() {
                return Err(CliError::Usage(format!(
                    "{} records no arguments",
                    manifest.display()
                )));
            }
            return run(args);
        }
        Command::SteadySweep { grid, sim } => commands::steady_sweep(common, grid, *sim)?,
        Command::Tradeoff { targets } => commands::tradeoff(common, targets)?,
        Command::TransientSweep {
            grid,
            sim,
            max_periods,
        } => commands::transient_sweep(common, grid, *sim, *max_periods)?,
        Command::OptimizeSweep {
            param,
            values,
            capacities,
            step,
        } => commands::optimize_sweep(common, *param, values.as_deref(), *capacities, *step)?,
        Command::Bound {
            hmins,
            capacities,
            step,
        } => commands::bound(common, hmins.as_deref(), *capacities, *step)?,
        Command::Simulate {
            policy,
            transient,
            max_periods,
        } => commands::simulate(common, *policy, *transient, *max_periods)?,
    };
    emit(&cli, &argv, &output.table)?;
    Ok(if output.all_infeasible {
        eprintln!("note: no feasible point in the sweep");
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn emit(cli: &Cli, argv: &[String], table: &Table) -> Result<(), CliError> {
    let common = &cli.common;
    let io_err = |path: &std::path::Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    match &common.out {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            let mut w = BufWriter::new(file);
            table
                .write_csv(&mut w)
                .and_then(|_| w.flush())
                .map_err(io_err(path))?;
        }
        None => table
            .write_csv(&mut io::stdout().lock())
            .map_err(io_err("<stdout>".as_ref()))?,
    }

    let mut m = Manifest::default();
    m.set("command", cli.command.name());
    m.set("tool_version", env!("CARGO_PKG_VERSION"));
    m.set("n", common.n);
    m.set("alpha", common.alpha);
    let ks: Vec<String> = common.k.iter().flatten().map(u32::to_string).collect();
    m.set("k", ks.join(","));
    m.set("l", common.l.map(|v| v.to_string()).unwrap_or_default());
    m.set("w", common.w.map(|v| v.to_string()).unwrap_or_default());
    m.set(
        "capacity",
        common.capacity.map(|v| v.to_string()).unwrap_or_default(),
    );
    m.set("b", common.b);
    m.set("hmin", common.hmin);
    m.set("T", common.period);
    m.set("lambda_high", common.lambda_high);
    m.set(
        "lambda_low",
        common.lambda_low.map(|v| v.to_string()).unwrap_or_default(),
    );
    m.set("h", common.h.map(|v| v.to_string()).unwrap_or_default());
    m.set("mode", format!("{:?}", common.mode).to_lowercase());
    m.set("seed", common.seed);
    m.set("generator", dyncache::simulator::GENERATOR);
    m.set("requests", common.requests);
    m.set("warmup", common.warmup);
    let out = common.out.as_ref().map(|p| p.display().to_string());
    m.set("out", out.clone().unwrap_or_else(|| "-".into()));
    m.set("rows", table.rows.len());
    for (i, a) in argv.iter().enumerate() {
        m.set(&format!("arg.{i}"), a);
    }

    let manifest_path = common.manifest.clone().or_else(|| {
        common
            .out
            .as_ref()
            .map(|p| PathBuf::from(format!("{}.manifest", p.display())))
    });
    match manifest_path {
        Some(path) => {
            let mut f = File::create(&path).map_err(io_err(&path))?;
            m.write(&mut f).map_err(io_err(&path))?;
        }
        None => m
            .write(&mut io::stderr().lock())
            .map_err(io_err("<stderr>".as_ref()))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
