use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phrictl::artifacts::bundle_path;
use phrictl::{CliError, CliResult, Pipeline, ToolkitConfig};

/// Transparency/robustness design maps, Pareto fronts and design selection
/// for fractional-order admittance controllers.
#[derive(Parser)]
#[command(name = "phrictl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config; defaults apply to every missing field.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integration orders (overrides `alphas`), e.g. `1,0.7,0.4`.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep transparency and robustness maps.
    Sweep(#[command(flatten)] Common),
    /// Build Pareto fronts, sweeping first if needed.
    Front(#[command(flatten)] Common),
    /// Apply constraints and the selection policy.
    Select(#[command(flatten)] Common),
    /// Write the explorer bundle.
    Bundle {
        #[command(flatten)]
        common: Common,
        /// Minimum map stride; raised as needed to fit 100x100.
        #[arg(long, default_value_t = 1)]
        downsample: usize,
    },
    /// Serve the bundle over HTTP.
    Serve {
        #[command(flatten)]
        common: Common,
        /// Port on 127.0.0.1; 0 picks a free one.
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of explorer assets served at `/`.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
}

fn load(common: &Common) -> CliResult<ToolkitConfig> {
    let mut cfg = match &common.config {
        Some(path) => ToolkitConfig::load(path)?,
        None => ToolkitConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(alphas) = &common.alphas {
        cfg.alphas = alphas.clone();
    }
    Ok(cfg)
}

fn init_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("PHRICTL_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("PHRICTL_THREADS={value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Compute(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match cli.command {
        Command::Sweep(common) => {
            Pipeline::new(load(&common)?.resolve()?).sweep()?;
        }
        Command::Front(common) => {
            Pipeline::new(load(&common)?.resolve()?).front()?;
        }
        Command::Select(common) => {
            let report = Pipeline::new(load(&common)?.resolve()?).select()?;
            match &report.chosen {
                Some(c) => println!("chosen: alpha={} m_F={} b_F={} C={} rho={}", c.alpha, c.m_f, c.b_f, c.c, c.rho),
                None => println!("chosen: none"),
            }
        }
        Command::Bundle { common, downsample } => {
            let pipeline = Pipeline::new(load(&common)?.resolve()?);
            pipeline.bundle(downsample)?;
            println!("{}", bundle_path(&pipeline.out).display());
        }
        Command::Serve { common, port, assets } => {
            let cfg = load(&common)?;
            phrictl::serve::serve(&bundle_path(&cfg.output_dir), port, assets)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
