use clap::{Parser, Subcommand};
use illiquid_cli::{bootstrap, figures, load_market, price, verify, CliError, Format, RunConfig, VerifyOptions};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "illiquid", version, about = "Liquidity premium bounds for illiquid corporate bonds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (flat key = value file).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overrides `out_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json, overrides `format`.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Monte-Carlo seed, overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo paths, overrides `paths`.
    #[arg(long, global = true)]
    paths: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Bootstrap the discount and Zeta curves and write knots and residuals.
    Bootstrap,
    /// Price every bond at every ttl.
    Price,
    /// Monte-Carlo check that each premium lies between its bounds.
    Verify {
        /// Exchange the two bounds; every row must then fail.
        #[arg(long)]
        self_test_swap: bool,
    },
    /// Write plot data for bound gaps and yields.
    Figures,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .ok_or_else(|| CliError::Input("--config <path> is required".into()))?;
    let mut cfg = RunConfig::load(&path)?;
    if let Some(o) = cli.out {
        cfg.out_dir = o;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(p) = cli.paths {
        cfg.paths = p;
    }
    let format: Format = cfg.format.parse()?;
    let market = load_market(&cfg)?;
    let out = cfg.out_dir.clone();
    match cli.command {
        Command::Bootstrap => {
            for f in bootstrap(&cfg, &market, &out, format)? {
                println!("{}", f.display());
            }
        }
        Command::Price => {
            let rows = price(&cfg, &market, &out, format)?;
            println!("{} reports written to {}", rows.len(), out.display());
        }
        Command::Verify { self_test_swap } => {
            let opts = VerifyOptions { paths: cfg.paths, steps: cfg.steps, seed: cfg.seed, swap_bounds: self_test_swap };
            let rows = verify(&cfg, &market, &out, &opts)?;
            println!("{} checks passed, results in {}", rows.len(), out.join("verify.json").display());
        }
        Command::Figures => {
            for f in figures(&cfg, &market, &out)? {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
