//! `womlab` — solve, sweep, verify, and plot duopoly price-search markets
//! with word-of-mouth information diffusion.
//!
//! Exit codes: 0 success, 1 numerical failure (divergence, no equilibrium to
//! verify, failed verification), 2 bad flags, invalid parameters, or
//! malformed input files.

mod config;
mod plot;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use womlab::eq_asym::solve_asym;
use womlab::eq_baseline::solve_equilibria;
use womlab::{AsymRegime, DegreeDistribution, MarketParams};

use config::{Market, MarketOpts};

#[derive(Parser)]
#[command(
    name = "womlab",
    version,
    about = "price search with word-of-mouth over a random network"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one market and print every interior equilibrium.
    Solve(SolveArgs),
    /// Evaluate stable equilibria over a parameter grid and write CSV.
    Sweep(SweepArgs),
    /// Monte-Carlo check of the closed forms at the stable equilibrium.
    Verify(VerifyArgs),
    /// Render a sweep CSV as an SVG line chart.
    Plot(PlotArgs),
    /// Solve for degree-cutoff equilibria and print them.
    Asym(AsymArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    market: MarketOpts,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    market: MarketOpts,
    /// Grid variable: gamma, delta, s, or kmax.
    #[arg(long)]
    variable: Option<String>,
    /// Grid lower end.
    #[arg(long)]
    lo: Option<f64>,
    /// Grid upper end.
    #[arg(long)]
    hi: Option<f64>,
    /// Number of grid points (>= 2).
    #[arg(long)]
    steps: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    market: MarketOpts,
    /// RNG seed (default 42).
    #[arg(long)]
    seed: Option<u64>,
    /// Total consumer draws, split over 20 replications (default 1000000).
    #[arg(long)]
    samples: Option<u64>,
    /// Shift the search probability off its equilibrium value (for testing
    /// that the indifference check actually bites).
    #[arg(long = "q-offset", default_value_t = 0.0, allow_hyphen_values = true)]
    q_offset: f64,
}

#[derive(Args)]
struct PlotArgs {
    /// Input CSV (as written by `womlab sweep`).
    csv: PathBuf,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AsymArgs {
    #[command(flatten)]
    market: MarketOpts,
    /// Optional CSV dump of the cutoff equilibria.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// CLI-level error with its exit code: `Usage` exits 2, `Run` exits 1.
pub enum CliError {
    Usage(String),
    Run(String),
}

impl From<womlab::Error> for CliError {
    fn from(e: womlab::Error) -> Self {
        match e {
            womlab::Error::InvalidArgument(_) => CliError::Usage(e.to_string()),
            _ => CliError::Run(e.to_string()),
        }
    }
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn build_market(market: &Market) -> Result<(DegreeDistribution, MarketParams), CliError> {
    let dist = DegreeDistribution::power_law(market.gamma, market.kmax)?;
    let params = MarketParams::new(market.v, market.s, market.delta)?;
    Ok((dist, params))
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let market = config::resolve_market(&args.market, &["fig1", "fig8"])?;
    let (dist, params) = build_market(&market)?;
    let eqs = solve_equilibria(&dist, &params)?;
    if eqs.is_empty() {
        println!("NO-TRADE-ONLY");
        return Ok(());
    }
    println!(
        "{:>12} {:>12} {:>12} {:>12} {:>12} {:>8}",
        "q", "r", "p_lo", "e_p", "profit", "stable"
    );
    for eq in &eqs {
        println!(
            "{:>12.8} {:>12.8} {:>12.8} {:>12.8} {:>12.8} {:>8}",
            eq.q,
            eq.law.p_hi(),
            eq.law.p_lo(),
            eq.law.e_p(),
            eq.profit,
            if eq.stable { "yes" } else { "no" }
        );
    }
    Ok(())
}

fn cmd_asym(args: &AsymArgs) -> Result<(), CliError> {
    let market = config::resolve_market(&args.market, &["fig1", "fig8"])?;
    let (dist, params) = build_market(&market)?;
    let eqs = solve_asym(&dist, &params)?;
    if eqs.is_empty() {
        println!("NO-TRADE-ONLY");
        return Ok(());
    }
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12} {:>9}",
        "khat", "q", "w", "eta_hat", "r", "regime"
    );
    for eq in &eqs {
        println!(
            "{:>6} {:>12.8} {:>12.8} {:>12.8} {:>12.8} {:>9}",
            eq.khat,
            eq.q,
            eq.w,
            eq.eta_hat,
            eq.law.p_hi(),
            match eq.regime {
                AsymRegime::Interior => "interior",
                AsymRegime::Boundary => "boundary",
            }
        );
    }
    if let Some(out) = &args.out {
        use womlab::textio::fmt_real;
        let mut csv = String::from("khat,q,w,w_hat,eta_hat,r,regime,stable\n");
        for eq in &eqs {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                eq.khat,
                fmt_real(eq.q),
                fmt_real(eq.w),
                fmt_real(eq.w_hat),
                fmt_real(eq.eta_hat),
                fmt_real(eq.law.p_hi()),
                match eq.regime {
                    AsymRegime::Interior => "interior",
                    AsymRegime::Boundary => "boundary",
                },
                if eq.stable { "yes" } else { "no" }
            ));
        }
        write_file(out, &csv)?;
    }
    Ok(())
}

fn cmd_plot(args: &PlotArgs) -> Result<(), CliError> {
    let csv = std::fs::read_to_string(&args.csv)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.csv.display())))?;
    let svg = plot::render_svg(&csv).map_err(CliError::Usage)?;
    write_file(&args.out, &svg)
}

fn setup_threads() -> Result<(), CliError> {
    match std::env::var("WOMLAB_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => match raw.parse::<usize>() {
            Ok(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Run(format!("thread pool: {e}"))),
            _ => Err(CliError::Usage(format!(
                "WOMLAB_THREADS must be a positive integer (got {raw:?})"
            ))),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = setup_threads().and_then(|()| match &cli.cmd {
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Sweep(args) => sweep::cmd_sweep(args),
        Cmd::Verify(args) => verify::cmd_verify(args),
        Cmd::Plot(args) => cmd_plot(args),
        Cmd::Asym(args) => cmd_asym(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
