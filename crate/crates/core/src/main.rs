use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mwdecay::channels::ChannelKind;
use mwdecay::runner::{
    detect_all, emit_curve_csv, emit_rates_csv, emit_tsep_csv, fit_all, max_increase, method_discrepancies,
    read_curve_csv, run_sweep, verify, Method, StateKind, SweepConfig, DEFAULT_GAMMA_T_MAX, DEFAULT_GRID_POINTS,
};
use mwdecay::{Error, Result};

/// Global-entanglement decay of GHZ and W registers under local noise.
#[derive(Parser)]
#[command(name = "mwdecay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample E_gl(γt) curves and write them as CSV.
    Sweep {
        #[arg(long)]
        state: StateKind,
        #[arg(long)]
        channel: ChannelKind,
        /// Comma-separated qubit counts.
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_GAMMA_T_MAX)]
        gamma_t_max: f64,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        points: usize,
        /// Comma-separated methods: closed, kraus, ode.
        #[arg(long, value_delimiter = ',', required = true)]
        method: Vec<Method>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit exponential decay rates to every curve in a curve CSV.
    Rates {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Find the separation time of every curve in a curve CSV.
    Tsep {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance checks and print a PASS/FAIL table.
    Verify,
}

fn sweep(config: SweepConfig) -> Result<ExitCode> {
    let points = run_sweep(&config)?;
    if let Some(path) = &config.output {
        emit_curve_csv(&points, path)?;
    }
    let rise = max_increase(&points);
    if rise > 1e-10 {
        return Err(Error::Invariant(format!("a curve increases by {rise:e}")));
    }
    let mut worst = None;
    for d in method_discrepancies(&points) {
        eprintln!(
            "{}/{} n={} {} vs {}: max |Δ| = {:.3e} over {} points (tol {:e})",
            d.state, d.channel, d.n, d.first, d.second, d.max_abs, d.compared, d.tolerance()
        );
        if d.max_abs > d.tolerance() {
            worst = Some(d);
        }
    }
    match worst {
        Some(d) => Err(Error::Invariant(format!(
            "{} vs {} disagree by {:e} at n = {}",
            d.first, d.second, d.max_abs, d.n
        ))),
        None => Ok(ExitCode::SUCCESS),
    }
}

fn rates(input: PathBuf, out: PathBuf) -> Result<ExitCode> {
    let points = read_curve_csv(&input)?;
    let mut fits = Vec::new();
    for ((state, channel, n, method), fit) in fit_all(&points) {
        match fit {
            Ok(f) => fits.push(f),
            Err(e) => eprintln!("skipping {state}/{channel} n={n} {method}: {e}"),
        }
    }
    emit_rates_csv(&fits, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn tsep(input: PathBuf, out: PathBuf) -> Result<ExitCode> {
    let points = read_curve_csv(&input)?;
    emit_tsep_csv(&detect_all(&points), &out)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sweep {
            state,
            channel,
            n,
            gamma_t_max,
            points,
            method,
            out,
        } => {
            let mut config = SweepConfig::new(state, channel, n, method).with_grid(gamma_t_max, points);
            config.output = Some(out);
            sweep(config)
        }
        Command::Rates { input, out } => rates(input, out),
        Command::Tsep { input, out } => tsep(input, out),
        Command::Verify => {
            let reports = verify::run_all();
            for r in &reports {
                println!("{r}");
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            println!("{} passed, {} failed", reports.len() - failed, failed);
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
