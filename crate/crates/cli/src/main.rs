use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deltawell_cli::commands::{self, CommandError, Dimension, Suite};

#[derive(Parser)]
#[command(name = "deltawell", version, about = "Bound states of Dirac-delta wells in one and two dimensions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Five estimators of the 1D bound-state energy.
    #[command(name = "solve1d")]
    Solve1d {
        #[command(flatten)]
        params: Physical,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// The 2D construction and its C-spectrum energy.
    #[command(name = "solve2d")]
    Solve2d {
        #[command(flatten)]
        params: Physical,
        #[arg(long, short = 'R', default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Radii at which to evaluate E^C, comma separated.
        #[arg(long, value_delimiter = ',')]
        sweep_radius: Vec<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sampled wave function as CSV.
    Profile {
        #[arg(long, value_enum, default_value = "2")]
        dimension: Dim,
        #[command(flatten)]
        params: Physical,
        #[arg(long, short = 'R', default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Numerical self-checks.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Physical {
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dim {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Bessel,
    Quad,
    Distrib,
    All,
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CommandError> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CommandError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CommandError> {
    let (report, output) = match cli.command {
        Command::Solve1d { params: p, tol, output } => (commands::solve1d(p.hbar, p.mass, p.alpha, tol)?, output),
        Command::Solve2d { params: p, radius, tol, sweep_radius, output } => {
            (commands::solve2d(p.hbar, p.mass, p.alpha, radius, tol, &sweep_radius)?, output)
        }
        Command::Profile { dimension, params: p, radius, r_max, samples, output } => {
            let dimension = match dimension {
                Dim::One => Dimension::One,
                Dim::Two => Dimension::Two,
            };
            let csv = commands::profile(dimension, p.hbar, p.mass, p.alpha, radius, r_max, samples)?;
            emit(&csv, output.as_deref())?;
            return Ok(true);
        }
        Command::Verify { suite, tol, output } => {
            let suite = match suite {
                SuiteArg::Bessel => Suite::Bessel,
                SuiteArg::Quad => Suite::Quad,
                SuiteArg::Distrib => Suite::Distrib,
                SuiteArg::All => Suite::All,
            };
            (commands::verify(suite, tol)?, output)
        }
    };
    emit(&(report.to_json() + "\n"), output.as_deref())?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ CommandError::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
