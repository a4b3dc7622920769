use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qmeasure::experiment::{compare_collapse_vs_restriction, run_cat, run_scenario, CatGeometry};
use qmeasure::report::{emit_cat_report, emit_comparison, emit_report, emit_verify, Format};
use qmeasure::scenario::parse_scenario;
use qmeasure::verify::{run_all, SuiteConfig};
use qmeasure::{Complex64, Error, Result};

#[derive(Parser)]
#[command(
    name = "qmeasure",
    version,
    about = "Collapse versus premeasurement and restriction, in finite dimensions"
)]
struct Cli {
    /// Output format: table or json
    #[arg(long, global = true, default_value = "table")]
    format: String,

    /// Largest deviation accepted before exiting with status 2
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file
    Run { file: PathBuf },
    /// Cat superposition c1 Psi_1 + c2 Psi_2
    Cat {
        /// Amplitude of Psi_1 as re,im
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
        /// Amplitude of Psi_2 as re,im
        #[arg(long, allow_hyphen_values = true)]
        c2: String,
        /// Spin-chain length (at most 10)
        #[arg(long, default_value_t = 8, conflicts_with = "macro_dim")]
        chain: u32,
        /// Use a single pointer of this dimension instead of a spin chain
        #[arg(long)]
        macro_dim: Option<usize>,
    },
    /// Compare collapse and restriction on random states and bases
    Compare {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the built-in invariant suite
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

const DEFAULT_TOL: f64 = 1e-9;

fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::InvalidArgument(format!("expected re,im but got {s:?}"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn check(what: &str, deviation: f64, tol: f64) -> Result<()> {
    if deviation <= tol {
        Ok(())
    } else {
        Err(Error::InvariantViolation(format!(
            "{what} {deviation:e} exceeds tolerance {tol:e}"
        )))
    }
}

fn execute(cli: Cli) -> Result<()> {
    let format: Format = cli.format.parse()?;
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidArgument(
                "--tol must be a finite non-negative number".into(),
            ));
        }
    }
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);

    match cli.command {
        Command::Run { file } => {
            let scenario = parse_scenario(&read(&file)?)?;
            let report = run_scenario(&scenario)?;
            print!("{}", emit_report(&report, format));
            check("max deviation", report.max_deviation, tol)
        }
        Command::Cat {
            c1,
            c2,
            chain,
            macro_dim,
        } => {
            let geometry = match macro_dim {
                Some(dim) => CatGeometry::Macro { dim },
                None => CatGeometry::SpinChain { length: chain },
            };
            let report = run_cat(parse_complex(&c1)?, parse_complex(&c2)?, geometry)?;
            print!("{}", emit_cat_report(&report, format));
            check("max deviation", report.report.max_deviation, tol)?;
            check("expectation gap", report.max_expectation_gap, tol)
        }
        Command::Compare { file, random, seed } => {
            let scenario = parse_scenario(&read(&file)?)?;
            let summary = compare_collapse_vs_restriction(&scenario, random, seed)?;
            print!("{}", emit_comparison(&summary, format));
            check(
                "worst deviation",
                summary.worst_deviation.max(summary.scenario_deviation),
                tol,
            )
        }
        Command::Verify { seed } => {
            let config = SuiteConfig {
                seed,
                tol: cli.tol,
                ..SuiteConfig::default()
            };
            let results = run_all(&config)?;
            print!("{}", emit_verify(&results, format));
            let failed: Vec<&str> = results.iter().filter(|p| !p.passed).map(|p| p.name).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Error::InvariantViolation(format!("failed: {}", failed.join(", "))))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| execute(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(3)
        }
    }
}
