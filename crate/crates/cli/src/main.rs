use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kreinrel::boundary::BoundaryPair;
use kreinrel::harness::checks::{check_theorem_with, lookup, CheckReport, DimRange, Execution};
use kreinrel::harness::gen::{generate, Flavor, Instance, InstanceSpec};
use kreinrel::harness::sweep::{lattice_points, pair_from_json, weyl_sweep, write_csv};
use kreinrel::harness::{summarize, theorem_ids, THEOREMS};
use kreinrel::numkernel::Tolerance;

const SWEEP_HELP: &str = "\
CSV columns, one row per grid point z:
  re_z, im_z    real and imaginary part of z
  dim_M         dimension of the graph of M(z)
  dim_mul       dimension of mul M(z)
  dim_ker       dimension of ker M(z)
  is_operator   mul M(z) = {0}
  in_sigma      ran(A - z) is full, z is no eigenvalue of T, and M(z) + z is boundedly invertible
  in_res_main   z is in the resolvent set of the main transform";

const CHECK_HELP: &str = "\
With --format csv the columns are:
  theorem_id, trials, exercised, failures, worst_residual, seed
Exit status is 1 when any check reports a failure.";

#[derive(Parser)]
#[command(name = "kreinrel", version, about = "Seeded property checks for linear relations and boundary pairs in Krein spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    UnitaryBp,
    IsometricBp,
    Obt,
    SymmetricRel,
    StdUnitaryOp,
    QbtMap,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::UnitaryBp => Flavor::UnitaryBp,
            FlavorArg::IsometricBp => Flavor::IsometricBp,
            FlavorArg::Obt => Flavor::Obt,
            FlavorArg::SymmetricRel => Flavor::SymmetricRel,
            FlavorArg::StdUnitaryOp => Flavor::StdUnitaryOp,
            FlavorArg::QbtMap => Flavor::QbtMap,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    /// Γ = identity, J = I, M(z) = z
    Identity,
    /// J = −I, Γ(f, f') = (f, −f'); for n = 1 the main transform has empty resolvent set
    Flip,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a random instance (or a fixed fixture) as JSON
    Gen {
        #[arg(long, value_enum, default_value = "unitary-bp")]
        flavor: FlavorArg,
        /// Fixed fixture instead of a random draw; ignores --flavor, --m, --kappa-minus and --seed
        #[arg(long, value_enum)]
        fixture: Option<Fixture>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        kappa_minus: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run theorem checks and print CheckReport JSON
    #[command(after_help = CHECK_HELP)]
    Check {
        /// Theorem ids, or `all`
        #[arg(required = true)]
        ids: Vec<String>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Inclusive range of state dimensions, e.g. `1..4` or `3`
        #[arg(long, default_value = "1..4")]
        dims: DimRange,
        /// Subspace-equality tolerance (largest principal angle)
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Run trials on one thread
        #[arg(long)]
        sequential: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the Weyl family of a pair over a lattice of nonreal points
    #[command(after_help = SWEEP_HELP)]
    Sweep {
        /// Boundary pair JSON, as written by `gen`
        input: PathBuf,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        re_lo: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        re_hi: f64,
        /// Lower end of the imaginary range; a negative range sweeps the lower half-plane
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        im_lo: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        im_hi: f64,
        #[arg(long, default_value_t = 5)]
        nx: usize,
        #[arg(long, default_value_t = 5)]
        ny: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate CheckReport files (single reports or arrays) into one summary
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the theorem ids known to `check`
    List,
}

/// Exit status 2 errors: bad input, unknown ids, I/O.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Usage> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Usage(format!("{}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn tolerance(angle: f64) -> Result<Tolerance, Usage> {
    Ok(Tolerance::new(Tolerance::default().rank_rel, angle)?)
}

fn reports_csv(reports: &[CheckReport]) -> Result<String, Usage> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["theorem_id", "trials", "exercised", "failures", "worst_residual", "seed"])?;
    for r in reports {
        w.write_record([
            r.theorem_id.clone(),
            r.trials.to_string(),
            r.exercised().to_string(),
            r.failures.to_string(),
            format!("{:e}", r.worst_residual),
            r.seed.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Usage(e.to_string()))?)?)
}

fn run(cli: Cli) -> Result<ExitCode, Usage> {
    match cli.command {
        Command::Gen {
            flavor,
            fixture,
            n,
            m,
            kappa_minus,
            seed,
            out,
        } => {
            let inst = match fixture {
                Some(Fixture::Identity) => Instance::Obt(BoundaryPair::identity_obt(n)),
                Some(Fixture::Flip) => Instance::UnitaryBp(BoundaryPair::flip_fixture(n)),
                None => generate(&InstanceSpec::new(n, m, kappa_minus, seed, flavor.into())?)?,
            };
            emit(out.as_deref(), &(serde_json::to_string_pretty(&inst)? + "\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            ids,
            seed,
            trials,
            dims,
            tol,
            sequential,
            format,
            out,
        } => {
            let ids: Vec<String> = if ids.iter().any(|i| i == "all") {
                theorem_ids().into_iter().map(String::from).collect()
            } else {
                ids
            };
            for id in &ids {
                lookup(id)?;
            }
            let tol = tolerance(tol)?;
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let reports = ids
                .iter()
                .map(|id| check_theorem_with(id, trials, dims, seed, tol, exec))
                .collect::<Result<Vec<_>, _>>()?;
            let text = match format {
                Format::Json if reports.len() == 1 => reports[0].to_json() + "\n",
                Format::Json => serde_json::to_string_pretty(&reports)? + "\n",
                Format::Csv => reports_csv(&reports)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(if reports.iter().all(CheckReport::passed) { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Sweep {
            input,
            re_lo,
            re_hi,
            im_lo,
            im_hi,
            nx,
            ny,
            tol,
            format,
            out,
        } => {
            let text = std::fs::read_to_string(&input).map_err(|e| Usage(format!("{}: {e}", input.display())))?;
            let bp = pair_from_json(&text)?.with_tolerance(tolerance(tol)?);
            let rows = weyl_sweep(&bp, &lattice_points((re_lo, re_hi), (im_lo, im_hi), nx, ny))?;
            let text = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&rows, &mut buf)?;
                    String::from_utf8(buf)?
                }
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
            };
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { inputs, format, out } => {
            let mut reports = Vec::new();
            for p in &inputs {
                let text = std::fs::read_to_string(p).map_err(|e| Usage(format!("{}: {e}", p.display())))?;
                match serde_json::from_str::<Vec<CheckReport>>(&text) {
                    Ok(many) => reports.extend(many),
                    Err(_) => reports.push(
                        serde_json::from_str::<CheckReport>(&text).map_err(|e| Usage(format!("{}: {e}", p.display())))?,
                    ),
                }
            }
            let summary = summarize(&reports);
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&summary)? + "\n",
                Format::Csv => reports_csv(&reports)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(if summary.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::List => {
            let mut text = String::new();
            for e in &THEOREMS {
                text.push_str(&format!("{:<18} {}\n", e.id, e.summary));
            }
            emit(None, &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
