//! Command-line front end: evaluates bases, coherent states and transforms
//! onto grids and runs the verification suite.
//!
//! Exit status: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::bases::{phi_eigen, KetCombination, ModelParams};
use crate::coherent::{cs_closed_m, cs_series, BULK_TOL};
use crate::quadrature::{CircleRule, DEFAULT_CIRCLE_LEVEL, DEFAULT_DISK_SIZE};
use crate::transforms::{eval_parallel, polar_grid, transform_grid, DiskGrid};
use crate::verify::{run_suite, SuiteConfig, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "circular-bargmann", version, about = "Circular Bargmann transforms on the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the eigenspace basis element Φ_n^{γ,m} on a polar grid.
    EvalBasis {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate the coherent state |z; γ, m⟩ at one circle angle.
    EvalCs {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_complex)]
        z: Complex64,
        #[arg(long)]
        theta: f64,
        /// Sum the defining series instead of using the closed form.
        #[arg(long)]
        series: bool,
        #[arg(long, default_value_t = BULK_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Apply B_{γ,m} to a combination of circular Jacobi kets on a polar grid.
    Transform {
        #[command(flatten)]
        model: ModelArgs,
        /// Ket coefficients c_0,c_1,…, each `a+bi`.
        #[arg(long, value_delimiter = ',', value_parser = parse_complex, default_value = "0,1")]
        coeffs: Vec<Complex64>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = DEFAULT_CIRCLE_LEVEL)]
        level: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the identity-certification suite.
    Verify {
        /// Restrict the suite to one parameter set (requires --m too).
        #[arg(long, requires = "m")]
        gamma: Option<f64>,
        #[arg(long, requires = "gamma")]
        m: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_CIRCLE_LEVEL)]
        level: u32,
        #[arg(long, default_value_t = DEFAULT_DISK_SIZE.0)]
        disk_radial: usize,
        #[arg(long, default_value_t = DEFAULT_DISK_SIZE.1)]
        disk_angular: usize,
        #[arg(long, default_value_t = crate::coherent::VERIFY_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Record wall-clock runtimes (otherwise 0, keeping output reproducible).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 6.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1)]
    m: u32,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, default_value_t = 11)]
    radial: usize,
    #[arg(long, default_value_t = 8)]
    angular: usize,
    #[arg(long, default_value_t = 0.85)]
    max_radius: f64,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A validated command line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub output: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    EvalBasis { params: ModelParams, n: u32, grid: Vec<Complex64> },
    EvalCs { params: ModelParams, z: Complex64, theta: f64, series_tol: Option<f64> },
    Transform { params: ModelParams, coeffs: Vec<Complex64>, grid: Vec<Complex64>, level: u32 },
    Verify { suite: SuiteConfig, timing: bool },
}

/// A usage error; the message names the offending flag.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `-i` and the like.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid complex number `{s}` (expected a+bi)");
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that does not start the string or an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn model(args: &ModelArgs) -> Result<ModelParams, UsageError> {
    ModelParams::new(args.gamma, args.m).map_err(|e| UsageError(format!("--gamma/--m: {e}")))
}

fn grid(args: &GridArgs) -> Result<Vec<Complex64>, UsageError> {
    if args.radial == 0 {
        return Err(UsageError("--radial: must be at least 1".into()));
    }
    if args.angular == 0 {
        return Err(UsageError("--angular: must be at least 1".into()));
    }
    if !(args.max_radius > 0.0 && args.max_radius < 1.0) {
        return Err(UsageError(format!("--max-radius: must lie in (0, 1), got {}", args.max_radius)));
    }
    polar_grid(args.radial, args.angular, args.max_radius, true).map_err(|e| UsageError(e.to_string()))
}

fn level(level: u32) -> Result<u32, UsageError> {
    if (1..=24).contains(&level) {
        Ok(level)
    } else {
        Err(UsageError(format!("--level: must lie in 1..=24, got {level}")))
    }
}

/// Parses and validates `argv` (including the program name).
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    validate(cli.command).map_err(|e| Cli::command_error(e.0))
}

impl Cli {
    fn command_error(msg: String) -> clap::Error {
        use clap::CommandFactory;
        Cli::command().error(clap::error::ErrorKind::ValueValidation, msg)
    }
}

fn validate(command: Command) -> Result<RunConfig, UsageError> {
    let (task, out) = match command {
        Command::EvalBasis { model: m, n, grid: g, out } => {
            (Task::EvalBasis { params: model(&m)?, n, grid: grid(&g)? }, out)
        }
        Command::EvalCs { model: m, z, theta, series, tol, out } => {
            if !(z.norm() < 1.0) {
                return Err(UsageError(format!("--z: must lie in the open unit disk, got {z}")));
            }
            if !theta.is_finite() {
                return Err(UsageError("--theta: must be finite".into()));
            }
            if !(tol > 0.0 && tol < 1.0) {
                return Err(UsageError(format!("--tol: must lie in (0, 1), got {tol}")));
            }
            let series_tol = series.then_some(tol);
            (Task::EvalCs { params: model(&m)?, z, theta: theta.rem_euclid(std::f64::consts::TAU), series_tol }, out)
        }
        Command::Transform { model: m, coeffs, grid: g, level: l, out } => {
            if coeffs.is_empty() {
                return Err(UsageError("--coeffs: at least one coefficient is needed".into()));
            }
            (Task::Transform { params: model(&m)?, coeffs, grid: grid(&g)?, level: level(l)? }, out)
        }
        Command::Verify { gamma, m, level: l, disk_radial, disk_angular, tol, seed, timing, out } => {
            let mut suite = match (gamma, m) {
                (Some(g), Some(m)) => {
                    SuiteConfig::for_pairs(&[(g, m)]).map_err(|e| UsageError(format!("--gamma/--m: {e}")))?
                }
                _ => SuiteConfig::default(),
            };
            suite.circle_level = level(l)?;
            suite.disk_size = (disk_radial, disk_angular);
            suite.series_tol = tol;
            suite.seed = seed;
            suite.validate().map_err(|e| UsageError(e.to_string()))?;
            (Task::Verify { suite, timing }, out)
        }
    };
    Ok(RunConfig { task, output: out.output, format: out.format })
}

#[derive(Serialize)]
struct GridRow {
    re_z: f64,
    im_z: f64,
    re_value: f64,
    im_value: f64,
    abs_value: f64,
}

/// Writes a grid as CSV (`re_z,im_z,re_value,im_value,abs_value`, 17
/// significant digits) or as a JSON array of rows.
pub fn write_grid(w: &mut dyn Write, grid: &DiskGrid, format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(w, "re_z,im_z,re_value,im_value,abs_value")?;
            for (z, v) in grid.points.iter().zip(&grid.values) {
                writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", z.re, z.im, v.re, v.im, v.norm())?;
            }
            Ok(())
        }
        Format::Json => {
            let rows: Vec<GridRow> = grid
                .points
                .iter()
                .zip(&grid.values)
                .map(|(z, v)| GridRow { re_z: z.re, im_z: z.im, re_value: v.re, im_value: v.im, abs_value: v.norm() })
                .collect();
            serde_json::to_writer_pretty(&mut *w, &rows)?;
            writeln!(w)
        }
    }
}

/// Writes reports as a JSON array, or as one CSV row per report.
pub fn write_reports(w: &mut dyn Write, reports: &[VerificationReport], format: Format) -> io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, reports)?;
            writeln!(w)
        }
        Format::Csv => {
            writeln!(w, "identity_name,gamma,m,max_defect,tolerance,passed,n_samples,runtime_ms")?;
            for r in reports {
                let (g, m) = r.params.map_or((String::new(), String::new()), |p| (p.gamma().to_string(), p.m().to_string()));
                writeln!(
                    w,
                    "{},{g},{m},{:.16e},{:.16e},{},{},{}",
                    r.identity_name, r.max_defect, r.tolerance, r.passed, r.n_samples, r.runtime_ms
                )?;
            }
            Ok(())
        }
    }
}

enum Outcome {
    Grid(DiskGrid),
    Reports(Vec<VerificationReport>),
}

fn execute(task: &Task) -> crate::Result<Outcome> {
    match task {
        Task::EvalBasis { params, n, grid } => {
            let values = eval_parallel(grid, |z| phi_eigen(*n, *params, z))?;
            Ok(Outcome::Grid(DiskGrid::new(grid.clone(), values, *params, "phi_eigen")?))
        }
        Task::EvalCs { params, z, theta, series_tol } => {
            let value = match series_tol {
                Some(tol) => cs_series(*params, *z, *theta, *tol)?.value,
                None => cs_closed_m(*params, *z, *theta)?,
            };
            Ok(Outcome::Grid(DiskGrid::new(vec![*z], vec![value], *params, "coherent_state")?))
        }
        Task::Transform { params, coeffs, grid, level } => {
            let phi = KetCombination::new(params.gamma_prime(), coeffs.clone())?;
            let rule = CircleRule::new(params.gamma_prime(), *level)?;
            Ok(Outcome::Grid(transform_grid(*params, &phi, grid, &rule)?))
        }
        Task::Verify { suite, timing } => {
            let mut reports = run_suite(suite)?;
            if !timing {
                reports.iter_mut().for_each(|r| r.runtime_ms = 0);
            }
            Ok(Outcome::Reports(reports))
        }
    }
}

fn emit(outcome: &Outcome, config: &RunConfig) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match &config.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match outcome {
        Outcome::Grid(g) => write_grid(&mut *sink, g, config.format)?,
        Outcome::Reports(r) => write_reports(&mut *sink, r, config.format)?,
    }
    sink.flush()
}

/// Runs a validated configuration and returns the process exit status.
pub fn run(config: &RunConfig) -> i32 {
    let outcome = match execute(&config.task) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILED;
        }
    };
    if let Err(e) = emit(&outcome, config) {
        let target = config.output.as_ref().map_or_else(|| "<stdout>".to_owned(), |p| p.display().to_string());
        eprintln!("error: cannot write {target}: {e}");
        return EXIT_IO;
    }
    match outcome {
        Outcome::Reports(reports) => {
            let failed: Vec<&VerificationReport> = reports.iter().filter(|r| !r.passed).collect();
            for r in &failed {
                let params = r.params.map_or_else(String::new, |p| format!(" (gamma={}, m={})", p.gamma(), p.m()));
                match &r.error {
                    Some(e) => eprintln!("FAILED {}{params}: {e}", r.identity_name),
                    None => eprintln!(
                        "FAILED {}{params}: defect {:e} > tolerance {:e}",
                        r.identity_name, r.max_defect, r.tolerance
                    ),
                }
            }
            if failed.is_empty() {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Outcome::Grid(_) => EXIT_OK,
    }
}

/// Full entry point: parse, run, and map every outcome to an exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_config(argv) {
        Ok(config) => run(&config),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
