//! Command-line front end.
//!
//! Exit status: 0 success, 1 verification failure, 2 usage error,
//! 3 numerical non-convergence.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exec::{set_thread_cap, Execution};
use crate::geometry::{curvature_table, decay_functional, table_json, write_curvature_csv, write_decay_csv, DecayRow};
use crate::profile::{build_profile_with_step, make_spec, CatenoidSpec, DEFAULT_PROFILE_TOL, DEFAULT_STEP};
use crate::report::{exit_code, full_report, Fault, ReportOptions, EQUALITY_FD_STEP};
use crate::simons::{algebraic_battery, catenoid_breakdown, catenoid_equality_check};
use crate::spectrum::{
    eigenvalues_and_functions, eigenvalues_with, morse_index_with, IndexConfig, SpectralProblem, DEFAULT_GRID_N,
    DEFAULT_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "catenoid", version, about = "Numerical checks on higher-dimensional catenoids")]
struct Cli {
    /// Cap the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
struct SpecArgs {
    /// Dimension of the catenoid (n >= 3).
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Waist radius.
    #[arg(long, default_value_t = 1.0)]
    phi0: f64,
}

impl SpecArgs {
    fn build(&self) -> Result<CatenoidSpec> {
        make_spec(self.n, self.phi0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the profile curve.
    Profile {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long = "r-max", default_value_t = 10.0)]
        r_max: f64,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_PROFILE_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tabulate principal curvatures and |A|^2.
    Geometry {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long = "r-max", default_value_t = 10.0)]
        r_max: f64,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check the Simons identity on random tensors and on the catenoid.
    VerifySimons {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long = "fd-step", default_value_t = EQUALITY_FD_STEP)]
        fd_step: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Lowest Dirichlet eigenvalues of one mode of the stability operator.
    Spectrum {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long = "R", default_value_t = 8.0)]
        half_width: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        mode: usize,
        #[arg(long, default_value_t = 2)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_GRID_N)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Solve on (r0, R) instead of (-R, R).
        #[arg(long)]
        r0: Option<f64>,
        /// Include base-grid eigenfunctions.
        #[arg(long)]
        functions: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Morse index on (-R, R).
    Index {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long = "R", default_value_t = 8.0)]
        half_width: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long = "l-max", default_value_t = 6)]
        l_max: usize,
        #[arg(long, default_value_t = DEFAULT_GRID_N)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The shell functional F(R) = R^-2 * integral of |A|^(2(n-2)/n) over B(2R) \ B(R).
    Decay {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long = "R", num_args = 1.., default_values_t = [10.0, 100.0, 1000.0])]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run every verification suite.
    Report {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long = "R", default_value_t = 8.0)]
        half_width: f64,
        /// Override the quadrature and eigenvalue tolerances.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        /// Record wall time per suite (makes the output run-dependent).
        #[arg(long)]
        timings: bool,
        #[arg(long = "inject-fault", hide = true)]
        inject_fault: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

enum Payload {
    Json(serde_json::Value),
    Text(Vec<u8>),
}

struct Outcome {
    payload: Payload,
    code: i32,
}

fn json_of<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("--{name} must be positive, got {v}")))
    }
}

fn json_only(cmd: &str, out: &OutputArgs) -> Result<()> {
    if out.format == Some(Format::Csv) {
        return Err(Error::invalid(format!("{cmd} only produces JSON")));
    }
    Ok(())
}

fn execute(command: &Command) -> Result<Outcome> {
    let exec = Execution::default();
    match command {
        Command::Profile {
            spec,
            r_max,
            step,
            tol,
            out,
        } => {
            positive("tol", *tol)?;
            let spec = spec.build()?;
            let profile = build_profile_with_step(&spec, *r_max, *step, *tol)?;
            let payload = if out.format == Some(Format::Json) {
                Payload::Json(table_json(&spec, profile.points()))
            } else {
                let mut buf = Vec::new();
                profile.write_csv(&mut buf).map_err(io_error)?;
                Payload::Text(buf)
            };
            Ok(Outcome { payload, code: EXIT_OK })
        }
        Command::Geometry { spec, r_max, step, out } => {
            let spec = spec.build()?;
            let profile = build_profile_with_step(&spec, *r_max, *step, DEFAULT_PROFILE_TOL)?;
            let rows = curvature_table(&profile);
            let payload = if out.format == Some(Format::Json) {
                Payload::Json(table_json(&spec, &rows))
            } else {
                let mut buf = Vec::new();
                write_curvature_csv(&rows, &mut buf).map_err(io_error)?;
                Payload::Text(buf)
            };
            Ok(Outcome { payload, code: EXIT_OK })
        }
        Command::VerifySimons {
            spec,
            instances,
            seed,
            fd_step,
            out,
        } => {
            json_only("verify-simons", out)?;
            positive("fd-step", *fd_step)?;
            let spec = spec.build()?;
            let mut max_rel = 0.0f64;
            let mut min_term = f64::INFINITY;
            let mut per_n = Vec::new();
            for n in 3..=7 {
                let b = algebraic_battery(n, *instances, *seed, exec)?;
                max_rel = max_rel.max(b.max_relative_residual);
                min_term = min_term.min(b.min_term);
                per_n.push(b);
            }
            let r_values: Vec<f64> = (0..=20).map(|i| -5.0 + 0.5 * i as f64).collect();
            let mut max_e = 0.0f64;
            let mut max_eq = 0.0f64;
            for &r in &r_values {
                let b = catenoid_breakdown(&spec, r)?;
                let a2 = crate::geometry::norm_a2_closed(&spec, spec.point_at(r)?.phi)?;
                max_e = max_e.max(b.e() / (a2 * a2));
                max_eq = max_eq.max(catenoid_equality_check(&spec, r, *fd_step)?.relative);
            }
            let passed = max_rel <= 1e-12 && min_term >= 0.0 && max_e <= 1e-10 && max_eq <= 1e-6;
            let value = json!({
                "algebraic": {
                    "instances": instances,
                    "seed": seed,
                    "max_rel_residual": max_rel,
                    "min_term": min_term,
                    "per_n": per_n,
                },
                "catenoid": {
                    "n": spec.n(),
                    "phi0": spec.phi0(),
                    "fd_step": fd_step,
                    "r_values": r_values,
                    "max_E_over_A4": max_e,
                    "max_equality_residual": max_eq,
                },
                "passed": passed,
            });
            Ok(Outcome {
                payload: Payload::Json(value),
                code: if passed { EXIT_OK } else { EXIT_FAILED },
            })
        }
        Command::Spectrum {
            spec,
            half_width,
            delta,
            mode,
            count,
            grid,
            tol,
            r0,
            functions,
            out,
        } => {
            json_only("spectrum", out)?;
            positive("tol", *tol)?;
            let spec = spec.build()?;
            let problem = match r0 {
                Some(r0) => SpectralProblem::one_sided(&spec, *delta, *r0, *half_width, *mode)?,
                None => SpectralProblem::two_sided(&spec, *delta, *half_width, *mode)?,
            }
            .with_grid(*grid)?;
            let spectrum = if *functions {
                eigenvalues_and_functions(&problem, *count, *tol)?
            } else {
                eigenvalues_with(&problem, *count, *tol, exec)?
            };
            let mut value = json_of(&spectrum);
            value["problem"] = json_of(&problem);
            Ok(Outcome {
                payload: Payload::Json(value),
                code: EXIT_OK,
            })
        }
        Command::Index {
            spec,
            half_width,
            delta,
            l_max,
            grid,
            tol,
            out,
        } => {
            json_only("index", out)?;
            positive("tol", *tol)?;
            let spec = spec.build()?;
            let config = IndexConfig {
                grid_n: *grid,
                tol: *tol,
                exec,
            };
            let report = morse_index_with(&spec, *delta, *half_width, *l_max, config)?;
            Ok(Outcome {
                payload: Payload::Json(json_of(&report)),
                code: EXIT_OK,
            })
        }
        Command::Decay { spec, radii, tol, out } => {
            positive("tol", *tol)?;
            let spec = spec.build()?;
            let rows = radii
                .iter()
                .map(|&r| Ok(DecayRow { r, f: decay_functional(&spec, r, *tol)? }))
                .collect::<Result<Vec<_>>>()?;
            let payload = if out.format == Some(Format::Json) {
                Payload::Json(table_json(&spec, &rows))
            } else {
                let mut buf = Vec::new();
                write_decay_csv(&rows, &mut buf).map_err(io_error)?;
                Payload::Text(buf)
            };
            Ok(Outcome { payload, code: EXIT_OK })
        }
        Command::Report {
            spec,
            half_width,
            tol,
            seed,
            instances,
            timings,
            inject_fault,
            out,
        } => {
            json_only("report", out)?;
            if let Some(t) = tol {
                positive("tol", *t)?;
            }
            let spec = spec.build()?;
            let opts = ReportOptions {
                tol: *tol,
                half_width: *half_width,
                seed: *seed,
                instances: *instances,
                timings: *timings,
                fault: inject_fault.then_some(Fault::CorruptProfile),
                exec,
            };
            let report = full_report(&spec, &opts);
            Ok(Outcome {
                code: exit_code(&report),
                payload: Payload::Json(json_of(&report)),
            })
        }
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::invalid(format!("I/O error: {e}"))
}

fn output_args(command: &Command) -> &OutputArgs {
    match command {
        Command::Profile { out, .. }
        | Command::Geometry { out, .. }
        | Command::VerifySimons { out, .. }
        | Command::Spectrum { out, .. }
        | Command::Index { out, .. }
        | Command::Decay { out, .. }
        | Command::Report { out, .. } => out,
    }
}

fn error_code(e: &Error) -> i32 {
    if e.is_non_convergence() {
        EXIT_NOT_CONVERGED
    } else {
        EXIT_USAGE
    }
}

/// Accept `verify simons` as a spelling of `verify-simons`.
fn normalize_args(argv: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut i = 0;
    while i < argv.len() {
        if argv[i] == "verify" && argv.get(i + 1).map(String::as_str) == Some("simons") {
            out.push("verify-simons".to_string());
            i += 2;
        } else {
            out.push(argv[i].clone());
            i += 1;
        }
    }
    out
}

/// Parse `argv` (including the program name), run the command and return
/// the exit status, writing results to `stdout` and diagnostics to `stderr`.
pub fn run_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = normalize_args(argv.into_iter().map(Into::into).collect());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if let Some(t) = cli.threads {
        set_thread_cap(t);
    }
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return error_code(&e);
        }
    };
    let bytes = match outcome.payload {
        Payload::Json(v) => {
            let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
            s.push('\n');
            s.into_bytes()
        }
        Payload::Text(b) => b,
    };
    let written = match &output_args(&cli.command).output {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            w.write_all(&bytes)?;
            w.flush()
        }),
        None => stdout.write_all(&bytes).and_then(|_| stdout.flush()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    outcome.code
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
