//! The full verification battery, run suite by suite.

use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::exec::Execution;
use crate::geometry::{decay_functional, norm_a2_closed, principal_curvatures};
use crate::profile::{build_profile, max_axis_height, CatenoidSpec, DEFAULT_PROFILE_TOL};
use crate::simons::{algebraic_battery, catenoid_breakdown, catenoid_equality_check};
use crate::spectrum::{jacobi_residual_scan, morse_index_with, IndexConfig, JacobiKind};

pub const EQUALITY_FD_STEP: f64 = 1e-3;
pub const JACOBI_FD_STEP: f64 = 1e-3;
const CHECK_HALF_WIDTH: f64 = 5.0;
const PROFILE_EXTENT: f64 = 10.0;
const L_MAX: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteStatus {
    Passed,
    Failed,
    NotConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub status: SuiteStatus,
    pub max_residual: f64,
    pub tolerance: f64,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecEcho {
    pub n: usize,
    pub phi0: f64,
    #[serde(rename = "S")]
    pub s_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub spec: SpecEcho,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn any_not_converged(&self) -> bool {
        self.suites.iter().any(|s| s.status == SuiteStatus::NotConverged)
    }
}

/// Deliberate damage applied before the checks run, to exercise the
/// failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    CorruptProfile,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    /// Overrides the quadrature and eigenvalue tolerances.
    pub tol: Option<f64>,
    pub half_width: f64,
    pub seed: u64,
    pub instances: usize,
    pub timings: bool,
    pub fault: Option<Fault>,
    pub exec: Execution,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            tol: None,
            half_width: 8.0,
            seed: 1,
            instances: 1000,
            timings: false,
            fault: None,
            exec: Execution::default(),
        }
    }
}

struct Outcome {
    max_residual: f64,
    tolerance: f64,
    ok: bool,
    detail: String,
}

fn run_suite<F>(name: &'static str, tolerance: f64, timings: bool, f: F) -> SuiteResult
where
    F: FnOnce() -> Result<Outcome>,
{
    let start = Instant::now();
    let outcome = f();
    let wall_time = timings.then(|| start.elapsed().as_secs_f64());
    match outcome {
        Ok(o) => SuiteResult {
            name,
            passed: o.ok,
            status: if o.ok { SuiteStatus::Passed } else { SuiteStatus::Failed },
            max_residual: o.max_residual,
            tolerance: o.tolerance,
            detail: o.detail,
            wall_time,
        },
        Err(e) => SuiteResult {
            name,
            passed: false,
            status: if e.is_non_convergence() {
                SuiteStatus::NotConverged
            } else {
                SuiteStatus::Failed
            },
            max_residual: f64::NAN,
            tolerance,
            detail: e.to_string(),
            wall_time,
        },
    }
}

fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|i| lo + step * i as f64).collect()
}

/// Run every suite in order. A suite that errors is marked failed (or not
/// converged) and the remaining suites still run.
pub fn full_report(spec: &CatenoidSpec, opts: &ReportOptions) -> VerificationReport {
    let exec = opts.exec;
    let t = opts.timings;
    let mut suites = Vec::new();

    suites.push(run_suite("profile_invariants", DEFAULT_PROFILE_TOL, t, || {
        let s = max_axis_height(spec, opts.tol.unwrap_or(1e-12))?;
        let mut profile = build_profile(spec, PROFILE_EXTENT, DEFAULT_PROFILE_TOL)?;
        if opts.fault == Some(Fault::CorruptProfile) {
            let k = profile.len() / 2;
            profile.points_mut()[k].dphi_ds *= 1.0 + 1e-4;
        }
        let mut worst = 0.0f64;
        for p in profile.points() {
            let scale = 1.0 + p.dphi_ds * p.dphi_ds;
            worst = worst
                .max(p.first_integral_residual(spec).abs() / scale)
                .max(p.ode_residual(spec).abs() / (scale * (spec.n() - 1) as f64));
        }
        let consistent = (s - spec.max_height()).abs() <= 1e-9 * s;
        Ok(Outcome {
            max_residual: worst,
            tolerance: DEFAULT_PROFILE_TOL,
            ok: worst <= DEFAULT_PROFILE_TOL && consistent,
            detail: format!("S = {s:.12}, {} grid points", profile.len()),
        })
    }));

    suites.push(run_suite("curvature_identities", 1e-10, t, || {
        let rs = grid(-PROFILE_EXTENT, PROFILE_EXTENT, 1000);
        let rows = exec.map_slice(&rs, |&r| -> Result<(f64, f64)> {
            let p = spec.point_at(r)?;
            let f = principal_curvatures(spec, &p);
            let closed = norm_a2_closed(spec, p.phi)?;
            Ok((
                f.trace(spec.n()).abs() / f.norm_a2.sqrt(),
                (f.norm_a2 - closed).abs() / closed,
            ))
        });
        let mut worst = 0.0f64;
        for row in rows {
            let (a, b) = row?;
            worst = worst.max(a).max(b);
        }
        Ok(Outcome {
            max_residual: worst,
            tolerance: 1e-10,
            ok: worst <= 1e-10,
            detail: "minimality and closed-form |A|^2 at 1000 points".into(),
        })
    }));

    suites.push(run_suite("simons_equality", 1e-6, t, || {
        let rs = grid(-CHECK_HALF_WIDTH, CHECK_HALF_WIDTH, 101);
        let rows = exec.map_slice(&rs, |&r| catenoid_equality_check(spec, r, EQUALITY_FD_STEP));
        let mut worst = 0.0f64;
        for row in rows {
            worst = worst.max(row?.relative);
        }
        Ok(Outcome {
            max_residual: worst,
            tolerance: 1e-6,
            ok: worst <= 1e-6,
            detail: format!("relative residual, fd step {EQUALITY_FD_STEP}"),
        })
    }));

    suites.push(run_suite("catenoid_e_vanishing", 1e-10, t, || {
        let rs = grid(-CHECK_HALF_WIDTH, CHECK_HALF_WIDTH, 101);
        let rows = exec.map_slice(&rs, |&r| -> Result<f64> {
            let b = catenoid_breakdown(spec, r)?;
            let a2 = norm_a2_closed(spec, spec.point_at(r)?.phi)?;
            Ok(b.e() / (a2 * a2))
        });
        let mut worst = 0.0f64;
        for row in rows {
            worst = worst.max(row?);
        }
        Ok(Outcome {
            max_residual: worst,
            tolerance: 1e-10,
            ok: worst <= 1e-10,
            detail: "E / |A|^4".into(),
        })
    }));

    suites.push(run_suite("algebraic_simons", 1e-12, t, || {
        let mut worst = 0.0f64;
        let mut min_term = f64::INFINITY;
        for n in 3..=7 {
            let b = algebraic_battery(n, opts.instances, opts.seed, exec)?;
            worst = worst.max(b.max_relative_residual);
            min_term = min_term.min(b.min_term);
        }
        Ok(Outcome {
            max_residual: worst,
            tolerance: 1e-12,
            ok: worst <= 1e-12 && min_term >= 0.0,
            detail: format!("{} instances per n in 3..=7, seed {}", opts.instances, opts.seed),
        })
    }));

    suites.push(run_suite("jacobi_fields", 1e-7, t, || {
        let mut worst = 0.0f64;
        for kind in JacobiKind::ALL {
            let scan = jacobi_residual_scan(
                spec,
                kind,
                -CHECK_HALF_WIDTH,
                CHECK_HALF_WIDTH,
                201,
                JACOBI_FD_STEP,
                exec,
            )?;
            worst = worst.max(scan.relative);
        }
        Ok(Outcome {
            max_residual: worst,
            tolerance: 1e-7,
            ok: worst <= 1e-7,
            detail: "residual / max |A|^2|u| for the four explicit solutions".into(),
        })
    }));

    suites.push(run_suite("index", 0.0, t, || {
        let config = IndexConfig {
            tol: opts.tol.unwrap_or(crate::spectrum::DEFAULT_TOL),
            exec,
            ..IndexConfig::default()
        };
        let unstable = morse_index_with(spec, 0.0, opts.half_width, L_MAX.max(needed(spec)), config)?;
        let delta = 2.0 / spec.n() as f64;
        let stable = morse_index_with(spec, delta, opts.half_width, L_MAX.max(needed(spec)), config)?;
        let miss = (unstable.total_index as f64 - 1.0).abs() + stable.total_index as f64;
        Ok(Outcome {
            max_residual: miss,
            tolerance: 0.0,
            ok: miss == 0.0,
            detail: format!(
                "index {} at delta = 0, {} at delta = 2/n, R = {}",
                unstable.total_index, stable.total_index, opts.half_width
            ),
        })
    }));

    suites.push(run_suite("decay_trend", 0.0, t, || {
        let tol = opts.tol.unwrap_or(1e-10);
        let f: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&r| decay_functional(spec, r, tol))
            .collect::<Result<_>>()?;
        let ok = f[2] < f[1] && f[1] < f[0];
        Ok(Outcome {
            max_residual: f[2] / f[0],
            tolerance: 0.0,
            ok,
            detail: format!("F(10) = {:e}, F(100) = {:e}, F(1000) = {:e}", f[0], f[1], f[2]),
        })
    }));

    let passed = suites.iter().all(|s| s.passed);
    VerificationReport {
        spec: SpecEcho {
            n: spec.n(),
            phi0: spec.phi0(),
            s_max: spec.max_height(),
        },
        suites,
        passed,
    }
}

fn needed(spec: &CatenoidSpec) -> usize {
    crate::spectrum::first_negative_mode(spec.n(), 0.0)
}

/// Exit status for a finished report: 0 all passed, 3 if any suite ran out
/// of budget, 1 otherwise.
pub fn exit_code(report: &VerificationReport) -> i32 {
    if report.passed {
        0
    } else if report.any_not_converged() {
        3
    } else {
        1
    }
}
