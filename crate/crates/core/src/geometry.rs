//! Curvature, Laplacian and integral quantities on the catenoid.
//!
//! In arclength the induced metric is the warped product
//! `g = dr² + φ(r)² g_{S^{n-1}}`, so radial functions have Laplacian
//! `f'' + (n-1)(φ_r/φ) f'`. Balls are taken as `B(R) = {|r| < R}`, whose
//! exhaustion function `|r|` has unit gradient.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::{fmt17, CatenoidSpec, Profile, ProfilePoint};
use crate::quadrature::integrate;
use crate::simons::ShapeTensor3;

const QUAD_BUDGET: usize = 4000;

/// Principal curvatures at a profile point: one radial value and one
/// spherical value of multiplicity `n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureFrame {
    pub lambda_rad: f64,
    pub lambda_sph: f64,
    #[serde(rename = "normA2")]
    pub norm_a2: f64,
    /// `d|A|/dr`.
    #[serde(rename = "dnormA_dr")]
    pub dnorm_a_dr: f64,
}

impl CurvatureFrame {
    /// Mean curvature times `n`, zero on a minimal hypersurface.
    pub fn trace(&self, n: usize) -> f64 {
        self.lambda_rad + (n - 1) as f64 * self.lambda_sph
    }
}

pub fn principal_curvatures(spec: &CatenoidSpec, p: &ProfilePoint) -> CurvatureFrame {
    let m = (spec.n() - 1) as f64;
    let q = 1.0 + p.dphi_ds * p.dphi_ds;
    let root = q.sqrt();
    let lambda_rad = -p.d2phi_ds2 / (q * root);
    let lambda_sph = 1.0 / (p.phi * root);
    let norm_a2 = lambda_rad * lambda_rad + m * lambda_sph * lambda_sph;
    let dnorm_a_dr = -(spec.n() as f64) * norm_a2.sqrt() * p.dphi_dr() / p.phi;
    CurvatureFrame {
        lambda_rad,
        lambda_sph,
        norm_a2,
        dnorm_a_dr,
    }
}

/// `|A|² = n(n-1) φ0^{2(n-1)} φ^{-2n}`.
pub fn norm_a2_closed(spec: &CatenoidSpec, phi: f64) -> Result<f64> {
    if !(phi >= spec.phi0() * (1.0 - 4.0 * f64::EPSILON)) {
        return Err(Error::invalid(format!(
            "profile radius {phi} below the waist radius {}",
            spec.phi0()
        )));
    }
    let n = spec.n() as f64;
    let m = spec.n() as i32 - 1;
    let x = spec.phi0() / phi;
    Ok(n * (n - 1.0) * x.powi(2 * m) / (phi * phi))
}

/// `|A|` as a function of the profile radius.
pub(crate) fn norm_a_of_phi(spec: &CatenoidSpec, phi: f64) -> f64 {
    let n = spec.n() as f64;
    let m = spec.n() as i32 - 1;
    (n * (n - 1.0)).sqrt() * (spec.phi0() / phi).powi(m) / phi
}

/// Accuracy order of the centered difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FdOrder {
    Second,
    #[default]
    Fourth,
}

impl FdOrder {
    pub(crate) fn half_width(self) -> usize {
        match self {
            FdOrder::Second => 1,
            FdOrder::Fourth => 2,
        }
    }

    /// First and second derivative from samples `f[c - w ..= c + w]`.
    pub(crate) fn derivatives(self, f: &[f64], c: usize, h: f64) -> (f64, f64) {
        match self {
            FdOrder::Second => (
                (f[c + 1] - f[c - 1]) / (2.0 * h),
                (f[c + 1] - 2.0 * f[c] + f[c - 1]) / (h * h),
            ),
            FdOrder::Fourth => (
                (-f[c + 2] + 8.0 * f[c + 1] - 8.0 * f[c - 1] + f[c - 2]) / (12.0 * h),
                (-f[c + 2] + 16.0 * f[c + 1] - 30.0 * f[c] + 16.0 * f[c - 1] - f[c - 2])
                    / (12.0 * h * h),
            ),
        }
    }
}

/// Radial Laplacian `f'' + (n-1)(φ_r/φ) f'` at the grid node `r`, with `f`
/// sampled on [`Profile::full_grid`].
pub fn radial_laplacian(profile: &Profile, f: &[f64], r: f64) -> Result<f64> {
    radial_laplacian_with_order(profile, f, r, FdOrder::Fourth)
}

pub fn radial_laplacian_with_order(
    profile: &Profile,
    f: &[f64],
    r: f64,
    order: FdOrder,
) -> Result<f64> {
    let k = profile.len() - 1;
    if f.len() != 2 * k + 1 {
        return Err(Error::invalid(format!(
            "expected {} samples on the full grid, got {}",
            2 * k + 1,
            f.len()
        )));
    }
    let h = profile.step();
    let offset = (r / h).round();
    if (r - offset * h).abs() > 1e-9 * h {
        return Err(Error::invalid(format!("r = {r} is not a grid node")));
    }
    let idx = offset as i64 + k as i64;
    let w = order.half_width() as i64;
    if idx - w < 0 || idx + w > 2 * k as i64 {
        return Err(Error::Boundary { r });
    }
    let c = idx as usize;
    let p = profile.full_point(c);
    let (d1, d2) = order.derivatives(f, c, h);
    let m = (profile.spec().n() - 1) as f64;
    Ok(d2 + m * p.dphi_dr() / p.phi * d1)
}

/// Diagonalised second fundamental form and its covariant derivative.
///
/// Index 0 is the radial direction. The only nonzero derivative components
/// (up to symmetry) are `h_000 = dλ_rad/dr` and
/// `h_0ii = (φ_r/φ)(λ_rad - λ_sph)` for `i >= 1`.
pub fn shape_tensor(spec: &CatenoidSpec, p: &ProfilePoint) -> ShapeTensor3 {
    let n = spec.n();
    let frame = principal_curvatures(spec, p);
    let ratio = p.dphi_dr() / p.phi;
    let mut h_diag = vec![frame.lambda_sph; n];
    h_diag[0] = frame.lambda_rad;
    let mut t = ShapeTensor3::zeros(n);
    t.h_diag = h_diag;
    let mixed = ratio * (frame.lambda_rad - frame.lambda_sph);
    let radial = n as f64 * (n - 1) as f64 * frame.lambda_sph * ratio;
    t.set_sym(0, 0, 0, radial);
    for i in 1..n {
        t.set_sym(0, i, i, mixed);
    }
    t
}

/// `ω_{n-1}`, the area of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    // Γ(n/2) by recursion from Γ(1/2) = sqrt(π) or Γ(1) = 1
    let mut gamma = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if n.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x + 0.5 < n as f64 / 2.0 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(n as f64 / 2.0) / gamma
}

/// `∫_{R1 < |r| < R2} |A|^p dV`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallIntegralResult {
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    pub exponent: f64,
    pub value: f64,
    pub omega_factor: f64,
}

/// `2 ω_{n-1} ∫_{R1}^{R2} |A|^p φ^{n-1} dr` to relative tolerance `tol`.
/// `r2` may be infinite.
pub fn ball_integral(
    spec: &CatenoidSpec,
    p_exponent: f64,
    r1: f64,
    r2: f64,
    tol: f64,
) -> Result<BallIntegralResult> {
    if !(r1 >= 0.0) || !(r2 >= r1) {
        return Err(Error::invalid(format!("need 0 <= R1 <= R2, got {r1}, {r2}")));
    }
    let omega = sphere_area(spec.n());
    let m = spec.n() as i32 - 1;
    let t1 = spec.param_at(r1)?;
    let t2 = if r2.is_infinite() {
        f64::INFINITY
    } else {
        spec.param_at(r2)?
    };
    let integrand = |t: f64| {
        let phi = spec.phi0() * (1.0 + t * t);
        norm_a_of_phi(spec, phi).powf(p_exponent) * phi.powi(m) * spec.dr_dt(t)
    };
    let value = if r1 == r2 {
        0.0
    } else {
        integrate(integrand, t1, t2, tol, QUAD_BUDGET)?.value
    };
    if !value.is_finite() {
        return Err(Error::NotConverged {
            what: "shell integral (divergent)".into(),
            estimate: value,
            error: f64::INFINITY,
        });
    }
    Ok(BallIntegralResult {
        r1,
        r2,
        exponent: p_exponent,
        value: 2.0 * omega * value,
        omega_factor: omega,
    })
}

/// `F(R) = R^{-2} ∫_{B(2R) \ B(R)} |A|^{2(n-2)/n}`.
pub fn decay_functional(spec: &CatenoidSpec, r: f64, tol: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::invalid("R must be positive"));
    }
    let n = spec.n() as f64;
    let shell = ball_integral(spec, 2.0 * (n - 2.0) / n, r, 2.0 * r, tol)?;
    Ok(shell.value / (r * r))
}

/// One row of the curvature table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureRow {
    pub r: f64,
    pub lambda_rad: f64,
    pub lambda_sph: f64,
    #[serde(rename = "normA2")]
    pub norm_a2: f64,
}

pub fn curvature_table(profile: &Profile) -> Vec<CurvatureRow> {
    profile
        .points()
        .iter()
        .map(|p| {
            let f = principal_curvatures(profile.spec(), p);
            CurvatureRow {
                r: p.r,
                lambda_rad: f.lambda_rad,
                lambda_sph: f.lambda_sph,
                norm_a2: f.norm_a2,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRow {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "F")]
    pub f: f64,
}

pub fn write_curvature_csv<W: Write>(rows: &[CurvatureRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "r,lambda_rad,lambda_sph,normA2")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            fmt17(row.r),
            fmt17(row.lambda_rad),
            fmt17(row.lambda_sph),
            fmt17(row.norm_a2)
        )?;
    }
    Ok(())
}

pub fn write_decay_csv<W: Write>(rows: &[DecayRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "R,F")?;
    for row in rows {
        writeln!(out, "{},{}", fmt17(row.r), fmt17(row.f))?;
    }
    Ok(())
}

/// JSON report object `{spec: {n, phi0}, rows: [...]}`.
pub fn table_json<T: Serialize>(spec: &CatenoidSpec, rows: &[T]) -> serde_json::Value {
    serde_json::json!({
        "spec": { "n": spec.n(), "phi0": spec.phi0() },
        "rows": rows,
    })
}
