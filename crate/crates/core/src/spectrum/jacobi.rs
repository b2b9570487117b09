//! Explicit solutions of the reduced stability equations.
//!
//! Translations and the dilation of the catenoid give Jacobi fields, i.e.
//! solutions of `Δu + |A|²u = 0`. On the catenoid
//! `Δ|A|^α = α|A|^{α-2}((α - 1 + 2/n)|∇|A||² - |A|⁴)`, so `|A|^{(n-2)/n}`
//! is a positive solution of `Δu + (1 - 2/n)|A|²u = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{norm_a2_closed, FdOrder};
use crate::profile::{CatenoidSpec, ProfilePoint};

use super::potential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobiKind {
    VerticalTranslation,
    HorizontalTranslation,
    Dilation,
    TwoNStability,
}

impl JacobiKind {
    pub const ALL: [JacobiKind; 4] = [
        JacobiKind::VerticalTranslation,
        JacobiKind::HorizontalTranslation,
        JacobiKind::Dilation,
        JacobiKind::TwoNStability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            JacobiKind::VerticalTranslation => "vertical_translation",
            JacobiKind::HorizontalTranslation => "horizontal_translation",
            JacobiKind::Dilation => "dilation",
            JacobiKind::TwoNStability => "two_n_stability",
        }
    }

    pub fn mode_l(self) -> usize {
        match self {
            JacobiKind::HorizontalTranslation => 1,
            _ => 0,
        }
    }

    pub fn delta(self, n: usize) -> f64 {
        match self {
            JacobiKind::TwoNStability => 2.0 / n as f64,
            _ => 0.0,
        }
    }

    fn value(self, spec: &CatenoidSpec, p: &ProfilePoint) -> f64 {
        let root = (1.0 + p.dphi_ds * p.dphi_ds).sqrt();
        match self {
            JacobiKind::VerticalTranslation => -p.dphi_ds / root,
            JacobiKind::HorizontalTranslation => 1.0 / root,
            JacobiKind::Dilation => (p.phi - p.s * p.dphi_ds) / root,
            JacobiKind::TwoNStability => {
                let n = spec.n() as f64;
                curvature_power(spec, p, (n - 2.0) / n)
            }
        }
    }
}

fn curvature_power(spec: &CatenoidSpec, p: &ProfilePoint, exponent: f64) -> f64 {
    norm_a2_closed(spec, p.phi).unwrap_or(0.0).powf(0.5 * exponent)
}

impl std::str::FromStr for JacobiKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        JacobiKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown Jacobi field kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiValue {
    pub value: f64,
    pub mode_l: usize,
    pub delta: f64,
}

pub fn jacobi_field(spec: &CatenoidSpec, kind: JacobiKind, r: f64) -> Result<JacobiValue> {
    let p = spec.point_at(r)?;
    Ok(JacobiValue {
        value: kind.value(spec, &p),
        mode_l: kind.mode_l(),
        delta: kind.delta(spec.n()),
    })
}

/// `|u'' + (n-1)(φ_r/φ)u' + q u|` at `r` by fourth-order differences with
/// step `h`, together with the local scale `|A|²|u|`.
pub fn jacobi_residual(spec: &CatenoidSpec, kind: JacobiKind, r: f64, h: f64) -> Result<(f64, f64)> {
    let n = spec.n();
    reduced_residual(spec, kind.delta(n), kind.mode_l(), r, h, |p| kind.value(spec, p))
}

/// Residual of `u = |A|^exponent` in the mode-0 equation with parameter
/// `delta`, in the same form as [`jacobi_residual`].
pub fn curvature_power_residual(
    spec: &CatenoidSpec,
    exponent: f64,
    delta: f64,
    r: f64,
    h: f64,
) -> Result<(f64, f64)> {
    reduced_residual(spec, delta, 0, r, h, |p| curvature_power(spec, p, exponent))
}

fn reduced_residual<F: Fn(&ProfilePoint) -> f64>(
    spec: &CatenoidSpec,
    delta: f64,
    l: usize,
    r: f64,
    h: f64,
    field: F,
) -> Result<(f64, f64)> {
    if !(h > 0.0) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let pts = spec.stencil_points(r, h, &[-2, -1, 0, 1, 2])?;
    let u: Vec<f64> = pts.iter().map(&field).collect();
    let (d1, d2) = FdOrder::Fourth.derivatives(&u, 2, h);
    let p = pts[2];
    let n = spec.n();
    let a2 = norm_a2_closed(spec, p.phi)?;
    let q = potential(n, delta, l, a2, 1.0 / (p.phi * p.phi));
    let residual = (d2 + (n - 1) as f64 * p.dphi_dr() / p.phi * d1 + q * u[2]).abs();
    Ok((residual, a2 * u[2].abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiScan {
    pub kind: JacobiKind,
    pub samples: usize,
    pub max_residual: f64,
    /// `max |A|²|u|` over the samples.
    pub scale: f64,
    /// `max_residual / scale`.
    pub relative: f64,
}

/// Residuals at `samples` equally spaced points of `[r_lo, r_hi]`.
pub fn jacobi_residual_scan(
    spec: &CatenoidSpec,
    kind: JacobiKind,
    r_lo: f64,
    r_hi: f64,
    samples: usize,
    h: f64,
    exec: Execution,
) -> Result<JacobiScan> {
    if samples < 2 || !(r_hi > r_lo) {
        return Err(Error::invalid("need at least two samples on a nonempty interval"));
    }
    let step = (r_hi - r_lo) / (samples - 1) as f64;
    let rows = exec.map_range(samples, |i| jacobi_residual(spec, kind, r_lo + step * i as f64, h));
    let mut max_residual = 0.0f64;
    let mut scale = 0.0f64;
    for row in rows {
        let (res, s) = row?;
        max_residual = max_residual.max(res);
        scale = scale.max(s);
    }
    Ok(JacobiScan {
        kind,
        samples,
        max_residual,
        scale,
        relative: max_residual / scale,
    })
}
