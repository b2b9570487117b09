//! Catenoid profile curve.
//!
//! The generating curve `φ(s)` of the catenoid solves
//! `φ'' / (1+φ'²)^{3/2} = (n-1) / (φ (1+φ'²)^{1/2})` with `φ(0) = φ0`,
//! `φ'(0) = 0`, and has the first integral `φ'² = a φ^{2(n-1)} - 1` with
//! `a = φ0^{-2(n-1)}`.
//!
//! Internally everything is driven by the waist parameter `t` defined by
//! `φ = φ0 (1 + t²)`. In this variable
//!
//! ```text
//! ds/dt = 2 φ0 / sqrt(P(t²)),    dr/dt = 2 φ0 (1+t²)^{n-1} / sqrt(P(t²)),
//! P(u)  = ((1+u)^{2(n-1)} - 1) / u,
//! ```
//!
//! both smooth and positive on the whole line, so the inverse-square-root
//! behaviour at the waist never appears in an integrand. `t`, the axis
//! coordinate `s` and the arclength `r` are all odd functions of each other.

use std::io::Write;

use serde::Serialize;

use crate::dd::{gl10_dd, Dd};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre_panel, integrate};

/// Default relative tolerance for profile construction and interpolation.
pub const DEFAULT_PROFILE_TOL: f64 = 1e-9;
/// Default arclength spacing of a tabulated profile.
pub const DEFAULT_STEP: f64 = 1.0 / 128.0;
const MAX_GRID_POINTS: usize = 50_000_000;
const QUAD_BUDGET: usize = 4000;
// exponent bound keeping (1 + t²)^{2(n-1)} finite
const SAFE_LOG: f64 = 700.0;

/// The pair `(n, φ0)` defining a catenoid in `R^{n+1}`, with the derived
/// constant `a` and the maximal axis height `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatenoidSpec {
    n: usize,
    phi0: f64,
    a: f64,
    #[serde(rename = "S")]
    s_max: f64,
}

/// Build a spec, computing `S` to near machine precision.
pub fn make_spec(n: usize, phi0: f64) -> Result<CatenoidSpec> {
    CatenoidSpec::with_tolerance(n, phi0, 1e-13)
}

impl CatenoidSpec {
    pub fn new(n: usize, phi0: f64) -> Result<Self> {
        make_spec(n, phi0)
    }

    /// Like [`make_spec`] but with an explicit tolerance for `S`.
    pub fn with_tolerance(n: usize, phi0: f64, tol: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension(n));
        }
        if !(phi0 > 0.0) || !phi0.is_finite() {
            return Err(Error::invalid(format!("waist radius must be positive, got {phi0}")));
        }
        let m = (n - 1) as i32;
        let a = phi0.powi(-2 * m);
        let s_max = axis_height(n, phi0, tol)?;
        Ok(CatenoidSpec { n, phi0, a, s_max })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Maximal axis height `S`; the catenoid lives in `|x_{n+1}| < S`.
    pub fn max_height(&self) -> f64 {
        self.s_max
    }

    #[inline]
    pub(crate) fn m(&self) -> i32 {
        (self.n - 1) as i32
    }

    /// Largest arclength for which every profile quantity stays finite.
    pub fn max_safe_arclength(&self) -> f64 {
        let x_safe = (SAFE_LOG / (2.0 * self.m() as f64)).exp();
        // dr/dφ >= 1, so r(φ) >= φ - φ0
        self.phi0 * (x_safe - 1.0)
    }

    // ---- closed forms in the waist parameter ----

    #[inline]
    pub(crate) fn growth(&self, u: f64) -> f64 {
        growth(self.m(), u)
    }

    /// `(1 + t²)^{n-1} = sqrt(1 + φ'²)`.
    #[inline]
    pub(crate) fn stretch(&self, t: f64) -> f64 {
        (1.0 + t * t).powi(self.m())
    }

    #[inline]
    pub(crate) fn ds_dt(&self, t: f64) -> f64 {
        2.0 * self.phi0 / self.growth(t * t).sqrt()
    }

    #[inline]
    pub(crate) fn dr_dt(&self, t: f64) -> f64 {
        self.stretch(t) * self.ds_dt(t)
    }

    /// Point on the profile at waist parameter `t` with known `r` and `s`.
    pub(crate) fn point_from_param(&self, t: f64, r: f64, s: f64) -> ProfilePoint {
        let u = t * t;
        let phi = self.phi0 * (1.0 + u);
        let dphi_ds = t * self.growth(u).sqrt();
        let stretch = self.stretch(t);
        let d2phi_ds2 = self.m() as f64 * stretch * stretch / phi;
        ProfilePoint {
            r,
            s,
            phi,
            dphi_ds,
            d2phi_ds2,
        }
    }

    /// `(Δr, Δs)` accumulated between waist parameters `t0` and `t1`.
    pub(crate) fn increments(&self, t0: f64, t1: f64) -> (f64, f64) {
        if t0 == t1 {
            return (0.0, 0.0);
        }
        if t0 > t1 {
            let (dr, ds) = self.increments(t1, t0);
            return (-dr, -ds);
        }
        if t1 <= 0.0 {
            return self.increments(-t1, -t0);
        }
        if t0 < 0.0 {
            let (r1, s1) = self.segment(0.0, -t0);
            let (r2, s2) = self.segment(0.0, t1);
            return (r1 + r2, s1 + s2);
        }
        self.segment(t0, t1)
    }

    /// `Δr` alone between waist parameters `t0` and `t1`; `r(t)` is odd.
    pub(crate) fn r_increment(&self, t0: f64, t1: f64) -> f64 {
        if t0 == t1 {
            return 0.0;
        }
        if t0 > t1 {
            return -self.r_increment(t1, t0);
        }
        if t1 <= 0.0 {
            return self.r_increment(-t1, -t0);
        }
        let fr = |t: f64| self.dr_dt(t);
        if t0 < 0.0 {
            return panels(&fr, 0.0, -t0) + panels(&fr, 0.0, t1);
        }
        panels(&fr, t0, t1)
    }

    // 0 <= lo <= hi
    fn segment(&self, lo: f64, hi: f64) -> (f64, f64) {
        let fr = |t: f64| self.dr_dt(t);
        let fs = |t: f64| self.ds_dt(t);
        (panels(&fr, lo, hi), panels(&fs, lo, hi))
    }

    /// Waist parameter at signed arclength `r`.
    pub(crate) fn param_at(&self, r: f64) -> Result<f64> {
        self.check_arclength(r)?;
        let target = r.abs();
        if target == 0.0 {
            return Ok(0.0);
        }
        let m2 = 2.0 * self.m() as f64;
        let mut t = (target * m2.sqrt() / (2.0 * self.phi0)).min((target / self.phi0).sqrt());
        for _ in 0..200 {
            let rt = self.r_increment(0.0, t);
            let step = (rt - target) / self.dr_dt(t);
            let next = (t - step).max(0.5 * t);
            let done = (next - t).abs() <= 4.0 * f64::EPSILON * next.max(1e-300);
            t = next;
            if done {
                return Ok(t.copysign(r));
            }
        }
        Err(Error::NotConverged {
            what: "arclength inversion".into(),
            estimate: t,
            error: f64::NAN,
        })
    }

    /// Solve `r(t) - r(t0) = dr` for `t`, starting from `t0`.
    pub(crate) fn advance(&self, t0: f64, dr: f64) -> f64 {
        let mut t = t0 + dr / self.dr_dt(t0);
        for _ in 0..50 {
            let got = self.r_increment(t0, t);
            let step = (got - dr) / self.dr_dt(t);
            t -= step;
            if step.abs() <= 2.0 * f64::EPSILON * t.abs().max(1.0) {
                break;
            }
        }
        t
    }

    fn check_arclength(&self, r: f64) -> Result<()> {
        let max_safe = self.max_safe_arclength();
        if !r.is_finite() || r.abs() > max_safe {
            return Err(Error::Overflow {
                requested: r,
                max_safe,
            });
        }
        Ok(())
    }

    /// Profile point at signed arclength `r`, evaluated directly (no table).
    pub fn point_at(&self, r: f64) -> Result<ProfilePoint> {
        let t = self.param_at(r)?;
        let (_, s) = self.increments(0.0, t);
        Ok(self.point_from_param(t, r, s))
    }

    /// Points at `r + j h` for `j` in `offsets`, with the offsets measured
    /// exactly from the centre rather than from the waist.
    pub(crate) fn stencil_points(&self, r: f64, h: f64, offsets: &[i32]) -> Result<Vec<ProfilePoint>> {
        let w = offsets.iter().map(|j| j.unsigned_abs()).max().unwrap_or(0) as f64;
        self.check_arclength(r.abs() + w * h)?;
        let tc = self.param_at(r)?;
        let (_, sc) = self.increments(0.0, tc);
        Ok(offsets
            .iter()
            .map(|&j| {
                let dr = j as f64 * h;
                let t = if j == 0 { tc } else { self.advance(tc, dr) };
                let (_, ds) = self.increments(tc, t);
                self.point_from_param(t, r + dr, sc + ds)
            })
            .collect())
    }

    /// Waist parameters for an ascending sequence of arclengths, obtained by
    /// marching outward from the sample closest to the waist.
    pub(crate) fn params_sorted(&self, rs: &[f64]) -> Result<Vec<f64>> {
        if rs.is_empty() {
            return Ok(Vec::new());
        }
        let start = rs
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.check_arclength(rs[0])?;
        self.check_arclength(rs[rs.len() - 1])?;
        let mut ts = vec![0.0; rs.len()];
        ts[start] = self.param_at(rs[start])?;
        for j in start + 1..rs.len() {
            ts[j] = self.advance(ts[j - 1], rs[j] - rs[j - 1]);
        }
        for j in (0..start).rev() {
            ts[j] = self.advance(ts[j + 1], rs[j] - rs[j + 1]);
        }
        Ok(ts)
    }

    // ---- double-double stencils ----

    /// `dr/dt` in double-double, with `P` expanded as a polynomial so the
    /// waist needs no special case.
    fn dr_dt_dd(&self, t: Dd) -> Dd {
        let m = self.m() as u32;
        let u = t * t;
        let mut p = Dd::ZERO;
        // P(u) = sum_{k=1}^{2m} C(2m, k) u^{k-1}, Horner from the top
        for k in (1..=2 * m).rev() {
            p = p * u + binomial(2 * m, k);
        }
        (Dd::ONE + u).powi(m) * (2.0 * self.phi0) / p.sqrt()
    }

    /// Waist parameters of the points at arclength `r_c + j h`, `j` in
    /// `offsets`, in double-double. `r_c` is the arclength of `t_center`;
    /// offsets are exact relative to it.
    pub(crate) fn stencil_params_dd(&self, t_center: f64, h: f64, offsets: &[i32]) -> Vec<Dd> {
        let rule = gl10_dd();
        let tc = Dd::new(t_center);
        let integral = |t: Dd| -> Dd {
            let width = (t - tc).to_f64().abs();
            let panels = ((width / 0.05).ceil() as usize).max(1);
            let step = (t - tc) / Dd::new(panels as f64);
            let mut acc = Dd::ZERO;
            for p in 0..panels {
                let lo = tc + step * (p as f64);
                let mid = lo + step * 0.5;
                let half = step * 0.5;
                for (x, w) in rule.iter() {
                    acc = acc + *w * (self.dr_dt_dd(mid - half * *x) + self.dr_dt_dd(mid + half * *x));
                }
            }
            acc * (step * 0.5)
        };
        offsets
            .iter()
            .map(|&j| {
                if j == 0 {
                    return tc;
                }
                let target = Dd::new(h) * (j as f64);
                let mut t = tc + (target.to_f64() / self.dr_dt(t_center));
                for _ in 0..8 {
                    let g = integral(t) - target;
                    let step = g / self.dr_dt_dd(t);
                    t = t - step;
                    if step.to_f64().abs() <= 1e-31 * t.to_f64().abs().max(1.0) {
                        break;
                    }
                }
                t
            })
            .collect()
    }
}

// Composite Gauss–Legendre on 0 <= lo <= hi; panels widen geometrically with t.
fn panels<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let mut acc = 0.0;
    let mut x = lo;
    while x < hi {
        let next = (x + 0.25 * x.max(1.0)).min(hi);
        acc += gauss_legendre_panel(f, x, next);
        x = next;
    }
    acc
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

/// `((1+u)^{2m} - 1) / u`, accurate down to `u = 0`.
#[inline]
pub(crate) fn growth(m: i32, u: f64) -> f64 {
    if u == 0.0 {
        2.0 * m as f64
    } else {
        (2.0 * m as f64 * u.ln_1p()).exp_m1() / u
    }
}

fn axis_height(n: usize, phi0: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let m = (n - 1) as i32;
    // [0, 1] in t, then t = 1/v on the tail:
    //   ds/dt dt = 2 v^{2m-3} / sqrt((1+v²)^{2m} - v^{4m}) dv
    let near = integrate(|t: f64| 2.0 / growth(m, t * t).sqrt(), 0.0, 1.0, tol / 2.0, QUAD_BUDGET)?;
    let tail = integrate(
        |v: f64| {
            let v2 = v * v;
            2.0 * v.powi(2 * m - 3) / ((1.0 + v2).powi(2 * m) - v2.powi(2 * m)).sqrt()
        },
        0.0,
        1.0,
        tol / 2.0,
        QUAD_BUDGET,
    )?;
    Ok(phi0 * (near.value + tail.value))
}

/// `S = ∫_{φ0}^∞ dτ / sqrt(a τ^{2(n-1)} - 1)` to relative tolerance `tol`.
pub fn max_axis_height(spec: &CatenoidSpec, tol: f64) -> Result<f64> {
    axis_height(spec.n, spec.phi0, tol)
}

/// One point of the profile curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    /// Signed arclength from the waist.
    pub r: f64,
    /// Axis coordinate, `|s| < S`.
    pub s: f64,
    pub phi: f64,
    pub dphi_ds: f64,
    pub d2phi_ds2: f64,
}

impl ProfilePoint {
    /// `dφ/dr = φ' / sqrt(1 + φ'²)`.
    pub fn dphi_dr(&self) -> f64 {
        self.dphi_ds / (1.0 + self.dphi_ds * self.dphi_ds).sqrt()
    }

    /// `φ'² - (a φ^{2(n-1)} - 1)`.
    pub fn first_integral_residual(&self, spec: &CatenoidSpec) -> f64 {
        let x = self.phi / spec.phi0();
        self.dphi_ds * self.dphi_ds - (x.powi(2 * spec.m()) - 1.0)
    }

    /// `φ'' φ - (n-1)(1 + φ'²)`.
    pub fn ode_residual(&self, spec: &CatenoidSpec) -> f64 {
        self.d2phi_ds2 * self.phi - spec.m() as f64 * (1.0 + self.dphi_ds * self.dphi_ds)
    }

    /// Whether the first-integral and ODE identities hold to `tol`, relative
    /// to `1 + φ'²`.
    pub fn satisfies_invariants(&self, spec: &CatenoidSpec, tol: f64) -> bool {
        let scale = 1.0 + self.dphi_ds * self.dphi_ds;
        self.phi >= spec.phi0() * (1.0 - 4.0 * f64::EPSILON)
            && self.first_integral_residual(spec).abs() <= tol * scale
            && self.ode_residual(spec).abs() <= tol * scale * spec.m() as f64
            && (self.dphi_ds == 0.0 || self.dphi_ds.signum() == self.s.signum())
    }
}

/// Tabulated profile on a uniform arclength grid `r_k = k h`, `0 <= k <= K`.
#[derive(Debug, Clone)]
pub struct Profile {
    spec: CatenoidSpec,
    step: f64,
    tol: f64,
    params: Vec<f64>,
    grid: Vec<ProfilePoint>,
}

/// Tabulate the profile on `[0, r_max]` with the default spacing.
pub fn build_profile(spec: &CatenoidSpec, r_max: f64, tol: f64) -> Result<Profile> {
    build_profile_with_step(spec, r_max, DEFAULT_STEP, tol)
}

/// Tabulate the profile on `[0, r_max]` with spacing `step`. The grid end is
/// rounded up to a whole number of steps.
pub fn build_profile_with_step(
    spec: &CatenoidSpec,
    r_max: f64,
    step: f64,
    tol: f64,
) -> Result<Profile> {
    if !(r_max > 0.0) {
        return Err(Error::invalid("r_max must be positive"));
    }
    if !(step > 0.0) || !(tol > 0.0) {
        return Err(Error::invalid("step and tolerance must be positive"));
    }
    let max_safe = spec.max_safe_arclength();
    let count = (r_max / step * (1.0 - 1e-12)).ceil();
    if r_max > max_safe || !r_max.is_finite() {
        return Err(Error::Overflow {
            requested: r_max,
            max_safe,
        });
    }
    if count >= MAX_GRID_POINTS as f64 {
        return Err(Error::Overflow {
            requested: r_max,
            max_safe: max_safe.min(step * (MAX_GRID_POINTS - 1) as f64),
        });
    }
    let count = count as usize;
    let mut params = Vec::with_capacity(count + 1);
    let mut grid = Vec::with_capacity(count + 1);
    let mut t = 0.0;
    let mut s = 0.0;
    params.push(0.0);
    grid.push(spec.point_from_param(0.0, 0.0, 0.0));
    for k in 1..=count {
        let r_prev = step * (k - 1) as f64;
        let r = step * k as f64;
        let t_next = spec.advance(t, r - r_prev);
        let (_, ds) = spec.increments(t, t_next);
        s += ds;
        t = t_next;
        params.push(t);
        grid.push(spec.point_from_param(t, r, s));
    }
    let profile = Profile {
        spec: *spec,
        step,
        tol,
        params,
        grid,
    };
    if let Some(bad) = profile.grid.iter().find(|p| !p.satisfies_invariants(spec, tol)) {
        return Err(Error::NotConverged {
            what: format!("profile construction at r = {}", bad.r),
            estimate: bad.first_integral_residual(spec),
            error: tol,
        });
    }
    Ok(profile)
}

impl Profile {
    pub fn spec(&self) -> &CatenoidSpec {
        &self.spec
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn r_max(&self) -> f64 {
        self.grid.last().map_or(0.0, |p| p.r)
    }

    /// Grid points on `[0, r_max]`.
    pub fn points(&self) -> &[ProfilePoint] {
        &self.grid
    }

    /// Mutable access to the tabulated points. Only meant for fault
    /// injection when exercising verification failure paths.
    #[doc(hidden)]
    pub fn points_mut(&mut self) -> &mut [ProfilePoint] {
        &mut self.grid
    }

    /// Number of non-negative grid points, `K + 1`.
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Signed grid `r_k = k h` for `-K <= k <= K`.
    pub fn full_grid(&self) -> Vec<f64> {
        let k = self.grid.len() as i64 - 1;
        (-k..=k).map(|i| self.step * i as f64).collect()
    }

    /// Point at full-grid index `i` (`0` is `r = -r_max`).
    pub fn full_point(&self, i: usize) -> ProfilePoint {
        let k = self.grid.len() - 1;
        if i >= k {
            self.grid[i - k]
        } else {
            mirror(self.grid[k - i])
        }
    }

    /// Sample a radial function on the full signed grid.
    pub fn sample<F: Fn(&ProfilePoint) -> f64>(&self, f: F) -> Vec<f64> {
        (0..2 * self.grid.len() - 1).map(|i| f(&self.full_point(i))).collect()
    }

    /// Profile point at signed arclength `r`. Cubic Hermite interpolation of
    /// the waist parameter followed by Newton refinement of the arclength.
    pub fn eval(&self, r: f64) -> Result<ProfilePoint> {
        let max = self.r_max();
        if !(r.abs() <= max) {
            return Err(Error::OutOfRange { r, max });
        }
        let x = r.abs();
        let k = ((x / self.step) as usize).min(self.grid.len().saturating_sub(2));
        let base = self.grid[k];
        let t_k = self.params[k];
        let t_guess = if self.grid.len() < 2 {
            t_k
        } else {
            let t_k1 = self.params[k + 1];
            let h = self.step;
            let u = (x - base.r) / h;
            let (d0, d1) = (h / self.spec.dr_dt(t_k), h / self.spec.dr_dt(t_k1));
            let (u2, u3) = (u * u, u * u * u);
            (2.0 * u3 - 3.0 * u2 + 1.0) * t_k
                + (u3 - 2.0 * u2 + u) * d0
                + (-2.0 * u3 + 3.0 * u2) * t_k1
                + (u3 - u2) * d1
        };
        let mut t = t_guess;
        for _ in 0..6 {
            let (dr, _) = self.spec.increments(t_k, t);
            let step = (base.r + dr - x) / self.spec.dr_dt(t);
            t -= step;
            if step.abs() <= 2.0 * f64::EPSILON * t.abs().max(1.0) {
                break;
            }
        }
        let (_, ds) = self.spec.increments(t_k, t);
        let p = self.spec.point_from_param(t, x, base.s + ds);
        Ok(if r < 0.0 || (r == 0.0 && r.is_sign_negative()) {
            mirror(p)
        } else {
            p
        })
    }

    /// CSV with header `r,s,phi,dphi_ds,d2phi_ds2`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,s,phi,dphi_ds,d2phi_ds2")?;
        for p in &self.grid {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt17(p.r),
                fmt17(p.s),
                fmt17(p.phi),
                fmt17(p.dphi_ds),
                fmt17(p.d2phi_ds2)
            )?;
        }
        Ok(())
    }
}

/// Interpolated evaluation; see [`Profile::eval`].
pub fn eval_at_arclength(profile: &Profile, r: f64) -> Result<ProfilePoint> {
    profile.eval(r)
}

fn mirror(p: ProfilePoint) -> ProfilePoint {
    ProfilePoint {
        r: -p.r,
        s: -p.s,
        phi: p.phi,
        dphi_ds: -p.dphi_ds,
        d2phi_ds2: p.d2phi_ds2,
    }
}

/// Format with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Position `(φ ω, s)` and unit normal `(ω, -φ') / sqrt(1 + φ'²)` of the
/// embedded point over `p` in direction `omega ∈ S^{n-1}`.
pub fn embed(spec: &CatenoidSpec, p: &ProfilePoint, omega: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if omega.len() != spec.n() {
        return Err(Error::invalid(format!(
            "direction has {} components, expected {}",
            omega.len(),
            spec.n()
        )));
    }
    let norm2: f64 = omega.iter().map(|w| w * w).sum();
    if (norm2.sqrt() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("direction is not a unit vector"));
    }
    let scale = 1.0 / (1.0 + p.dphi_ds * p.dphi_ds).sqrt();
    let mut position: Vec<f64> = omega.iter().map(|w| p.phi * w).collect();
    position.push(p.s);
    let mut normal: Vec<f64> = omega.iter().map(|w| w * scale).collect();
    normal.push(-p.dphi_ds * scale);
    Ok((position, normal))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec3() -> CatenoidSpec {
        make_spec(3, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(make_spec(2, 1.0).unwrap_err(), Error::InvalidDimension(2));
        assert!(matches!(make_spec(3, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_spec(3, -1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn derived_constant_a() {
        for (n, phi0) in [(3, 1.0), (4, 0.7), (6, 2.5)] {
            let spec = make_spec(n, phi0).unwrap();
            let check = spec.a() * phi0.powi(2 * (n as i32 - 1));
            assert!((check - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn growth_is_smooth_at_zero() {
        for m in 2..7 {
            assert_eq!(growth(m, 0.0), 2.0 * m as f64);
            let small = growth(m, 1e-12);
            assert!((small - 2.0 * m as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn waist_point() {
        let p = spec3().point_at(0.0).unwrap();
        assert_eq!(p.phi, 1.0);
        assert_eq!(p.dphi_ds, 0.0);
        assert_eq!(p.s, 0.0);
        assert_eq!(p.d2phi_ds2, 2.0);
    }

    #[test]
    fn direct_points_satisfy_identities() {
        let spec = make_spec(4, 1.3).unwrap();
        for r in [-7.5, -1.0, -0.01, 0.3, 2.0, 40.0] {
            let p = spec.point_at(r).unwrap();
            assert!(p.satisfies_invariants(&spec, 1e-12), "{p:?}");
            assert!((p.r - r).abs() == 0.0);
            assert!(p.s.abs() < spec.max_height());
        }
    }

    #[test]
    fn arclength_inversion_round_trips() {
        let spec = make_spec(5, 0.8).unwrap();
        for r in [1e-6, 0.1, 1.0, 3.3, 100.0, 1e4] {
            let t = spec.param_at(r).unwrap();
            let (back, _) = spec.increments(0.0, t);
            assert!((back - r).abs() <= 1e-13 * r.max(1.0), "{r} {back}");
        }
    }

    #[test]
    fn eval_rejects_out_of_range() {
        let profile = build_profile(&spec3(), 2.0, 1e-9).unwrap();
        assert!(matches!(profile.eval(2.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(profile.eval(-2.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn huge_r_max_reports_safe_limit() {
        let spec = spec3();
        match build_profile(&spec, 1e300, 1e-9) {
            Err(Error::Overflow { max_safe, .. }) => {
                assert!(max_safe > 1e70 && max_safe < 1e300);
                assert!(spec.point_at(max_safe).is_ok());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn embedding_at_waist() {
        let spec = spec3();
        let p = spec.point_at(0.0).unwrap();
        let (x, nu) = embed(&spec, &p, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(x, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(nu, vec![1.0, 0.0, 0.0, 0.0]);
        assert!(embed(&spec, &p, &[1.0, 1.0, 0.0]).is_err());
        assert!(embed(&spec, &p, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn csv_header_and_digits() {
        let profile = build_profile_with_step(&spec3(), 0.5, 0.25, 1e-9).unwrap();
        let mut buf = Vec::new();
        profile.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("r,s,phi,dphi_ds,d2phi_ds2"));
        let row: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), 5);
        let phi: f64 = row[2].parse().unwrap();
        assert_eq!(phi, profile.points()[1].phi);
        assert_eq!(row[2].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    }
}
