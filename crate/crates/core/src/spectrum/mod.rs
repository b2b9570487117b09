//! Dirichlet spectra of the stability operator `L = Δ + (1-δ)|A|²`.
//!
//! A function `u(r) Y_l(θ)` with `Y_l` a degree-`l` spherical harmonic
//! reduces `L f = -λ f` to
//!
//! ```text
//! -(w u')' - w q u = λ w u,   w = φ^{n-1},   q = (1-δ)|A|² - l(l+n-2)/φ²,
//! ```
//!
//! so `λ > 0` for every mode means stability. Each mode is discretized by
//! conservative second-order differences on a uniform arclength grid and
//! symmetrized to a tridiagonal matrix. Eigenvalues come from Sturm-count
//! bisection on a ladder of grids (each twice as fine as the last) combined
//! by Richardson extrapolation.

mod jacobi;
mod tridiag;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::norm_a2_closed;
use crate::profile::CatenoidSpec;
use tridiag::SymTridiag;

pub use jacobi::{
    curvature_power_residual, jacobi_field, jacobi_residual, jacobi_residual_scan, JacobiKind, JacobiScan,
    JacobiValue,
};

pub const DEFAULT_GRID_N: usize = 2048;
pub const DEFAULT_TOL: f64 = 1e-8;
const MIN_GRID_N: usize = 16;
const MAX_INTERVALS: usize = 1 << 21;
const EIGENVECTOR_TOL: f64 = 1e-10;

/// Which interval the Dirichlet problem lives on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// `(-R, R)`.
    TwoSided,
    /// `(r0, R)` with `r0 >= 0`: one end of the catenoid cut off.
    OneSided { r0: f64 },
}

/// The coefficients of the Sturm–Liouville problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Operator {
    Catenoid { spec: CatenoidSpec },
    /// `w ≡ 1`, `q ≡ 0`: the Dirichlet Laplacian, with known spectrum.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralProblem {
    pub operator: Operator,
    pub delta: f64,
    #[serde(rename = "R")]
    pub half_width: f64,
    pub mode_l: usize,
    /// Interior points of the base grid.
    pub grid_n: usize,
    pub domain: Domain,
}

impl SpectralProblem {
    pub fn two_sided(spec: &CatenoidSpec, delta: f64, half_width: f64, mode_l: usize) -> Result<Self> {
        SpectralProblem {
            operator: Operator::Catenoid { spec: *spec },
            delta,
            half_width,
            mode_l,
            grid_n: DEFAULT_GRID_N,
            domain: Domain::TwoSided,
        }
        .validated()
    }

    pub fn one_sided(
        spec: &CatenoidSpec,
        delta: f64,
        r0: f64,
        half_width: f64,
        mode_l: usize,
    ) -> Result<Self> {
        SpectralProblem {
            operator: Operator::Catenoid { spec: *spec },
            delta,
            half_width,
            mode_l,
            grid_n: DEFAULT_GRID_N,
            domain: Domain::OneSided { r0 },
        }
        .validated()
    }

    /// The Dirichlet Laplacian on `(-R, R)`.
    pub fn flat(half_width: f64) -> Result<Self> {
        SpectralProblem {
            operator: Operator::Flat,
            delta: 0.0,
            half_width,
            mode_l: 0,
            grid_n: DEFAULT_GRID_N,
            domain: Domain::TwoSided,
        }
        .validated()
    }

    pub fn with_grid(mut self, grid_n: usize) -> Result<Self> {
        self.grid_n = grid_n;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::invalid(format!("delta = {} outside [0, 1]", self.delta)));
        }
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(Error::invalid("R must be positive and finite"));
        }
        if self.grid_n < MIN_GRID_N {
            return Err(Error::invalid(format!("grid_N must be at least {MIN_GRID_N}")));
        }
        if let Domain::OneSided { r0 } = self.domain {
            if !(r0 >= 0.0) || !(r0 < self.half_width) {
                return Err(Error::invalid(format!("need 0 <= r0 < R, got r0 = {r0}")));
            }
        }
        if let Operator::Catenoid { spec } = self.operator {
            let max_safe = spec.max_safe_arclength();
            if self.half_width > max_safe {
                return Err(Error::Overflow {
                    requested: self.half_width,
                    max_safe,
                });
            }
        }
        Ok(self)
    }

    pub fn interval(&self) -> (f64, f64) {
        match self.domain {
            Domain::TwoSided => (-self.half_width, self.half_width),
            Domain::OneSided { r0 } => (r0, self.half_width),
        }
    }

    /// Base grid including both endpoints (`grid_n + 2` points).
    pub fn nodes(&self) -> Vec<f64> {
        let (a, b) = self.interval();
        let m = self.grid_n + 1;
        let h = (b - a) / m as f64;
        (0..=m).map(|i| if i == m { b } else { a + h * i as f64 }).collect()
    }

    /// Base grid spacing.
    pub fn grid_step(&self) -> f64 {
        let (a, b) = self.interval();
        (b - a) / (self.grid_n + 1) as f64
    }

    fn n_dim(&self) -> usize {
        match self.operator {
            Operator::Catenoid { spec } => spec.n(),
            Operator::Flat => 3,
        }
    }

    /// Natural eigenvalue scale, used to recognise tolerances below round-off.
    fn scale(&self) -> f64 {
        match self.operator {
            Operator::Catenoid { spec } => {
                let n = spec.n() as f64;
                n * (n - 1.0) / (spec.phi0() * spec.phi0())
            }
            Operator::Flat => (PI / (2.0 * self.half_width)).powi(2),
        }
    }

    fn ladder(&self, exec: Execution) -> Result<Ladder> {
        let (a, b) = self.interval();
        Ladder::new(self.operator, a, b, self.grid_n + 1, exec)
    }
}

/// `q(r) = (1-δ)|A|² - l(l+n-2)/φ²`.
pub fn reduced_potential(spec: &CatenoidSpec, delta: f64, l: usize, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::invalid(format!("delta = {delta} outside [0, 1]")));
    }
    let p = spec.point_at(r)?;
    let a2 = norm_a2_closed(spec, p.phi)?;
    Ok(potential(spec.n(), delta, l, a2, 1.0 / (p.phi * p.phi)))
}

#[inline]
fn potential(n: usize, delta: f64, l: usize, a2: f64, inv_phi2: f64) -> f64 {
    let ang = (l * (l + n - 2)) as f64;
    (1.0 - delta) * a2 - ang * inv_phi2
}

/// Coefficient samples on one grid of the ladder.
#[derive(Debug, Clone)]
struct GridData {
    h: f64,
    nodes: Vec<f64>,
    w: Vec<f64>,
    w_mid: Vec<f64>,
    a2: Vec<f64>,
    inv_phi2: Vec<f64>,
}

impl GridData {
    fn intervals(&self) -> usize {
        self.w_mid.len()
    }

    /// Symmetrized matrix over the interior nodes.
    fn matrix(&self, n: usize, delta: f64, l: usize) -> SymTridiag {
        let m = self.intervals();
        let h2 = self.h * self.h;
        let mut d = Vec::with_capacity(m - 1);
        let mut e = Vec::with_capacity(m.saturating_sub(2));
        for i in 1..m {
            let q = potential(n, delta, l, self.a2[i], self.inv_phi2[i]);
            d.push((self.w_mid[i - 1] + self.w_mid[i]) / (h2 * self.w[i]) - q);
            if i + 1 < m {
                e.push(-self.w_mid[i] / (h2 * (self.w[i] * self.w[i + 1]).sqrt()));
            }
        }
        SymTridiag::new(d, e)
    }
}

/// Successively doubled grids on `[a, b]`, sharing the waist parameters
/// already computed on coarser levels.
struct Ladder {
    operator: Operator,
    a: f64,
    b: f64,
    intervals: usize,
    exec: Execution,
    // waist parameters at spacing h/2 (nodes and midpoints)
    params: Vec<f64>,
}

impl Ladder {
    fn new(operator: Operator, a: f64, b: f64, intervals: usize, exec: Execution) -> Result<Self> {
        let params = match operator {
            Operator::Catenoid { spec } => {
                let half = (b - a) / (2 * intervals) as f64;
                let rs: Vec<f64> = (0..=2 * intervals)
                    .map(|j| if j == 2 * intervals { b } else { a + half * j as f64 })
                    .collect();
                spec.params_sorted(&rs)?
            }
            Operator::Flat => Vec::new(),
        };
        Ok(Ladder {
            operator,
            a,
            b,
            intervals,
            exec,
            params,
        })
    }

    fn data(&self) -> GridData {
        let m = self.intervals;
        let h = (self.b - self.a) / m as f64;
        let nodes: Vec<f64> = (0..=m)
            .map(|i| if i == m { self.b } else { self.a + h * i as f64 })
            .collect();
        match self.operator {
            Operator::Flat => GridData {
                h,
                nodes,
                w: vec![1.0; m + 1],
                w_mid: vec![1.0; m],
                a2: vec![0.0; m + 1],
                inv_phi2: vec![0.0; m + 1],
            },
            Operator::Catenoid { spec } => {
                let mm = spec.n() as i32 - 1;
                let phi = |t: f64| spec.phi0() * (1.0 + t * t);
                let node_phi: Vec<f64> = (0..=m).map(|i| phi(self.params[2 * i])).collect();
                let w_mid = (0..m).map(|i| phi(self.params[2 * i + 1]).powi(mm)).collect();
                let w = node_phi.iter().map(|p| p.powi(mm)).collect();
                let a2 = node_phi
                    .iter()
                    .map(|&p| norm_a2_closed(&spec, p).unwrap_or(0.0))
                    .collect();
                let inv_phi2 = node_phi.iter().map(|p| 1.0 / (p * p)).collect();
                GridData {
                    h,
                    nodes,
                    w,
                    w_mid,
                    a2,
                    inv_phi2,
                }
            }
        }
    }

    fn refine(&mut self) {
        let m = self.intervals * 2;
        if let Operator::Catenoid { spec } = self.operator {
            let quarter = (self.b - self.a) / (2 * m) as f64;
            let old = &self.params;
            let fresh = self
                .exec
                .map_range(old.len() - 1, |j| spec.advance(old[j], quarter));
            let mut params = Vec::with_capacity(2 * m + 1);
            for j in 0..old.len() - 1 {
                params.push(old[j]);
                params.push(fresh[j]);
            }
            params.push(old[old.len() - 1]);
            self.params = params;
        }
        self.intervals = m;
    }
}

#[derive(Debug, Clone)]
struct Refined {
    values: Vec<f64>,
    base_values: Vec<f64>,
    finest_step: f64,
}

/// Richardson-extrapolate `raw` over the ladder until two successive
/// extrapolated vectors agree to `tol`.
fn refine_values<F>(ladder: &mut Ladder, tol: f64, scale: f64, mut raw: F) -> Result<Refined>
where
    F: FnMut(&GridData) -> Vec<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::invalid("eigenvalue tolerance must be positive"));
    }
    let base = raw(&ladder.data());
    let floor = 16.0 * f64::EPSILON * base.iter().fold(scale, |a, v| a.max(v.abs()));
    if tol < floor {
        return Err(Error::NotConverged {
            what: format!("eigenvalues (tolerance {tol:e} is below the round-off floor {floor:e})"),
            estimate: base.first().copied().unwrap_or(f64::NAN),
            error: f64::NAN,
        });
    }
    let mut prev = base.clone();
    let mut prev_ex: Option<Vec<f64>> = None;
    let mut last_diff = f64::NAN;
    loop {
        if ladder.intervals * 2 > MAX_INTERVALS {
            return Err(Error::NotConverged {
                what: format!("eigenvalues within {MAX_INTERVALS} grid intervals"),
                estimate: prev_ex.as_ref().unwrap_or(&prev)[0],
                error: last_diff,
            });
        }
        ladder.refine();
        let data = ladder.data();
        let cur = raw(&data);
        let ex: Vec<f64> = cur.iter().zip(&prev).map(|(c, p)| (4.0 * c - p) / 3.0).collect();
        if let Some(pe) = &prev_ex {
            last_diff = ex.iter().zip(pe).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            if last_diff <= tol {
                return Ok(Refined {
                    values: ex,
                    base_values: base,
                    finest_step: data.h,
                });
            }
        }
        prev_ex = Some(ex);
        prev = cur;
    }
}

/// Eigenfunctions sampled on the base grid (endpoints included), normalised
/// so that `Σ h w u² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenTable {
    pub r: Vec<f64>,
    /// Eigenvalues of the base-grid matrix the functions belong to.
    pub eigenvalues: Vec<f64>,
    pub functions: Vec<Vec<f64>>,
    /// `|T x - λ x|` of each discrete eigenvector.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Richardson-extrapolated eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues of the base-grid matrix.
    pub base_eigenvalues: Vec<f64>,
    pub grid_step: f64,
    pub finest_step: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenfunction_samples: Option<EigenTable>,
}

/// The `k` lowest Dirichlet eigenvalues to tolerance `tol`.
pub fn eigenvalues(problem: &SpectralProblem, k: usize, tol: f64) -> Result<Spectrum> {
    eigenvalues_with(problem, k, tol, Execution::default())
}

pub fn eigenvalues_with(problem: &SpectralProblem, k: usize, tol: f64, exec: Execution) -> Result<Spectrum> {
    if k == 0 {
        return Err(Error::invalid("need at least one eigenvalue"));
    }
    if k > problem.grid_n {
        return Err(Error::invalid(format!("k = {k} exceeds grid_N = {}", problem.grid_n)));
    }
    let mut ladder = problem.ladder(exec)?;
    let n = problem.n_dim();
    let refined = refine_values(&mut ladder, tol, problem.scale(), |g| {
        g.matrix(n, problem.delta, problem.mode_l).lowest(k, tol * 1e-3, exec)
    })?;
    Ok(Spectrum {
        eigenvalues: refined.values,
        base_eigenvalues: refined.base_values,
        grid_step: problem.grid_step(),
        finest_step: refined.finest_step,
        eigenfunction_samples: None,
    })
}

/// Like [`eigenvalues`], also returning base-grid eigenfunctions.
pub fn eigenvalues_and_functions(problem: &SpectralProblem, k: usize, tol: f64) -> Result<Spectrum> {
    let mut s = eigenvalues(problem, k, tol)?;
    s.eigenfunction_samples = Some(eigenfunctions(problem, k)?);
    Ok(s)
}

/// The `k` lowest eigenfunctions of the base-grid matrix.
pub fn eigenfunctions(problem: &SpectralProblem, k: usize) -> Result<EigenTable> {
    let exec = Execution::default();
    let data = problem.ladder(exec)?.data();
    let t = data.matrix(problem.n_dim(), problem.delta, problem.mode_l);
    let lambdas = t.lowest(k, 0.0, exec);
    let mut functions = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for &lambda in &lambdas {
        let (x, res) = t.eigenvector(lambda, EIGENVECTOR_TOL);
        let mut u = Vec::with_capacity(x.len() + 2);
        u.push(0.0);
        for (i, v) in x.iter().enumerate() {
            u.push(v / data.w[i + 1].sqrt());
        }
        u.push(0.0);
        // Σ w u² = Σ x² = 1, so dividing by sqrt(h) normalises Σ h w u²
        let s = data.h.sqrt();
        u.iter_mut().for_each(|v| *v /= s);
        functions.push(u);
        residuals.push(res);
    }
    Ok(EigenTable {
        r: data.nodes,
        eigenvalues: lambdas,
        functions,
        residuals,
    })
}

/// Discrete Rayleigh quotient of `f` sampled on [`SpectralProblem::nodes`].
///
/// The kinetic term uses the same midpoint weights as the eigenvalue
/// discretization, so the result is bounded below by the base-grid `λ1`.
pub fn rayleigh_quotient(problem: &SpectralProblem, f: &[f64]) -> Result<f64> {
    let m = problem.grid_n + 1;
    if f.len() != m + 1 {
        return Err(Error::invalid(format!(
            "expected {} samples on the problem grid, got {}",
            m + 1,
            f.len()
        )));
    }
    let fmax = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if fmax == 0.0 {
        return Err(Error::Singular("test function vanishes identically".into()));
    }
    if f[0].abs() > 1e-12 * fmax || f[m].abs() > 1e-12 * fmax {
        return Err(Error::invalid("test function must vanish at both ends"));
    }
    let data = problem.ladder(Execution::Sequential)?.data();
    let n = problem.n_dim();
    let h = data.h;
    let mut kinetic = 0.0;
    for i in 0..m {
        let d = f[i + 1] - f[i];
        kinetic += data.w_mid[i] * d * d / h;
    }
    let mut pot = 0.0;
    let mut mass = 0.0;
    for i in 1..m {
        let q = potential(n, problem.delta, problem.mode_l, data.a2[i], data.inv_phi2[i]);
        pot += h * data.w[i] * q * f[i] * f[i];
        mass += h * data.w[i] * f[i] * f[i];
    }
    if !(mass > 0.0) {
        return Err(Error::Singular("zero denominator in the Rayleigh quotient".into()));
    }
    Ok((kinetic - pot) / mass)
}

/// `m_l`, the dimension of the degree-`l` spherical harmonics on `S^{n-1}`.
pub fn multiplicity(n: usize, l: usize) -> u64 {
    let choose = |a: usize, b: usize| -> u64 {
        let mut c: u128 = 1;
        for i in 0..b as u128 {
            c = c * (a as u128 - i) / (i + 1);
        }
        c as u64
    };
    let first = choose(n - 1 + l, l);
    if l >= 2 {
        first - choose(n - 3 + l, l - 2)
    } else {
        first
    }
}

/// Smallest `l` with `q <= 0` everywhere, `l(l+n-2) >= (1-δ) n (n-1)`,
/// using `|A|² φ² <= n(n-1)`. From this mode on the Dirichlet operator is
/// positive and contributes no index.
pub fn first_negative_mode(n: usize, delta: f64) -> usize {
    let bound = (1.0 - delta) * (n * (n - 1)) as f64;
    (0..).find(|&l| (l * (l + n - 2)) as f64 >= bound).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexConfig {
    pub grid_n: usize,
    pub tol: f64,
    pub exec: Execution,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            grid_n: DEFAULT_GRID_N,
            tol: DEFAULT_TOL,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeIndex {
    pub l: usize,
    pub negative_count: usize,
    pub multiplicity: u64,
    /// Lowest extrapolated eigenvalues of the mode; empty when the sign of
    /// the potential already forces a positive operator.
    pub lowest_eigenvalues: Vec<f64>,
    pub certified_by_potential: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    pub n: usize,
    pub phi0: f64,
    pub delta: f64,
    #[serde(rename = "R")]
    pub r: f64,
    /// Axis heights `±s(R)` spanned by the arclength interval.
    pub s_interval: [f64; 2],
    pub l_max: usize,
    pub per_mode: Vec<ModeIndex>,
    pub total_index: u64,
}

impl IndexReport {
    pub fn mode(&self, l: usize) -> Option<&ModeIndex> {
        self.per_mode.iter().find(|m| m.l == l)
    }
}

/// Morse index of the catenoid on `(-R, R)` for `L = Δ + (1-δ)|A|²`.
pub fn morse_index(spec: &CatenoidSpec, delta: f64, r: f64, l_max: usize, tol: f64) -> Result<IndexReport> {
    morse_index_with(
        spec,
        delta,
        r,
        l_max,
        IndexConfig {
            tol,
            ..IndexConfig::default()
        },
    )
}

/// Negative eigenvalues are counted after Richardson extrapolation, so
/// eigenvalues that sit within the discretization bias of zero on the base
/// grid are classified by their limit. For each mode the number of
/// extrapolated eigenvalues computed starts at the base-grid Sturm count
/// at zero plus one and grows until the largest computed one is
/// nonnegative.
pub fn morse_index_with(
    spec: &CatenoidSpec,
    delta: f64,
    r: f64,
    l_max: usize,
    config: IndexConfig,
) -> Result<IndexReport> {
    if l_max < 1 {
        return Err(Error::invalid("l_max must be at least 1"));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::invalid(format!("delta = {delta} outside [0, 1]")));
    }
    let n = spec.n();
    let needed = first_negative_mode(n, delta);
    if needed > l_max {
        return Err(Error::InsufficientModes { l_max, needed });
    }
    let problem = SpectralProblem::two_sided(spec, delta, r, 0)?.with_grid(config.grid_n)?;
    let exec = config.exec;
    let base = problem.ladder(exec)?.data();
    let mut counts: Vec<usize> = exec.map_range(needed, |l| base.matrix(n, delta, l).count_below(0.0) + 1);
    let lowest = loop {
        if needed == 0 {
            break Vec::new();
        }
        let mut ladder = problem.ladder(exec)?;
        let offsets: Vec<usize> = counts
            .iter()
            .scan(0, |acc, &c| {
                let o = *acc;
                *acc += c;
                Some(o)
            })
            .collect();
        let cs = counts.clone();
        let refined = refine_values(&mut ladder, config.tol, problem.scale(), |g| {
            exec.map_range(needed, |l| g.matrix(n, delta, l).lowest(cs[l], config.tol * 1e-3, Execution::Sequential))
                .concat()
        })?;
        let split: Vec<Vec<f64>> = (0..needed)
            .map(|l| refined.values[offsets[l]..offsets[l] + counts[l]].to_vec())
            .collect();
        let mut grow = false;
        for l in 0..needed {
            if split[l].iter().all(|&v| v < 0.0) && counts[l] < problem.grid_n {
                counts[l] += 1;
                grow = true;
            }
        }
        if !grow {
            break split;
        }
    };
    let mut per_mode = Vec::with_capacity(l_max + 1);
    let mut total = 0u64;
    for l in 0..=l_max {
        let multiplicity = multiplicity(n, l);
        let entry = if l < needed {
            let negative = lowest[l].iter().filter(|&&v| v < 0.0).count();
            total += negative as u64 * multiplicity;
            ModeIndex {
                l,
                negative_count: negative,
                multiplicity,
                lowest_eigenvalues: lowest[l].clone(),
                certified_by_potential: false,
            }
        } else {
            ModeIndex {
                l,
                negative_count: 0,
                multiplicity,
                lowest_eigenvalues: Vec::new(),
                certified_by_potential: true,
            }
        };
        per_mode.push(entry);
    }
    let s_r = spec.point_at(r)?.s;
    Ok(IndexReport {
        n,
        phi0: spec.phi0(),
        delta,
        r,
        s_interval: [-s_r, s_r],
        l_max,
        per_mode,
        total_index: total,
    })
}

/// One [`IndexReport`] per entry of `deltas`, in order.
pub fn delta_sweep(
    spec: &CatenoidSpec,
    r: f64,
    deltas: &[f64],
    l_max: usize,
    config: IndexConfig,
) -> Result<Vec<IndexReport>> {
    let inner = IndexConfig {
        exec: Execution::Sequential,
        ..config
    };
    config
        .exec
        .map_slice(deltas, |&d| morse_index_with(spec, d, r, l_max, inner))
        .into_iter()
        .collect()
}
