//! The Simons identity for minimal hypersurfaces, split into its
//! nonnegative defect terms, and its equality case on the catenoid.
//!
//! Work in a principal frame, `h_ij = λ_i δ_ij`. For a traceless `λ` and a
//! fully symmetric third-order tensor `h_ijk` that is traceless in every pair
//! of indices, the algebraic identity
//!
//! ```text
//! Σ h_ijk² - |∇|A||² = (2/n)|∇|A||² + E1 + E2 + E3
//! ```
//!
//! holds with
//!
//! - `E1 = Σ h_ijk²` over ordered triples of distinct indices,
//! - `E2 = (2/n) Σ_i Σ_{j<k; j,k≠i} (h_kki - h_jji)²`,
//! - `E3 = (1 + 2/n)|A|^{-2} Σ_k Σ_{i<j} (λ_i h_jjk - λ_j h_iik)²`,
//! - `|∇|A||² = |A|^{-2} Σ_k (Σ_i λ_i h_iik)²`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{norm_a_of_phi, shape_tensor};
use crate::profile::CatenoidSpec;

/// Principal curvatures and the covariant derivative of the second
/// fundamental form at one point, in a principal frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeTensor3 {
    pub n: usize,
    pub h_diag: Vec<f64>,
    h3: Vec<f64>,
}

impl ShapeTensor3 {
    pub fn zeros(n: usize) -> Self {
        ShapeTensor3 {
            n,
            h_diag: vec![0.0; n],
            h3: vec![0.0; n * n * n],
        }
    }

    /// Build from a diagonal and a flat row-major `n × n × n` array.
    pub fn new(h_diag: Vec<f64>, h3: Vec<f64>) -> Result<Self> {
        let n = h_diag.len();
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if h3.len() != n * n * n {
            return Err(Error::invalid(format!(
                "h3 has {} entries, expected {}",
                h3.len(),
                n * n * n
            )));
        }
        Ok(ShapeTensor3 { n, h_diag, h3 })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.h3[(i * self.n + j) * self.n + k]
    }

    pub fn h3(&self) -> &[f64] {
        &self.h3
    }

    /// Set `h_ijk` and all its index permutations.
    pub fn set_sym(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.n;
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.h3[(a * n + b) * n + c] = v;
        }
    }

    pub fn norm_a2(&self) -> f64 {
        self.h_diag.iter().map(|x| x * x).sum()
    }

    /// Largest violation of symmetry, pair tracelessness and `Σ λ_i = 0`,
    /// relative to the size of the entries.
    pub fn admissibility_defect(&self) -> f64 {
        let n = self.n;
        let scale3 = self.h3.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
        let scale2 = self.h_diag.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
        let mut worst = (self.h_diag.iter().sum::<f64>() / scale2).abs();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    for w in [self.get(i, k, j), self.get(j, i, k), self.get(k, j, i)] {
                        worst = worst.max((v - w).abs() / scale3);
                    }
                }
            }
        }
        for k in 0..n {
            let trace: f64 = (0..n).map(|i| self.get(i, i, k)).sum();
            worst = worst.max(trace.abs() / scale3);
        }
        worst
    }
}

/// The terms of the Simons identity at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimonsBreakdown {
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    #[serde(rename = "E3")]
    pub e3: f64,
    #[serde(rename = "gradNormA2")]
    pub grad_norm_a2: f64,
    #[serde(rename = "sumH2")]
    pub sum_h2: f64,
    pub identity_residual: f64,
}

impl SimonsBreakdown {
    pub fn e(&self) -> f64 {
        self.e1 + self.e2 + self.e3
    }

    /// Identity residual relative to `Σ h_ijk²` (zero when both vanish).
    pub fn relative_residual(&self) -> f64 {
        if self.identity_residual == 0.0 {
            0.0
        } else {
            self.identity_residual / self.sum_h2
        }
    }
}

pub fn breakdown(t: &ShapeTensor3) -> Result<SimonsBreakdown> {
    let n = t.n;
    let nf = n as f64;
    let lam = &t.h_diag;
    let a2 = t.norm_a2();
    if !(a2 > 0.0) {
        return Err(Error::Singular("|A| = 0: the Simons terms are undefined".into()));
    }
    let sum_h2: f64 = t.h3.iter().map(|x| x * x).sum();
    let mut e1 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != j && j != k && i != k {
                    let v = t.get(i, j, k);
                    e1 += v * v;
                }
            }
        }
    }
    let mut e2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in j + 1..n {
                if j != i && k != i {
                    let d = t.get(k, k, i) - t.get(j, j, i);
                    e2 += d * d;
                }
            }
        }
    }
    e2 *= 2.0 / nf;
    let mut e3 = 0.0;
    let mut grad = 0.0;
    for k in 0..n {
        let mut g = 0.0;
        for i in 0..n {
            g += lam[i] * t.get(i, i, k);
            for j in i + 1..n {
                let d = lam[i] * t.get(j, j, k) - lam[j] * t.get(i, i, k);
                e3 += d * d;
            }
        }
        grad += g * g;
    }
    e3 *= (1.0 + 2.0 / nf) / a2;
    grad /= a2;
    let identity_residual = (sum_h2 - grad - 2.0 / nf * grad - e1 - e2 - e3).abs();
    Ok(SimonsBreakdown {
        e1,
        e2,
        e3,
        grad_norm_a2: grad,
        sum_h2,
        identity_residual,
    })
}

/// `|Σ h_ijk² - (1 + 2/n)|∇|A||² - E1 - E2 - E3|`.
pub fn algebraic_residual(t: &ShapeTensor3) -> Result<f64> {
    Ok(breakdown(t)?.identity_residual)
}

/// A random admissible tensor: Gaussian `λ` projected to trace zero and a
/// Gaussian fully symmetric `h_ijk` projected onto the pair-traceless
/// subspace. Deterministic in `seed`.
pub fn random_admissible_tensor(n: usize, seed: u64) -> Result<ShapeTensor3> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut lam: Vec<f64> = (0..n).map(|_| normal()).collect();
    let mean = lam.iter().sum::<f64>() / n as f64;
    lam.iter_mut().for_each(|x| *x -= mean);
    let mut t = ShapeTensor3::zeros(n);
    t.h_diag = lam;
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                t.set_sym(i, j, k, normal());
            }
        }
    }
    for _ in 0..4 {
        remove_traces(&mut t);
        if t.admissibility_defect() <= 1e-14 {
            break;
        }
    }
    Ok(t)
}

fn remove_traces(t: &mut ShapeTensor3) {
    let n = t.n;
    let v: Vec<f64> = (0..n).map(|k| (0..n).map(|i| t.get(i, i, k)).sum()).collect();
    let c = 1.0 / (n as f64 + 2.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut corr = 0.0;
                if i == j {
                    corr += v[k];
                }
                if i == k {
                    corr += v[j];
                }
                if j == k {
                    corr += v[i];
                }
                t.h3[(i * n + j) * n + k] -= c * corr;
            }
        }
    }
}

/// Simons terms of the catenoid at arclength `r`.
pub fn catenoid_breakdown(spec: &CatenoidSpec, r: f64) -> Result<SimonsBreakdown> {
    breakdown(&shape_tensor(spec, &spec.point_at(r)?))
}

/// Outcome of checking `|A|Δ|A| + |A|⁴ = (2/n)|∇|A||²` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EqualityCheck {
    pub r: f64,
    pub fd_step: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// `residual / |A|⁴`.
    pub relative: f64,
    /// `residual / (h² |A|⁴)`, which settles to a constant once the
    /// truncation error dominates.
    pub c_estimate: f64,
}

/// Evaluate both sides of the catenoid equality with fourth-order centered
/// differences of `|A|` in arclength. Stencil abscissae and values are
/// carried in double-double so that the check measures truncation error
/// rather than cancellation.
pub fn catenoid_equality_check(spec: &CatenoidSpec, r: f64, fd_step: f64) -> Result<EqualityCheck> {
    if !(fd_step > 0.0) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let n = spec.n();
    let m = (n - 1) as u32;
    if r.abs() + 2.0 * fd_step > spec.max_safe_arclength() {
        return Err(Error::Overflow {
            requested: r.abs() + 2.0 * fd_step,
            max_safe: spec.max_safe_arclength(),
        });
    }
    let tc = spec.param_at(r)?;
    let ts = spec.stencil_params_dd(tc, fd_step, &[-2, -1, 0, 1, 2]);
    let c = (n as f64 * (n - 1) as f64).sqrt();
    let phi0 = spec.phi0();
    let f: Vec<Dd> = ts
        .iter()
        .map(|&t| {
            // |A| = c φ0^{-1} (1 + t²)^{-n}
            let base = Dd::ONE + t * t;
            Dd::new(c / phi0) / base.powi(m + 1)
        })
        .collect();
    let h = Dd::new(fd_step);
    let d1 = ((f[3] - f[1]) * 8.0 + f[0] - f[4]) / (h * 12.0);
    let d2 = ((f[1] + f[3]) * 16.0 - f[2] * 30.0 - f[0] - f[4]) / (h * h * 12.0);
    let p = spec.point_from_param(tc, r, 0.0);
    let ratio = p.dphi_dr() / p.phi;
    let lap = d2 + d1 * (m as f64 * ratio);
    let a = f[2];
    let a4 = a.powi(4);
    let lhs = a * lap + a4;
    let rhs = d1 * d1 * (2.0 / n as f64);
    let residual = (lhs - rhs).abs().to_f64();
    let a4 = a4.to_f64();
    debug_assert!((a.to_f64() - norm_a_of_phi(spec, p.phi)).abs() <= 1e-12 * a.to_f64());
    Ok(EqualityCheck {
        r,
        fd_step,
        lhs: lhs.to_f64(),
        rhs: rhs.to_f64(),
        residual,
        relative: residual / a4,
        c_estimate: residual / (fd_step * fd_step * a4),
    })
}

/// Summary of the randomized identity check in one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatteryResult {
    pub n: usize,
    pub instances: usize,
    pub max_relative_residual: f64,
    pub min_term: f64,
}

/// Per-instance seed; independent of the execution strategy.
pub fn instance_seed(seed: u64, n: usize, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ ((n as u64) << 40)
        ^ (index as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9)
}

/// Check the algebraic identity on `instances` random admissible tensors.
pub fn algebraic_battery(n: usize, instances: usize, seed: u64, exec: Execution) -> Result<BatteryResult> {
    let results = exec.map_range(instances, |i| {
        random_admissible_tensor(n, instance_seed(seed, n, i)).and_then(|t| breakdown(&t))
    });
    let mut max_rel = 0.0f64;
    let mut min_term = f64::INFINITY;
    for b in results {
        let b = b?;
        max_rel = max_rel.max(b.relative_residual());
        min_term = min_term.min(b.e1).min(b.e2).min(b.e3);
    }
    Ok(BatteryResult {
        n,
        instances,
        max_relative_residual: max_rel,
        min_term: if instances == 0 { 0.0 } else { min_term },
    })
}
