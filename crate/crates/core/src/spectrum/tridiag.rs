//! Symmetric tridiagonal eigenvalue kernels: Sturm counts, bisection and
//! inverse iteration.

use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SymTridiag {
    pub d: Vec<f64>,
    /// Off-diagonal, `e[i]` couples rows `i` and `i + 1`.
    pub e: Vec<f64>,
    e2: Vec<f64>,
}

impl SymTridiag {
    pub fn new(d: Vec<f64>, e: Vec<f64>) -> Self {
        debug_assert_eq!(e.len() + 1, d.len());
        let e2 = e.iter().map(|x| x * x).collect();
        SymTridiag { d, e, e2 }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.d.len() {
            if q == 0.0 {
                q = -f64::EPSILON * (self.e[i - 1].abs() + f64::MIN_POSITIVE);
            }
            q = self.d[i] - x - self.e2[i - 1] / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut rad = 0.0;
            if i > 0 {
                rad += self.e[i - 1].abs();
            }
            if i + 1 < n {
                rad += self.e[i].abs();
            }
            lo = lo.min(self.d[i] - rad);
            hi = hi.max(self.d[i] + rad);
        }
        let pad = f64::EPSILON * (hi - lo).abs().max(hi.abs()).max(lo.abs()) * 4.0;
        (lo - pad, hi + pad)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection, to absolute
    /// accuracy `abs_tol` or full relative precision, whichever comes first.
    pub fn kth(&self, k: usize, abs_tol: f64) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            let width = hi - lo;
            if width <= abs_tol || width <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `count` smallest eigenvalues in ascending order.
    pub fn lowest(&self, count: usize, abs_tol: f64, exec: Execution) -> Vec<f64> {
        let count = count.min(self.len());
        exec.map_range(count, |k| self.kth(k, abs_tol))
    }

    /// Solve `(T - σ) x = b` in place by Gaussian elimination with partial
    /// pivoting; exactly zero pivots are nudged so near-singular shifts work.
    fn solve_shifted(&self, sigma: f64, b: &mut [f64]) {
        let n = self.d.len();
        let tiny = f64::EPSILON * self.gershgorin().1.abs().max(1.0) * 1e-3;
        let mut d: Vec<f64> = self.d.iter().map(|x| x - sigma).collect();
        let mut dl = self.e.clone();
        let mut du = self.e.clone();
        if n == 1 {
            b[0] /= if d[0] == 0.0 { tiny } else { d[0] };
            return;
        }
        // dl doubles as the second superdiagonal created by row swaps
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                b[i + 1] -= fact * b[i];
                dl[i] = 0.0;
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 1 < n - 1 {
                    dl[i] = du[i + 1];
                    du[i + 1] = -fact * dl[i];
                } else {
                    dl[i] = 0.0;
                }
                du[i] = temp;
                let tb = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tb - fact * b[i + 1];
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        b[n - 1] /= d[n - 1];
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
        }
    }

    /// Unit eigenvector for the eigenvalue `lambda` by inverse iteration,
    /// signed so that its largest component is positive. Returns the vector
    /// and the residual norm `|T x - λ x|`.
    pub fn eigenvector(&self, lambda: f64, residual_tol: f64) -> (Vec<f64>, f64) {
        let n = self.d.len();
        // a smooth start vector with components in every eigenvector
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
            .collect();
        normalize(&mut x);
        let mut residual = f64::INFINITY;
        for _ in 0..8 {
            self.solve_shifted(lambda, &mut x);
            normalize(&mut x);
            residual = self.residual(lambda, &x);
            if residual <= residual_tol {
                break;
            }
        }
        let imax = x
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if x[imax] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        (x, residual)
    }

    fn residual(&self, lambda: f64, x: &[f64]) -> f64 {
        let n = x.len();
        let mut acc = 0.0;
        for i in 0..n {
            let mut y = (self.d[i] - lambda) * x[i];
            if i > 0 {
                y += self.e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                y += self.e[i] * x[i + 1];
            }
            acc += y * y;
        }
        acc.sqrt()
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 && norm.is_finite() {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}
