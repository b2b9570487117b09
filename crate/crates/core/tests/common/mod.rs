//! Independent reference values used by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

/// Arithmetic-geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let (x, y) = (0.5 * (a + b), (a * b).sqrt());
        if (x - y).abs() <= 1e-16 * x {
            return x;
        }
        a = x;
        b = y;
    }
    a
}

/// Double-exponential quadrature of `f` over `(0, 1)`; `f` may blow up
/// integrably at either end. `g(y) = f(1 - y)` must be supplied so the
/// right endpoint can be approached without cancellation.
pub fn tanh_sinh_unit<F, G>(f: F, g: G, levels: usize) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut prev = f64::NAN;
    let mut h = 1.0;
    for _ in 0..levels {
        let mut sum = 0.0;
        let kmax = (4.0 / h) as i64;
        for k in -kmax..=kmax {
            let t = k as f64 * h;
            let u = FRAC_PI_2 * t.sinh();
            let w = FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
            // distance to each endpoint of (0, 1), computed without cancellation
            let e = 1.0 / (1.0 + (2.0 * u.abs()).exp());
            let val = if u < 0.0 { f(e) } else { g(e) };
            if val.is_finite() {
                sum += 0.5 * w * val;
            }
        }
        let est = sum * h;
        if (est - prev).abs() <= 1e-14 * est.abs() {
            return est;
        }
        prev = est;
        h *= 0.5;
    }
    prev
}

/// Height of the half catenoid above its waist:
/// `φ0 ∫_1^∞ dx / sqrt(x^{2(n-1)} - 1)`, by the substitution `x = 1/y`.
pub fn axis_height(n: usize, phi0: f64) -> f64 {
    let m = (n - 1) as i32;
    let f = move |y: f64| y.powi(m - 2) / (1.0 - y.powi(2 * m)).sqrt();
    let g = move |e: f64| {
        let y = 1.0 - e;
        // 1 - y^{2m} = e (1 + y + ... + y^{2m-1})
        let geom: f64 = (0..2 * m).map(|k| y.powi(k)).sum();
        y.powi(m - 2) / (e * geom).sqrt()
    };
    phi0 * tanh_sinh_unit(f, g, 12)
}

/// The same height for n = 3 from the complete elliptic integral
/// `K(1/√2) / √2`, via the AGM.
pub fn axis_height_n3(phi0: f64) -> f64 {
    phi0 * PI / (2.0 * agm(1.0, 0.5f64.sqrt())) / 2f64.sqrt()
}

/// Area of the unit sphere `S^{d-1}` from `π^{d/2} / Γ(d/2 + 1) · d`.
pub fn unit_sphere_area(d: usize) -> f64 {
    let mut vol = [1.0, 2.0].to_vec();
    for k in 2..=d {
        let v = vol[k - 2] * 2.0 * PI / k as f64;
        vol.push(v);
    }
    d as f64 * vol[d]
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
