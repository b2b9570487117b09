//! One-dimensional quadrature: a fixed composite Gauss–Legendre rule for
//! smooth integrands on short intervals, and a globally adaptive
//! Gauss–Kronrod (7/15) integrator with an optional infinite upper limit.

use crate::error::{Error, Result};

/// Positive abscissae of the 10-point Gauss–Legendre rule on [-1, 1].
pub(crate) const GL10_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];

pub(crate) const GL10_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_87,
    0.269_266_719_309_996_35,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_47,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 10-point Gauss–Legendre on a single panel [a, b].
pub fn gauss_legendre_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL10_NODES.iter().zip(GL10_WEIGHTS.iter()) {
        acc += w * (f(c - h * x) + f(c + h * x));
    }
    acc * h
}

/// Composite 10-point Gauss–Legendre with `panels` equal panels.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + h * k as f64;
            let hi = if k + 1 == panels { b } else { lo + h };
            gauss_legendre_panel(f, lo, hi)
        })
        .sum()
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * h;
    let floor = 50.0 * f64::EPSILON * abs_sum * h.abs();
    let error = ((kronrod - gauss) * h).abs().max(floor);
    Segment { a, b, value, error }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// `b` may be `f64::INFINITY`; the half line is mapped onto `[0, 1)` by
/// `x = a + u / (1 - u)`. Succeeds once the summed error estimate is below
/// `rel_tol * |value|`. Each segment's error is floored at a round-off level,
/// so tolerances under a few ulps can never be met and end in
/// [`Error::NotConverged`] once `max_intervals` is exhausted.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Integral> {
    if !(rel_tol > 0.0) {
        return Err(Error::invalid("quadrature tolerance must be positive"));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    if b.is_infinite() {
        let g = |u: f64| {
            let one_minus = 1.0 - u;
            let x = a + u / one_minus;
            f(x) / (one_minus * one_minus)
        };
        return adapt(&g, 0.0, 1.0, rel_tol, max_intervals);
    }
    adapt(&f, a, b, rel_tol, max_intervals)
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Integral> {
    let mut segments = vec![kronrod15(f, a, b)];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= rel_tol * value.abs() || (value == 0.0 && error == 0.0) {
            return Ok(Integral {
                value,
                error,
                intervals: segments.len(),
            });
        }
        if segments.len() >= max_intervals.max(1) {
            return Err(Error::NotConverged {
                what: "adaptive quadrature".into(),
                estimate: value,
                error,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| {
                if s.error > acc.1 {
                    (i, s.error)
                } else {
                    acc
                }
            });
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        segments.push(kronrod15(f, s.a, mid));
        segments.push(kronrod15(f, mid, s.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_degree_19() {
        let f = |x: f64| x.powi(19) + 3.0 * x.powi(18);
        let exact = 3.0 / 19.0 * 2.0;
        assert!((gauss_legendre_panel(&f, -1.0, 1.0) - exact).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_smooth_and_half_line() {
        let r = integrate(|x: f64| x.exp(), 0.0, 1.0, 1e-13, 100).unwrap();
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-13);
        let r = integrate(|x: f64| 1.0 / (1.0 + x * x), 0.0, f64::INFINITY, 1e-12, 500).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn unreachable_tolerance_reports_non_convergence() {
        let err = integrate(|x: f64| x.sin(), 0.0, 3.0, 1e-30, 50).unwrap_err();
        assert!(err.is_non_convergence());
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(integrate(|x: f64| x, 2.0, 2.0, 1e-10, 10).unwrap().value, 0.0);
    }
}
