//! Minimal double-double arithmetic (an unevaluated sum of two f64s, about
//! 32 significant digits). Used only where finite-difference stencils
//! would otherwise be swamped by cancellation.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        // one Newton step from the f64 root doubles the precision
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let residual = ((self.hi - p) - e) + self.lo;
        let (hi, lo) = quick_two_sum(x, residual / (2.0 * x));
        Dd { hi, lo }
    }

    pub fn powi(self, k: u32) -> Self {
        let mut base = self;
        let mut acc = Dd::ONE;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, o: f64) -> Dd {
        let (s, e) = two_sum(self.hi, o);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    fn sub(self, o: f64) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, o: f64) -> Dd {
        let (p, e) = two_prod(self.hi, o);
        let (hi, lo) = quick_two_sum(p, e + self.lo * o);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + q3
    }
}

/// 10-point Gauss–Legendre nodes and weights refined to double-double
/// precision by Newton iteration on the Legendre polynomial.
pub(crate) fn gl10_dd() -> &'static [(Dd, Dd); 5] {
    use std::sync::OnceLock;
    static RULE: OnceLock<[(Dd, Dd); 5]> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut out = [(Dd::ZERO, Dd::ZERO); 5];
        for (slot, &x0) in out.iter_mut().zip(crate::quadrature::GL10_NODES.iter()) {
            let mut x = Dd::new(x0);
            let mut dp = Dd::ONE;
            for _ in 0..3 {
                let (p, d) = legendre10(x);
                x = x - p / d;
                dp = d;
            }
            let (_, d) = legendre10(x);
            dp = if d.hi != 0.0 { d } else { dp };
            let w = Dd::new(2.0) / ((Dd::ONE - x * x) * dp * dp);
            *slot = (x, w);
        }
        out
    })
}

fn legendre10(x: Dd) -> (Dd, Dd) {
    let mut p0 = Dd::ONE;
    let mut p1 = x;
    for k in 1..10u32 {
        let kf = k as f64;
        let p2 = (x * p1 * (2.0 * kf + 1.0) - p0 * kf) / Dd::new(kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    // P'_10 = 10 (x P_10 - P_9) / (x^2 - 1)
    let d = (x * p1 - p0) * 10.0 / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_carries_extra_precision() {
        let third = Dd::ONE / Dd::new(3.0);
        let back = third * 3.0 - 1.0;
        assert!(back.to_f64().abs() < 1e-31);
        let two = Dd::new(2.0);
        let s = two.sqrt();
        assert!((s * s - two).to_f64().abs() < 1e-31);
        // 1 + 1e-20 survives in double-double but not in f64
        let x = Dd::ONE + 1e-20;
        assert_eq!((x - 1.0).to_f64(), 1e-20);
    }

    #[test]
    fn powi_matches_repeated_multiplication() {
        let x = Dd::new(1.000_1);
        let p = x.powi(7);
        let mut q = Dd::ONE;
        for _ in 0..7 {
            q = q * x;
        }
        assert!((p - q).abs().to_f64() < 1e-30);
    }

    #[test]
    fn gauss_rule_integrates_polynomials_in_dd() {
        let rule = gl10_dd();
        // integral of x^18 over [-1, 1] is 2/19
        let mut acc = Dd::ZERO;
        for (x, w) in rule.iter() {
            acc = acc + *w * x.powi(18) * 2.0;
        }
        let err = (acc - Dd::new(2.0) / Dd::new(19.0)).to_f64();
        assert!(err.abs() < 1e-29, "{err}");
    }
}
