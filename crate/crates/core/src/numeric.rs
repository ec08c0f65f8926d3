//! Floating-point helpers: trigonometry of exactly reduced rational angles and
//! a small double-double type for the brute-force oracles.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;

use crate::model::{big_to_f64, signed_residue};

/// `2^-n` as `f64` (exact for `n <= 1022`).
pub fn pow2_neg(n: u32) -> f64 {
    f64::powi(2.0, -(n as i32))
}

/// `sin(π·y / 2^n)²`, reducing `y` exactly modulo `2^n` first.
pub fn sin2_pi_over_pow2(y: &BigInt, n: u32) -> f64 {
    let k = signed_residue(y, n);
    let s = (PI * big_to_f64(&k) * pow2_neg(n)).sin();
    s * s
}

/// `sin(π·y / 2^n)²` for machine-size `y` and `n <= 62`.
pub fn sin2_pi_over_pow2_i128(y: i128, n: u32) -> f64 {
    let modulus = 1i128 << n;
    let mut k = y.rem_euclid(modulus);
    if k >= modulus / 2 {
        k -= modulus;
    }
    let s = (PI * (k as f64) * pow2_neg(n)).sin();
    s * s
}

/// `sin(π·a / b)²` with `a` reduced exactly modulo `b` first.
pub fn sin2_pi_ratio(a: &BigInt, b: &BigInt) -> f64 {
    let mut k = a.mod_floor(b);
    if &(&k * 2) >= b {
        k -= b;
    }
    let s = (PI * ratio_to_f64(&k, b)).sin();
    s * s
}

/// `a / b` as `f64` for big integers of any size within range.
pub fn ratio_to_f64(a: &BigInt, b: &BigInt) -> f64 {
    let shift = a.bits().max(b.bits()).saturating_sub(1000);
    if shift > 0 {
        big_to_f64(&(a >> shift)) / big_to_f64(&(b >> shift))
    } else {
        big_to_f64(a) / big_to_f64(b)
    }
}

/// `2^n·sin(π·α / 2^n)` evaluated as `α·sinc` so that `2^n` is never formed.
/// Requires `|α| <= 2^{n-1}`.
pub fn scaled_sin(alpha: f64, n: u32) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    let x = PI * alpha * pow2_neg(n);
    alpha * (x.sin() / x) * PI
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
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

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };
    /// 2π to double-double precision.
    pub const TWO_PI: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::TAU,
        lo: 2.4492935982947064e-16,
    };

    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DoubleDouble { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - DoubleDouble::from_f64(b).mul_f64(q1);
        let q2 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo }
    }

    pub fn sqr(self) -> Self {
        self * self
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        DoubleDouble { hi, lo }
    }
}

/// `(cos x, sin x)` in double-double for `|x| <= π/4` by Taylor series.
pub fn cos_sin_dd(x: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
    let x2 = x.sqr();
    let mut sin = x;
    let mut cos = DoubleDouble::ONE;
    let mut term_s = x;
    let mut term_c = DoubleDouble::ONE;
    let mut k = 1.0;
    loop {
        term_c = -(term_c * x2).div_f64(k * (k + 1.0));
        term_s = -(term_s * x2).div_f64((k + 1.0) * (k + 2.0));
        cos = cos + term_c;
        sin = sin + term_s;
        k += 2.0;
        if term_c.hi.abs() < 1e-36 && term_s.hi.abs() < 1e-36 {
            break;
        }
    }
    (cos, sin)
}

/// Table of `exp(2πi·k / 2^n)` for `k in [0, 2^n)` in double-double.
pub fn roots_of_unity_dd(n: u32) -> Vec<(DoubleDouble, DoubleDouble)> {
    let size = 1usize << n;
    if n < 3 {
        let exact = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        let step = 4 / size;
        return (0..size)
            .map(|k| {
                let (c, s) = exact[k * step];
                (DoubleDouble::from_f64(c), DoubleDouble::from_f64(s))
            })
            .collect();
    }
    let octant = size / 8;
    let mut first = Vec::with_capacity(octant + 1);
    for k in 0..=octant {
        let x = DoubleDouble::TWO_PI.mul_f64(k as f64 * pow2_neg(n));
        first.push(cos_sin_dd(x));
    }
    let mut table = vec![(DoubleDouble::ZERO, DoubleDouble::ZERO); size];
    let quarter = size / 4;
    for k in 0..quarter {
        // angle in [0, π/2): mirror the first octant
        let (c, s) = if k <= octant {
            first[k]
        } else {
            let (c, s) = first[quarter - k];
            (s, c)
        };
        table[k] = (c, s);
        table[k + quarter] = (-s, c);
        table[k + 2 * quarter] = (-c, -s);
        table[k + 3 * quarter] = (s, -c);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_trig_matches_f64() {
        let t = roots_of_unity_dd(10);
        for (k, (c, s)) in t.iter().enumerate() {
            let a = 2.0 * PI * k as f64 / 1024.0;
            assert!((c.to_f64() - a.cos()).abs() < 1e-15);
            assert!((s.to_f64() - a.sin()).abs() < 1e-15);
            let one = c.sqr() + s.sqr() - DoubleDouble::ONE;
            assert!(one.to_f64().abs() < 1e-30);
        }
        assert_eq!(roots_of_unity_dd(2)[1].1.hi, 1.0);
    }

    #[test]
    fn reduced_sines() {
        assert!(sin2_pi_over_pow2(&BigInt::from(16 * 5 + 8), 4) - 1.0 < 1e-15);
        assert_eq!(sin2_pi_over_pow2(&BigInt::from(64), 4), 0.0);
        assert_eq!(sin2_pi_over_pow2_i128(80, 4), sin2_pi_over_pow2(&BigInt::from(80), 4));
        let r = sin2_pi_ratio(&BigInt::from(7), &BigInt::from(3));
        assert!((r - (PI / 3.0).sin().powi(2)).abs() < 1e-15);
        let big = BigInt::from(1) << 200u32;
        let x = scaled_sin(1.0, 200);
        assert!((x - PI).abs() < 1e-15);
        assert!((ratio_to_f64(&(&big * 3), &(&big * 4)) - 0.75).abs() < 1e-16);
    }
}
