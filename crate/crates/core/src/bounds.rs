//! Analytic lower bounds on the single-run success probability and the
//! inequalities they rest on.
//!
//! All logarithms are base two.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::{pow2_neg, ratio_to_f64};

const PI2: f64 = PI * PI;

/// `ε_{R,0}(B) = (2/B + 1/B² + 1/(3B³)) / π²`.
pub fn relative_error_bound(b: u64) -> Result<f64> {
    if b < 1 {
        return Err(invalid("B must be >= 1"));
    }
    let b = b as f64;
    Ok((2.0 / b + 1.0 / (b * b) + 1.0 / (3.0 * b * b * b)) / PI2)
}

/// Pointwise error `ε̃` of the approximation `P̃`, with or without `r`.
pub fn approximation_error(n: u32, r: Option<&BigUint>) -> f64 {
    match r {
        Some(r) => {
            let ratio = ratio_to_f64(&r.clone().into(), &(BigUint::one() << n).into());
            PI2 * pow2_neg(n) * (0.75 + ratio / 12.0)
        }
        None => PI2 * pow2_neg(n),
    }
}

/// Error terms of the neighbourhood-mass bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorTerms {
    pub eps_r0: f64,
    pub eps_a0: f64,
}

pub fn error_terms(b: u64, n: u32, r: Option<&BigUint>) -> Result<ErrorTerms> {
    Ok(ErrorTerms {
        eps_r0: relative_error_bound(b)?,
        eps_a0: (2 * b + 1) as f64 * approximation_error(n, r),
    })
}

/// How the ratio `ρ = r / 2^{m+ℓ}` is bounded when `r` is unknown.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum REliminationMode {
    /// `ρ < 2^{-(m+ℓ)/2}`, valid when `2^{m+ℓ} > r²`.
    Sqrt,
    /// `ρ < 2^{-ℓ}`, valid since `r < 2^m`.
    Pow2Ell,
    /// `ρ = r / 2^{m+ℓ}` for a known `r`.
    ExplicitR(#[serde(with = "crate::model::biguint_string")] BigUint),
}

impl REliminationMode {
    pub fn rho(&self, m: u32, ell: u32) -> f64 {
        let n = m + ell;
        match self {
            REliminationMode::Sqrt => f64::powf(2.0, -(n as f64) / 2.0),
            REliminationMode::Pow2Ell => pow2_neg(ell),
            REliminationMode::ExplicitR(r) => ratio_to_f64(&r.clone().into(), &(BigUint::one() << n).into()),
        }
    }
}

/// Inputs to the single-run bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub m: u32,
    pub ell: u32,
    pub b: u64,
    pub c: f64,
    pub r_elimination: REliminationMode,
}

/// `1 - 1/(c·log(cm))`.
pub fn smoothness_bound(c: f64, m: u32) -> Result<f64> {
    let cm = c * m as f64;
    if !(cm > 2.0) {
        return Err(invalid(format!("c*m = {cm} must exceed 2")));
    }
    Ok(1.0 - 1.0 / (c * cm.log2()))
}

fn smoothness_factor(c: f64, m: u32) -> Result<f64> {
    let cm = c * m as f64;
    if !(c >= 1.0) || !(cm > 1.0) {
        return Err(invalid(format!("c = {c} and c*m = {cm} must satisfy c >= 1, cm > 1")));
    }
    Ok(1.0 - 1.0 / (c * cm.log2()))
}

/// `(1 - ε_{R,0} - π²ρ(2B+1))·(1 - 1/(c·log(cm)))`.
pub fn single_run_success_bound(inputs: &BoundInputs) -> Result<f64> {
    if inputs.m == 0 || inputs.ell == 0 {
        return Err(invalid("m and ell must be positive"));
    }
    let first = 1.0
        - relative_error_bound(inputs.b)?
        - PI2 * inputs.r_elimination.rho(inputs.m, inputs.ell) * (2 * inputs.b + 1) as f64;
    Ok(first * smoothness_factor(inputs.c, inputs.m)?)
}

/// `ceil(6√3·2^Δ)`, the enumeration budget per frequency.
pub fn lattice_budget(delta: u32) -> u64 {
    // smallest k with k² >= 108·4^Δ
    let target = BigUint::from(108u32) << (2 * delta);
    let mut k = target.sqrt();
    if &k * &k < target {
        k += 1u32;
    }
    k.to_u64().expect("budget fits in u64")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeBound {
    pub probability: f64,
    pub budget: u64,
}

/// Bound for lattice post-processing with enumeration, `ℓ = m - Δ`.
pub fn lattice_success_bound(m: u32, delta: u32, b: u64, c: f64) -> Result<LatticeBound> {
    if delta >= m {
        return Err(invalid(format!("delta = {delta} outside [0, m = {m})")));
    }
    let probability = single_run_success_bound(&BoundInputs {
        m,
        ell: m - delta,
        b,
        c,
        r_elimination: REliminationMode::Pow2Ell,
    })?;
    Ok(LatticeBound {
        probability,
        budget: lattice_budget(delta),
    })
}

/// Choice of `ℓ` in the factoring bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactoringVariant {
    /// `ℓ` least with `2^{m+ℓ} >= N²/4`; the penalty uses `2^{-(m+ℓ)/2}`.
    Standard { ell: u32 },
    /// `ℓ = m - Δ`; the penalty uses `2^{-ℓ}`.
    Lattice { delta: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactoringBoundInputs {
    /// Bit length of `N`.
    pub l: u32,
    /// Number of distinct prime factors.
    pub n: u32,
    /// Iterations of the splitting procedure.
    pub k: u32,
    pub sigma: f64,
    pub b: u64,
    pub c: f64,
    pub variant: FactoringVariant,
}

/// The least `ℓ` with `2^{m+ℓ} >= N²/4` for `m = l - 1`.
pub fn factoring_ell(n_value: &BigUint) -> u32 {
    let m = n_value.bits() as u32 - 1;
    let sq = n_value * n_value;
    let mut ell = 1;
    while (BigUint::one() << (m + ell + 2)) < sq {
        ell += 1;
    }
    ell
}

/// Three-factor bound on completely factoring `N` in one run.
pub fn factoring_success_bound(inp: &FactoringBoundInputs) -> Result<f64> {
    if inp.n < 2 || inp.n >= inp.l {
        return Err(invalid(format!("need 2 <= n < l, got n = {}, l = {}", inp.n, inp.l)));
    }
    if inp.k < 1 {
        return Err(invalid("k must be >= 1"));
    }
    if !(inp.sigma >= 1.0) {
        return Err(invalid("sigma must be >= 1"));
    }
    let m = inp.l - 1;
    let (ell, mode) = match inp.variant {
        FactoringVariant::Standard { ell } => (ell, REliminationMode::Sqrt),
        FactoringVariant::Lattice { delta } => {
            if delta >= m {
                return Err(invalid(format!("delta = {delta} outside [0, m = {m})")));
            }
            (m - delta, REliminationMode::Pow2Ell)
        }
    };
    if ell == 0 {
        return Err(invalid("ell must be positive"));
    }
    let order_part = single_run_success_bound(&BoundInputs {
        m,
        ell,
        b: inp.b,
        c: inp.c,
        r_elimination: mode,
    })?;
    let sl = inp.sigma * inp.l as f64;
    let log_sl = sl.log2();
    if !(log_sl > 0.0) {
        return Err(invalid("sigma*l must exceed 1"));
    }
    let pairs = (inp.n as f64) * (inp.n as f64 - 1.0) / 2.0;
    let third = 1.0 - 2f64.powi(-(inp.k as i32)) * pairs - 1.0 / (2.0 * inp.sigma * inp.sigma * log_sl * log_sl);
    Ok(order_part * third)
}

/// `(1/r)(1 - ε_{R,0}(B)) - π²(2B+1)/2^n`.
pub fn neighborhood_mass_bound(r: &BigUint, n: u32, b: u64) -> Result<f64> {
    if BigUint::from(2 * b + 1) * r >= BigUint::one() << n {
        return Err(invalid(format!("B = {b} must be < B_max")));
    }
    let inv_r = 1.0 / r.to_f64().unwrap_or(f64::INFINITY);
    Ok(inv_r * (1.0 - relative_error_bound(b)?) - PI2 * (2 * b + 1) as f64 * pow2_neg(n))
}

/// `min(2^{m-t}, 2^{t+3-m})`.
pub fn rho_bound(t: u32, m: u32) -> f64 {
    let a = m as f64 - t as f64;
    let b = t as f64 + 3.0 - m as f64;
    2f64.powf(a.min(b))
}

/// `1/x + 1/(2x²) + 1/(6x³)`.
pub fn trigamma_upper(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid("trigamma requires x > 0"));
    }
    Ok(1.0 / x + 1.0 / (2.0 * x * x) + 1.0 / (6.0 * x * x * x))
}

/// Terms summed explicitly by [`trigamma_reference`].
pub const TRIGAMMA_TERMS: u64 = 1_000_000;

/// `ψ'(x) = Σ_{k>=0} (x+k)^{-2}` summed to `TRIGAMMA_TERMS` terms.
pub fn trigamma_reference(x: f64) -> Result<f64> {
    trigamma_series(x, TRIGAMMA_TERMS)
}

/// The series truncated after `terms` terms with the Euler-Maclaurin tail
/// `1/y + 1/(2y²) + 1/(6y³)` at `y = x + terms`, whose error is below
/// `1/(30 y⁵)`. Terms are added smallest first with compensation.
pub fn trigamma_series(x: f64, terms: u64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid("trigamma requires x > 0"));
    }
    let y = x + terms as f64;
    let mut sum = 1.0 / y + 1.0 / (2.0 * y * y) + 1.0 / (6.0 * y * y * y);
    let mut comp = 0.0;
    for k in (0..terms).rev() {
        let v = x + k as f64;
        let term = 1.0 / (v * v);
        let t = sum + term;
        comp += term - (t - sum);
        sum = t;
    }
    Ok(sum + comp)
}

/// `Σ_{t=-B}^{B} (α0 + r t)^{-2}` summed directly.
pub fn inverse_square_sum(alpha0: f64, r: f64, b: u64) -> f64 {
    let b = b as i64;
    let mut terms: Vec<f64> = (-b..=b)
        .map(|t| {
            let v = alpha0 + r * t as f64;
            1.0 / (v * v)
        })
        .collect();
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    terms.iter().sum()
}

/// Closed form of [`inverse_square_sum`] through the trigamma function,
/// `(π²/sin²(πα0/r) - ψ'(1+B+α0/r) - ψ'(1+B-α0/r)) / r²`.
pub fn inverse_square_sum_closed(alpha0: f64, r: f64, b: u64, trigamma: impl Fn(f64) -> f64) -> f64 {
    let x = alpha0 / r;
    let s = (PI * x).sin();
    (PI2 / (s * s) - trigamma(1.0 + b as f64 + x) - trigamma(1.0 + b as f64 - x)) / (r * r)
}

/// Margins of `2φ²/π² <= 1 - cos φ <= φ²/2` and `|(1 - cos φ) - φ²/2| <= φ⁴/24`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosMargins {
    pub lower: f64,
    pub upper: f64,
    pub taylor: f64,
}

pub fn cos_inequalities(phi: f64) -> Result<CosMargins> {
    if !(phi.abs() <= PI) {
        return Err(invalid("|phi| must be <= pi"));
    }
    let h = phi / 2.0;
    let one_minus_cos = 2.0 * h.sin() * h.sin();
    let p2 = phi * phi;
    Ok(CosMargins {
        lower: one_minus_cos - 2.0 * p2 / PI2,
        upper: p2 / 2.0 - one_minus_cos,
        taylor: p2 * p2 / 24.0 - (one_minus_cos - p2 / 2.0).abs(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CarmichaelCheck {
    pub lambda: BigUint,
    pub holds: bool,
}

/// Checks `λ(N) < 2^{1-n}·N` for odd `N` with `n >= 2` distinct prime factors.
pub fn carmichael_check(factors: &[(BigUint, u32)]) -> Result<CarmichaelCheck> {
    if factors.len() < 2 {
        return Err(invalid("need at least two distinct prime factors"));
    }
    if factors.iter().any(|(p, _)| p == &BigUint::from(2u32)) {
        return Err(invalid("N must be odd"));
    }
    let n_value = factors.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
    let lambda = crate::arith::carmichael(factors);
    // λ < 2^{1-n} N  <=>  λ·2^{n-1} < N
    let holds = (&lambda << (factors.len() - 1)) < n_value;
    Ok(CarmichaelCheck { lambda, holds })
}

pub const TABLE1_B: [u64; 6] = [1, 10, 100, 1000, 10_000, 100_000];
pub const TABLE1_C: [f64; 7] = [1.0, 10.0, 25.0, 100.0, 250.0, 500.0, 1000.0];

/// Single-run bound at `m = ℓ = 128` over the tabulated `(c, B)` grid.
pub fn table1() -> [[f64; 6]; 7] {
    let mut out = [[0.0; 6]; 7];
    for (i, &c) in TABLE1_C.iter().enumerate() {
        for (k, &b) in TABLE1_B.iter().enumerate() {
            out[i][k] = single_run_success_bound(&BoundInputs {
                m: 128,
                ell: 128,
                b,
                c,
                r_elimination: REliminationMode::Sqrt,
            })
            .expect("grid parameters are valid");
        }
    }
    out
}

/// `x` rounded down to five decimals, as a string.
pub fn floor5(x: f64) -> String {
    let k = (x * 1e5).floor() as i64;
    let sign = if k < 0 { "-" } else { "" };
    let k = k.abs();
    format!("{sign}{}.{:05}", k / 100_000, k % 100_000)
}
