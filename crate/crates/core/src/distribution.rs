//! The measured frequency distribution of one order-finding run.
//!
//! Frequencies `j ∈ [0, 2^n)` with `n = m + ℓ` are observed with probability
//! `P(α)` depending only on the argument `α = {rj}_{2^n}`. [`Measurement`]
//! evaluates the closed form, its approximations, brute-force oracles and the
//! sampler used by the simulator.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::model::{big_to_f64, round_half_up_ratio, signed_residue, DerivedParams, Params};
use crate::numeric::{
    ratio_to_f64, roots_of_unity_dd, scaled_sin, sin2_pi_over_pow2, sin2_pi_over_pow2_i128, sin2_pi_ratio,
    DoubleDouble,
};

/// Largest register length for the exhaustive oracles.
pub const ORACLE_MAX_BITS: u32 = 24;

/// Default cap on the sampled offset.
pub const DEFAULT_T_MAX: u64 = 1 << 24;

/// The argument `α = {rj}_{2^n}` of a frequency.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Argument {
    alpha: BigInt,
    n: u32,
}

impl Argument {
    pub fn new(alpha: BigInt, n: u32) -> Result<Self> {
        let half = BigInt::one() << (n - 1);
        if alpha < -&half || alpha >= half {
            return Err(invalid(format!("argument {alpha} outside [-2^{}, 2^{})", n - 1, n - 1)));
        }
        Ok(Argument { alpha, n })
    }

    pub fn alpha(&self) -> &BigInt {
        &self.alpha
    }

    /// The angle `2πα / 2^n`.
    pub fn theta(&self) -> f64 {
        2.0 * PI * ratio_to_f64(&self.alpha, &(BigInt::one() << self.n))
    }
}

/// A peak of the distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peak {
    pub z: BigUint,
    /// `round(2^n z / r)`.
    pub j0: BigUint,
    /// `{r j0}_{2^n}`, in `(-r/2, r/2]`.
    pub alpha0: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleKind {
    Frequency(#[serde(with = "crate::model::biguint_string")] BigUint),
    Tail,
}

/// Result of simulating one measurement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub kind: SampleKind,
    #[serde(with = "crate::model::biguint_string")]
    pub peak_z: BigUint,
    /// Offset from `j0(peak_z)`; meaningful for `Frequency`.
    pub offset_t: i64,
}

impl SampleOutcome {
    pub fn frequency(&self) -> Option<&BigUint> {
        match &self.kind {
            SampleKind::Frequency(j) => Some(j),
            SampleKind::Tail => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Small {
    r: i128,
    beta: i128,
    l: i128,
}

/// Distribution of the observed frequency for fixed `r` and `n = m + ℓ`.
#[derive(Clone, Debug)]
pub struct Measurement {
    d: DerivedParams,
    r_int: BigInt,
    beta_f: f64,
    rest_f: f64,
    r_f: f64,
    small: Option<Small>,
}

impl Measurement {
    pub fn new(params: &Params) -> Result<Self> {
        Ok(Self::from_derived(params.derive()?))
    }

    /// Builds the distribution for order `r` and register length `n` directly.
    pub fn with_order(r: &BigUint, n: u32) -> Result<Self> {
        if r < &BigUint::from(2u32) {
            return Err(invalid("r must be >= 2"));
        }
        if !(2..=crate::model::MAX_REGISTER_BITS).contains(&n) || r.bits() > u64::from(n) {
            return Err(invalid(format!("register length n = {n} invalid for r = {r}")));
        }
        Ok(Self::from_derived(DerivedParams::compute(r, n)))
    }

    fn from_derived(d: DerivedParams) -> Self {
        let small = if d.n <= 62 {
            Some(Small {
                r: d.r.to_i128().unwrap(),
                beta: d.beta.to_i128().unwrap(),
                l: d.l.to_i128().unwrap(),
            })
        } else {
            None
        };
        let beta_i = BigInt::from(d.beta.clone());
        let r_int = BigInt::from(d.r.clone());
        Measurement {
            beta_f: big_to_f64(&beta_i),
            rest_f: big_to_f64(&(&r_int - &beta_i)),
            r_f: big_to_f64(&r_int),
            r_int,
            small,
            d,
        }
    }

    pub fn derived(&self) -> &DerivedParams {
        &self.d
    }

    pub fn n(&self) -> u32 {
        self.d.n
    }

    pub fn r(&self) -> &BigUint {
        &self.d.r
    }

    /// Argument of frequency `j`.
    pub fn argument(&self, j: &BigUint) -> Argument {
        let alpha = signed_residue(&(&self.r_int * BigInt::from(j.clone())), self.d.n);
        Argument { alpha, n: self.d.n }
    }

    fn check_z(&self, z: &BigUint) -> Result<()> {
        if z >= &self.d.r {
            return Err(invalid(format!("peak index z = {z} outside [0, r)")));
        }
        Ok(())
    }

    /// `j0(z) = round(2^n z / r)`.
    pub fn optimal_frequency(&self, z: &BigUint) -> Result<BigUint> {
        self.check_z(z)?;
        Ok(self.j0_unchecked(&BigInt::from(z.clone())).to_biguint().unwrap())
    }

    fn j0_unchecked(&self, z: &BigInt) -> BigInt {
        round_half_up_ratio(&(z << self.d.n), &self.r_int)
    }

    pub fn peak(&self, z: &BigUint) -> Result<Peak> {
        self.check_z(z)?;
        let zi = BigInt::from(z.clone());
        let j0 = self.j0_unchecked(&zi);
        let alpha0 = &self.r_int * &j0 - (&zi << self.d.n);
        Ok(Peak {
            z: z.clone(),
            j0: j0.to_biguint().unwrap(),
            alpha0,
        })
    }

    /// `α0(z) = {r j0(z)}_{2^n}`.
    pub fn peak_argument(&self, z: &BigUint) -> Result<Argument> {
        let p = self.peak(z)?;
        Ok(Argument {
            alpha: p.alpha0,
            n: self.d.n,
        })
    }

    /// `P(0) = (L² r + (2L + 1) β) / 2^{2n}` exactly.
    pub fn prob_zero_exact(&self) -> BigRational {
        let l = BigInt::from(self.d.l.clone());
        let beta = BigInt::from(self.d.beta.clone());
        let num = &l * &l * &self.r_int + (BigInt::from(2) * &l + 1) * beta;
        BigRational::new(num, BigInt::one() << (2 * self.d.n))
    }

    /// Closed-form probability of observing a frequency with argument `alpha`.
    pub fn prob(&self, alpha: &Argument) -> f64 {
        debug_assert_eq!(alpha.n, self.d.n);
        if let (Some(_), Some(a)) = (self.small, alpha.alpha.to_i64()) {
            return self.prob_i64(a);
        }
        if alpha.alpha.is_zero() {
            return ratio_f64(&self.prob_zero_exact());
        }
        let n = self.d.n;
        let l = BigInt::from(self.d.l.clone());
        let s_long = sin2_pi_over_pow2(&(&alpha.alpha * (&l + 1)), n);
        let s_short = sin2_pi_over_pow2(&(&alpha.alpha * &l), n);
        let d = scaled_sin(big_to_f64(&alpha.alpha), n);
        ((self.beta_f / d) * s_long + (self.rest_f / d) * s_short) / d
    }

    /// [`Measurement::prob`] for machine-size arguments when `n <= 62`.
    pub fn prob_i64(&self, alpha: i64) -> f64 {
        let s = self.small.expect("machine-size path requires n <= 62");
        let n = self.d.n;
        if alpha == 0 {
            // (L² r + (2L + 1) β) / 2^{2n}, exact numerator when it fits
            let num = s.l.checked_mul(s.l).and_then(|x| x.checked_mul(s.r));
            return match num {
                Some(v) => {
                    let v = v + (2 * s.l + 1) * s.beta;
                    (v as f64) * crate::numeric::pow2_neg(2 * n)
                }
                None => ratio_f64(&self.prob_zero_exact()),
            };
        }
        let a = alpha as i128;
        let s_long = sin2_pi_over_pow2_i128(a * (s.l + 1), n);
        let s_short = sin2_pi_over_pow2_i128(a * s.l, n);
        let d = scaled_sin(alpha as f64, n);
        ((self.beta_f / d) * s_long + (self.rest_f / d) * s_short) / d
    }

    /// `T(α) = r·sin²(πα/r) / (2^{2n}·sin²(πα/2^n))`; requires `α ≠ 0`.
    pub fn intermediate_prob(&self, alpha: &Argument) -> Result<f64> {
        if alpha.alpha.is_zero() {
            return Err(invalid("intermediate form undefined at alpha = 0"));
        }
        let num = self.r_f * sin2_pi_ratio(&alpha.alpha, &self.r_int);
        let d = scaled_sin(big_to_f64(&alpha.alpha), self.d.n);
        Ok(num / d / d)
    }

    /// `P̃(α) = r·sin²(πα/r) / (πα)²`; requires `α ≠ 0`.
    pub fn approx_prob(&self, alpha: &Argument) -> Result<f64> {
        if alpha.alpha.is_zero() {
            return Err(invalid("approximation undefined at alpha = 0; use prob"));
        }
        let num = self.r_f * sin2_pi_ratio(&alpha.alpha, &self.r_int);
        let d = PI * big_to_f64(&alpha.alpha);
        Ok(num / d / d)
    }

    fn check_radius(&self, b: u64) -> Result<()> {
        if BigUint::from(2 * b + 1) * &self.d.r >= self.d.modulus {
            return Err(invalid(format!("B = {b} must be < B_max")));
        }
        Ok(())
    }

    /// `Σ_{|t| <= B} P(α0(z) + r t)`.
    pub fn neighborhood_mass(&self, z: &BigUint, b: u64) -> Result<f64> {
        self.check_radius(b)?;
        let alpha0 = self.peak(z)?.alpha0;
        let b = b as i64;
        let mut total = 0.0;
        for t in -b..=b {
            let alpha = &alpha0 + &self.r_int * t;
            total += self.prob(&Argument { alpha, n: self.d.n });
        }
        Ok(total)
    }

    /// Offsets `(left, right)` of the frequencies closer to `j0(z)` than to
    /// its neighbouring peaks; the cells of all peaks tile `[0, 2^n)`.
    fn cell(&self, z: &BigInt) -> (BigInt, BigInt) {
        let j0 = self.j0_unchecked(z);
        let next = self.j0_unchecked(&(z + 1));
        let prev = self.j0_unchecked(&(z - 1));
        let gap_r = next - &j0;
        let gap_l = j0 - prev;
        let right = (&gap_r + 1) / 2 - 1;
        let left = gap_l / 2;
        (left, right)
    }

    /// Simulates one measurement.
    ///
    /// Draws a peak uniformly, then walks the offsets `0, 1, -1, 2, -2, …`
    /// accumulating `r·P` until a uniform variate is reached. A walk that
    /// leaves `|t| <= t_max` or the peak's cell returns [`SampleKind::Tail`].
    pub fn sample_frequency(&self, rng: &mut dyn RngCore, t_max: u64) -> SampleOutcome {
        let z = rng.gen_biguint_below(&self.d.r);
        let u: f64 = rng.gen();
        let zi = BigInt::from(z.clone());
        let peak_j0 = self.j0_unchecked(&zi);
        let alpha0 = &self.r_int * &peak_j0 - (&zi << self.d.n);
        let (left, right) = self.cell(&zi);
        let cap = |x: BigInt| x.to_u64().map_or(t_max, |v| v.min(t_max)) as i64;
        let (left, right) = (cap(left), cap(right));
        let modulus = BigInt::from(self.d.modulus.clone());
        let mut acc = 0.0;
        let mut t: i64 = 0;
        loop {
            if t > right && t > left {
                break;
            }
            let offsets: &[i64] = if t == 0 { &[0] } else { &[t, -t] };
            for &offset in offsets {
                if offset > right || -offset > left {
                    continue;
                }
                let alpha = signed_residue(&(&alpha0 + &self.r_int * offset), self.d.n);
                acc += self.r_f * self.prob(&Argument { alpha, n: self.d.n });
                if acc > u {
                    let j = (&peak_j0 + offset).mod_floor_big(&modulus);
                    return SampleOutcome {
                        kind: SampleKind::Frequency(j),
                        peak_z: z,
                        offset_t: offset,
                    };
                }
            }
            t += 1;
        }
        SampleOutcome {
            kind: SampleKind::Tail,
            peak_z: z,
            offset_t: 0,
        }
    }

    /// Exact probabilities of every frequency; requires `n <= 24`.
    pub fn full_distribution(&self) -> Result<Vec<f64>> {
        let n = self.oracle_bits()?;
        let s = self.small.unwrap();
        let mask = (1i128 << n) - 1;
        let half = 1i128 << (n - 1);
        Ok((0..1i128 << n)
            .map(|j| {
                let mut a = (s.r * j) & mask;
                if a >= half {
                    a -= 1 << n;
                }
                self.prob_i64(a as i64)
            })
            .collect())
    }

    fn oracle_bits(&self) -> Result<u32> {
        if self.d.n > ORACLE_MAX_BITS {
            return Err(invalid(format!(
                "m + ell = {} above oracle scale {ORACLE_MAX_BITS}",
                self.d.n
            )));
        }
        Ok(self.d.n)
    }

    /// Probability of frequency `j` by summing the geometric series term by
    /// term in double-double arithmetic; requires `n <= 24`.
    pub fn prob_bruteforce(&self, j: &BigUint) -> Result<f64> {
        let oracle = BruteForce::new(self.oracle_bits()?);
        Ok(oracle.prob(self, j.to_u64().unwrap()))
    }
}

fn ratio_f64(q: &BigRational) -> f64 {
    ratio_to_f64(q.numer(), q.denom())
}

trait ModFloorBig {
    fn mod_floor_big(&self, m: &BigInt) -> BigUint;
}

impl ModFloorBig for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigUint {
        num_integer::Integer::mod_floor(self, m).to_biguint().unwrap()
    }
}

/// Brute-force evaluation of the measurement probabilities from a table of
/// roots of unity, reusable across orders for one register length.
pub struct BruteForce {
    n: u32,
    table: Vec<(DoubleDouble, DoubleDouble)>,
}

impl BruteForce {
    pub fn new(n: u32) -> Self {
        assert!(n <= ORACLE_MAX_BITS, "brute force limited to n <= {ORACLE_MAX_BITS}");
        BruteForce {
            n,
            table: roots_of_unity_dd(n),
        }
    }

    /// `β|Σ_{b=0}^{L} e^{iθb}|² + (r−β)|Σ_{b=0}^{L−1} e^{iθb}|²` over `2^{2n}`.
    pub fn prob(&self, m: &Measurement, j: u64) -> f64 {
        assert_eq!(m.n(), self.n);
        let s = m.small.unwrap();
        let mask = (1u64 << self.n) - 1;
        let step = ((s.r as u64) * j) & mask;
        let mut idx = 0u64;
        let (mut re, mut im) = (DoubleDouble::ZERO, DoubleDouble::ZERO);
        for _ in 0..s.l {
            let (c, si) = self.table[idx as usize];
            re = re + c;
            im = im + si;
            idx = (idx + step) & mask;
        }
        let short = re.sqr() + im.sqr();
        let (c, si) = self.table[idx as usize];
        let long = (re + c).sqr() + (im + si).sqr();
        let total = long.mul_f64(s.beta as f64) + short.mul_f64((s.r - s.beta) as f64);
        total.to_f64() * crate::numeric::pow2_neg(2 * self.n)
    }

    /// The same probability summed over residue classes `e ∈ [0, r)` of the
    /// exponent, `Σ_e |Σ_{a ≡ e} e^{2πi aj/2^n}|² / 2^{2n}`.
    pub fn prob_residue_classes(&self, m: &Measurement, j: u64) -> f64 {
        let s = m.small.unwrap();
        let size = 1u64 << self.n;
        let mask = size - 1;
        let r = s.r as u64;
        let mut total = DoubleDouble::ZERO;
        for e in 0..r {
            let (mut re, mut im) = (DoubleDouble::ZERO, DoubleDouble::ZERO);
            let mut a = e;
            while a < size {
                let (c, si) = self.table[((a * j) & mask) as usize];
                re = re + c;
                im = im + si;
                a += r;
            }
            total = total + re.sqr() + im.sqr();
        }
        total.to_f64() * crate::numeric::pow2_neg(2 * self.n)
    }
}
