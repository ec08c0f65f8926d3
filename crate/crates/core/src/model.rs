//! Instance parameters, derived constants, rounding convention and the
//! seeded random stream shared by every stochastic operation.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest supported register length `m + ℓ`.
///
/// Probabilities are evaluated in `f64` after exact argument reduction; the
/// squared denominators stay representable up to this length.
pub const MAX_REGISTER_BITS: u32 = 1000;

/// Parameters of one order-finding instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// The order of `g`, known to the simulator.
    #[serde(with = "crate::model::biguint_string")]
    pub r: BigUint,
    /// Upper bound on the bit length of `r`.
    pub m: u32,
    /// Padding length.
    pub ell: u32,
    /// Offset search radius.
    pub b: u64,
    /// Smoothness parameter.
    pub c: f64,
    /// Lattice trade-off, set only when `ell = m - delta`.
    pub delta: Option<u32>,
}

impl Params {
    pub fn new(r: impl Into<BigUint>, m: u32, ell: u32, b: u64, c: f64) -> Result<Self> {
        let p = Params {
            r: r.into(),
            m,
            ell,
            b,
            c,
            delta: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters for lattice enumeration with `ell = m - delta`.
    pub fn with_delta(r: impl Into<BigUint>, m: u32, delta: u32, b: u64, c: f64) -> Result<Self> {
        if delta >= m {
            return Err(invalid(format!("delta = {delta} must be < m = {m}")));
        }
        let p = Params {
            r: r.into(),
            m,
            ell: m - delta,
            b,
            c,
            delta: Some(delta),
        };
        p.validate()?;
        Ok(p)
    }

    /// Register length `m + ℓ`.
    pub fn n(&self) -> u32 {
        self.m + self.ell
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(invalid("m must be positive"));
        }
        if self.ell == 0 {
            return Err(invalid("ell must be positive"));
        }
        if self.n() > MAX_REGISTER_BITS {
            return Err(invalid(format!(
                "m + ell = {} exceeds the supported maximum {MAX_REGISTER_BITS}",
                self.n()
            )));
        }
        if self.r < BigUint::from(2u32) {
            return Err(invalid("r must be >= 2"));
        }
        if self.r.bits() > u64::from(self.m) {
            return Err(invalid(format!("2^m > r violated: r has {} bits, m = {}", self.r.bits(), self.m)));
        }
        if !(self.c >= 1.0) || !self.c.is_finite() {
            return Err(invalid(format!("c = {} must be a finite real >= 1", self.c)));
        }
        if let Some(d) = self.delta {
            if d >= self.m || self.ell != self.m - d {
                return Err(invalid(format!("delta = {d} requires ell = m - delta with delta < m")));
            }
        }
        if self.b == 0 {
            return Err(invalid("B must be >= 1"));
        }
        // B < (2^n / r - 1) / 2  <=>  (2B + 1) r < 2^n
        let lhs = BigUint::from(2 * self.b + 1) * &self.r;
        if lhs >= pow2(self.n()) {
            return Err(invalid(format!("B < B_max violated: B = {}", self.b)));
        }
        Ok(())
    }

    /// Checks `2^{m+ℓ} > r²`, required by the continued-fraction and
    /// shortest-vector solvers.
    pub fn validate_unique_recovery(&self) -> Result<()> {
        if &self.r * &self.r >= pow2(self.n()) {
            return Err(invalid("2^(m+ell) > r^2 violated"));
        }
        Ok(())
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        self.validate()?;
        Ok(DerivedParams::compute(&self.r, self.n()))
    }
}

/// Constants derived from `r` and `n = m + ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedParams {
    pub r: BigUint,
    pub n: u32,
    /// `2^n mod r`.
    pub beta: BigUint,
    /// `floor(2^n / r)`.
    pub l: BigUint,
    /// `(2^n / r - 1) / 2`.
    pub b_max: BigRational,
    /// `2^n`.
    pub modulus: BigUint,
}

impl DerivedParams {
    /// Computes the constants without validating a full [`Params`].
    pub fn compute(r: &BigUint, n: u32) -> Self {
        let modulus = pow2(n);
        let (l, beta) = modulus.div_rem(r);
        let ratio = BigRational::new(BigInt::from(modulus.clone()), BigInt::from(r.clone()));
        let b_max = (ratio - BigRational::one()) / BigRational::from_integer(BigInt::from(2));
        DerivedParams {
            r: r.clone(),
            n,
            beta,
            l,
            b_max,
            modulus,
        }
    }
}

/// `2^n` as a big integer.
pub fn pow2(n: u32) -> BigUint {
    BigUint::one() << n
}

/// Rounds to the nearest integer with halves rounded towards `+∞`, so the
/// result minus `f` lies in `(-1/2, 1/2]`.
pub fn round_half_up(f: f64) -> Result<BigInt> {
    if !f.is_finite() {
        return Err(invalid("round_half_up requires a finite value"));
    }
    let fl = f.floor();
    // f - fl is exact for binary floating point
    let v = if f - fl >= 0.5 { fl + 1.0 } else { fl };
    Ok(num_traits::FromPrimitive::from_f64(v).expect("finite"))
}

/// Exact rational variant of [`round_half_up`]: `floor((2·num + den) / (2·den))`.
pub fn round_half_up_ratio(num: &BigInt, den: &BigInt) -> BigInt {
    assert!(den.is_positive(), "denominator must be positive");
    let two = BigInt::from(2);
    (&two * num + den).div_floor(&(&two * den))
}

/// Signed residue `{x}_{2^n}` in `[-2^{n-1}, 2^{n-1})`.
pub fn signed_residue(x: &BigInt, n: u32) -> BigInt {
    let modulus = BigInt::one() << n;
    let half = BigInt::one() << (n - 1);
    let mut v = x.mod_floor(&modulus);
    if v >= half {
        v -= &modulus;
    }
    v
}

/// Converts a big integer to `f64` with correct magnitude for any size that
/// fits in the exponent range.
pub fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Seeded, splittable random stream.
///
/// Streams obtained with [`SimRng::split`] are independent of each other and
/// of the parent; trial `i` of a Monte Carlo run uses `split(i)`.
#[derive(Clone, Debug)]
pub struct SimRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        SimRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream number `stream` derived from this generator's seed.
    pub fn split(&self, stream: u64) -> SimRng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(stream.wrapping_add(1));
        SimRng { seed: self.seed, inner }
    }
}

impl RngCore for SimRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

pub(crate) mod biguint_string {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}
