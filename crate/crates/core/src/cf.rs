//! Continued-fraction post-processing.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::model::pow2;

/// A convergent `p/q` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigUint,
    pub q: BigUint,
}

/// All convergents of `num/den`, ending with `num/den` in lowest terms.
pub fn cf_expand(num: &BigUint, den: &BigUint) -> Result<Vec<Convergent>> {
    if den.is_zero() {
        return Err(invalid("denominator must be nonzero"));
    }
    if num >= den {
        return Err(invalid("expansion requires 0 <= num < den"));
    }
    let (mut p_prev, mut q_prev) = (BigUint::one(), BigUint::zero());
    let (mut p, mut q) = (BigUint::zero(), BigUint::one());
    let mut out = vec![Convergent {
        p: p.clone(),
        q: q.clone(),
    }];
    let (mut a, mut b) = (den.clone(), num.clone());
    // num/den = [0; a1, a2, ...]
    while !b.is_zero() {
        let (k, rem) = a.div_rem(&b);
        let p_next = &k * &p + &p_prev;
        let q_next = &k * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push(Convergent {
            p: p.clone(),
            q: q.clone(),
        });
        a = std::mem::replace(&mut b, rem);
    }
    Ok(out)
}

/// `q < 2^{n/2}`, compared exactly as `q² < 2^n` so odd `n` needs no
/// irrational threshold.
fn below_sqrt(q: &BigUint, n: u32) -> bool {
    q * q < pow2(n)
}

/// Denominator of the last convergent of `j/2^n` with `q < 2^{n/2}`.
pub fn solve_cf(j: &BigUint, n: u32) -> BigUint {
    let modulus = pow2(n);
    let j = j % &modulus;
    let convergents = cf_expand(&j, &modulus).expect("0 <= j < 2^n");
    convergents
        .into_iter()
        .take_while(|c| below_sqrt(&c.q, n))
        .last()
        .map(|c| c.q)
        .unwrap_or_else(BigUint::one)
}

/// Whether `|j/2^n - z/r| < 1/(2r²)`, the condition under which `z/r` in
/// lowest terms appears among the convergents of `j/2^n`.
pub fn convergent_admissibility(j: &BigUint, n: u32, z: &BigUint, r: &BigUint) -> bool {
    use num_bigint::BigInt;
    // |j r - z 2^n| · 2 r < 2^n
    let diff = BigInt::from(j * r) - BigInt::from(z << n);
    let lhs = diff.magnitude() * 2u32 * r;
    lhs < pow2(n)
}
