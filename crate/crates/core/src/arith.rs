//! Desk-scale number theory: sieve, primality, factoring, perfect powers.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Primes `<= bound` in ascending order.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut k = i.saturating_mul(i);
            while k <= n {
                composite[k] = true;
                k += i;
            }
        }
    }
    out
}

/// `ceil(log2 x)` for `x >= 1`, defined as `0` for `x <= 1`.
pub fn ceil_log2(x: &BigUint) -> u64 {
    if x <= &BigUint::one() {
        0
    } else {
        (x - 1u32).bits()
    }
}

pub fn ceil_log2_u64(x: u64) -> u64 {
    ceil_log2(&BigUint::from(x))
}

/// Largest `e` with `q^e <= bound`.
pub fn floor_log(q: u64, bound: u64) -> u32 {
    let mut e = 0;
    let mut p: u128 = 1;
    while p * q as u128 <= bound as u128 {
        p *= q as u128;
        e += 1;
    }
    e
}

pub fn mod_inverse(a: &BigUint, n: &BigUint) -> Option<BigUint> {
    let a = BigInt::from(a % n);
    let n = BigInt::from(n.clone());
    let e = a.extended_gcd(&n);
    if !e.gcd.is_one() {
        return None;
    }
    e.x.mod_floor(&n).to_biguint()
}

const SMALL_PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller-Rabin with 64 rounds.
///
/// The first twelve rounds use the prime bases that make the test exact below
/// `3.3·10^24`; the remaining rounds use bases from a generator seeded by the
/// input, so the answer is deterministic.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let witness = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n1 {
            return false;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                return false;
            }
        }
        true
    };
    for &p in &SMALL_PRIMES {
        if witness(&BigUint::from(p)) {
            return false;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d69_6c6c_6572 ^ n.iter_u64_digits().next().unwrap_or(0));
    for _ in SMALL_PRIMES.len()..64 {
        let a = rng.gen_biguint_range(&two, &n1);
        if witness(&a) {
            return false;
        }
    }
    true
}

/// Detects `n = b^k` with `k >= 2`, returning the smallest base.
pub fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    if n < &BigUint::from(4u32) {
        return None;
    }
    let max_k = n.bits() as u32;
    let mut best = None;
    for k in 2..=max_k {
        let b = n.nth_root(k);
        if b < BigUint::from(2u32) {
            break;
        }
        if b.pow(k) == *n {
            best = Some((b, k));
        }
    }
    best
}

/// Limits for [`factorize`].
#[derive(Clone, Copy, Debug)]
pub struct FactorLimits {
    pub trial_bound: u64,
    pub rho_iterations: u64,
}

impl Default for FactorLimits {
    fn default() -> Self {
        FactorLimits {
            trial_bound: 1_000_000,
            rho_iterations: 1 << 22,
        }
    }
}

/// Complete factorization as sorted `(prime, exponent)` pairs.
///
/// Trial division to `limits.trial_bound`, then Brent's rho on the cofactor.
/// Every reported factor is checked with [`is_probable_prime`] and the product
/// is checked against `n`.
pub fn factorize(n: &BigUint, limits: FactorLimits) -> Result<Vec<(BigUint, u32)>> {
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    if n.is_zero() {
        return Err(Error::Precondition("cannot factor 0".into()));
    }
    let mut rest = n.clone();
    let push = |p: BigUint, out: &mut Vec<(BigUint, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some(e) => e.1 += 1,
        None => out.push((p, 1)),
    };
    let mut p = 2u64;
    while p <= limits.trial_bound {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            push(pb.clone(), &mut out);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![rest];
    let mut budget = limits.rho_iterations;
    while let Some(f) = stack.pop() {
        if f.is_one() {
            continue;
        }
        if is_probable_prime(&f) {
            push(f, &mut out);
            continue;
        }
        if let Some((b, k)) = perfect_power(&f) {
            for _ in 0..k {
                stack.push(b.clone());
            }
            continue;
        }
        let d = brent_rho(&f, &mut budget).ok_or_else(|| Error::FactorizationTimeout(n.to_string()))?;
        stack.push(&f / &d);
        stack.push(d);
    }
    out.sort();
    let product = out.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
    debug_assert_eq!(&product, n);
    if &product != n {
        return Err(Error::Precondition("factorization product check failed".into()));
    }
    Ok(out)
}

/// Brent's variant of Pollard rho. Returns a nontrivial factor of composite
/// odd `n`, or `None` once `budget` iterations are spent.
fn brent_rho(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        const M: u64 = 128;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let steps = M.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                *budget = budget.checked_sub(steps)?;
                g = q.gcd(n);
                k += M;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
        c += 1u32;
    }
}

pub fn lcm_all<'a>(values: impl IntoIterator<Item = &'a BigUint>) -> BigUint {
    values.into_iter().fold(BigUint::one(), |acc, v| acc.lcm(v))
}

/// Carmichael function from a factorization of an odd integer.
pub fn carmichael(factors: &[(BigUint, u32)]) -> BigUint {
    let parts: Vec<BigUint> = factors
        .iter()
        .map(|(p, e)| (p - 1u32) * p.pow(e - 1))
        .collect();
    lcm_all(parts.iter())
}

/// Multiplicative order of `g` modulo `n`, given the factorization of `n`.
pub fn multiplicative_order(g: &BigUint, n: &BigUint, factors: &[(BigUint, u32)]) -> Result<BigUint> {
    let lambda = carmichael(factors);
    let lf = factorize(&lambda, FactorLimits::default())?;
    let mut order = lambda;
    for (q, e) in lf {
        for _ in 0..e {
            let cand = &order / &q;
            if g.modpow(&cand, n).is_one() {
                order = cand;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

pub fn to_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve() {
        assert_eq!(primes_up_to(4), vec![2, 3]);
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_up_to(1_000_000).len(), 78498);
        assert!(primes_up_to(1).is_empty());
    }

    #[test]
    fn logs() {
        assert_eq!(ceil_log2_u64(1), 0);
        assert_eq!(ceil_log2_u64(2), 1);
        assert_eq!(ceil_log2_u64(3), 2);
        assert_eq!(ceil_log2_u64(4), 2);
        assert_eq!(ceil_log2_u64(5), 3);
        assert_eq!(floor_log(2, 4), 2);
        assert_eq!(floor_log(3, 4), 1);
        assert_eq!(floor_log(5, 4), 0);
    }

    #[test]
    fn primality_and_powers() {
        let primes = primes_up_to(2000);
        for n in 0..2000u64 {
            assert_eq!(is_probable_prime(&n.into()), primes.binary_search(&n).is_ok(), "{n}");
        }
        let m127 = (BigUint::one() << 127) - 1u32;
        assert!(is_probable_prime(&m127));
        assert!(!is_probable_prime(&(&m127 * &m127)));
        // Carmichael number
        assert!(!is_probable_prime(&561u32.into()));
        assert_eq!(perfect_power(&27u32.into()), Some((3u32.into(), 3)));
        assert_eq!(perfect_power(&64u32.into()), Some((2u32.into(), 6)));
        assert_eq!(perfect_power(&15u32.into()), None);
    }

    #[test]
    fn factorization() {
        let n = BigUint::from(2u32).pow(5) * 3u32 * 1_000_003u64 * 1_000_033u64;
        let f = factorize(&n, FactorLimits::default()).unwrap();
        assert_eq!(
            f,
            vec![
                (2u32.into(), 5),
                (3u32.into(), 1),
                (1_000_003u64.into(), 1),
                (1_000_033u64.into(), 1)
            ]
        );
        let tiny = FactorLimits {
            trial_bound: 10,
            rho_iterations: 1,
        };
        let hard = BigUint::from(1_000_003u64) * 1_000_033u64;
        assert!(matches!(factorize(&hard, tiny), Err(Error::FactorizationTimeout(_))));
    }

    #[test]
    fn carmichael_and_order() {
        let f15 = factorize(&15u32.into(), FactorLimits::default()).unwrap();
        assert_eq!(carmichael(&f15), BigUint::from(4u32));
        let f105 = factorize(&105u32.into(), FactorLimits::default()).unwrap();
        assert_eq!(carmichael(&f105), BigUint::from(12u32));
        assert_eq!(
            multiplicative_order(&2u32.into(), &15u32.into(), &f15).unwrap(),
            BigUint::from(4u32)
        );
        assert_eq!(mod_inverse(&2u32.into(), &15u32.into()), Some(8u32.into()));
    }
}
