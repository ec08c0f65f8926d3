//! Complete factorization of `N` from one order-finding run.
//!
//! The order of a random `g ∈ ℤ_N^*` is found by a simulated run; the
//! measurement is drawn from the exact distribution for the true order,
//! which is computed classically. The recovered order is then padded with
//! small prime powers and used to split `N` by the usual square-root-of-one
//! method, repeated `k` times.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_probable_prime, multiplicative_order, perfect_power, primes_up_to, FactorLimits};
use crate::bounds::factoring_ell;
use crate::distribution::{Measurement, DEFAULT_T_MAX};
use crate::error::{invalid, Error, Result};
use crate::group::{CyclicGroup, ModNGroup};
use crate::model::SimRng;
use crate::recovery::{Algorithm, SmoothnessContext};

use super::{run_once, RunConfig, Strategy};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorConfig {
    pub strategy: Strategy,
    pub recovery: Algorithm,
    pub b: u64,
    pub c: f64,
    /// Splitting iterations.
    pub k: u32,
    /// Small primes `q <= sigma·l` pad the recovered order.
    pub sigma: f64,
    /// Padding length; `None` selects the least `ℓ` with `2^{m+ℓ} >= N²/4`.
    /// Ignored by `lattice_enumerate`, which uses `ℓ = m - Δ`.
    pub ell: Option<u32>,
    pub t_max: u64,
    pub seed: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            strategy: Strategy::Cf,
            recovery: Algorithm::Stack,
            b: 10,
            c: 4.0,
            k: 20,
            sigma: 1.0,
            ell: None,
            t_max: DEFAULT_T_MAX,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorOutcome {
    /// Sorted `(prime, exponent)` pairs with product `N`.
    pub factors: Vec<(BigUint, u32)>,
    /// Order of the chosen `g`.
    pub order: BigUint,
    /// Iterations of the splitting loop actually used.
    pub iterations: u32,
}

/// Rejects even, prime and perfect-power `N` with a hint on how to reduce it.
fn check_modulus(n: &BigUint) -> Result<()> {
    if n.is_even() {
        return Err(Error::EvenModulus(format!("N = {n} is even; divide out powers of two first")));
    }
    if n <= &BigUint::from(3u32) {
        return Err(invalid(format!("N = {n} is too small")));
    }
    if is_probable_prime(n) {
        return Err(Error::PrimeModulus(format!("N = {n} is (probably) prime")));
    }
    if let Some((base, k)) = perfect_power(n) {
        return Err(Error::PerfectPower(n.to_string(), base.to_string(), k));
    }
    Ok(())
}

/// Factors `N` completely with one simulated order-finding run.
pub fn factor_completely(n: &BigUint, config: &FactorConfig) -> Result<FactorOutcome> {
    check_modulus(n)?;
    if config.k == 0 {
        return Err(invalid("k must be >= 1"));
    }
    if !(config.sigma >= 1.0) {
        return Err(invalid("sigma must be >= 1"));
    }
    let l = n.bits() as u32;
    let m = l - 1;
    let ell = match config.strategy {
        Strategy::LatticeEnumerate { delta } => {
            if delta >= m {
                return Err(invalid(format!("delta = {delta} must be < m = {m}")));
            }
            m - delta
        }
        _ => config.ell.unwrap_or_else(|| factoring_ell(n)),
    };
    let mut rng = SimRng::new(config.seed);
    let group = ModNGroup::new(n.clone())?;
    let g = group.random_element(&mut rng);

    // the quantum step: only the order is needed to simulate the measurement
    let n_factors = factorize(n, FactorLimits::default())?;
    let order = multiplicative_order(&g, n, &n_factors)?;
    let recovered = if order.is_one() {
        order.clone()
    } else {
        // keep 2B + 1 < 2^ℓ so that B < B_max for every r < 2^m
        let b_cap = if ell >= 64 { u64::MAX / 4 } else { (1u64 << (ell - 1)).saturating_sub(1) };
        let b = config.b.min(b_cap);
        if b == 0 {
            return Err(invalid(format!("ell = {ell} leaves no room for B >= 1")));
        }
        let mut run = RunConfig::new(m, ell, b, config.c);
        run.strategy = config.strategy;
        run.recovery = config.recovery;
        run.t_max = config.t_max;
        let params = run.params(&order)?;
        let measurement = Measurement::new(&params)?;
        let ctx = SmoothnessContext::new(config.c, m)?;
        let rec = run_once(&group, &g, &measurement, &run, &ctx, &mut rng);
        match rec.recovered {
            Some(r) => r,
            None => {
                return Err(Error::RecoveryFailed(format!(
                    "order finding failed: {:?}",
                    rec.failure.expect("failure reason")
                )))
            }
        }
    };
    split_with_order(n, &recovered, l, config, &mut rng).map(|(factors, iterations)| FactorOutcome {
        factors,
        order,
        iterations,
    })
}

/// Splits `N` given a multiple of the order of one element.
fn split_with_order(
    n: &BigUint,
    r: &BigUint,
    l: u32,
    config: &FactorConfig,
    rng: &mut SimRng,
) -> Result<(Vec<(BigUint, u32)>, u32)> {
    // pad with q^η, η largest with q^η <= N
    let mut multiple = r.clone();
    for q in primes_up_to((config.sigma * l as f64).floor() as u64) {
        let q = BigUint::from(q);
        let mut qe = q.clone();
        while &qe * &q <= *n {
            qe *= &q;
        }
        multiple *= qe;
    }
    let t = multiple.trailing_zeros().unwrap_or(0);
    let odd = &multiple >> t;
    let mut parts = vec![n.clone()];
    let one = BigUint::one();
    for iteration in 1..=config.k {
        let x = rng.gen_biguint_range(&BigUint::from(2u32), n);
        let d = x.gcd(n);
        if !d.is_one() {
            refine(&mut parts, &d);
        } else {
            let mut y = x.modpow(&odd, n);
            for _ in 0..=t {
                if y == one {
                    break;
                }
                let d = (&y - &one).gcd(n);
                if !d.is_one() && &d != n {
                    refine(&mut parts, &d);
                }
                y = y.modpow(&BigUint::from(2u32), n);
            }
        }
        if let Some(done) = complete(&parts, n) {
            return Ok((done, iteration));
        }
    }
    Err(Error::IncompleteFactorization {
        iterations: config.k,
        factors: parts.iter().map(|p| p.to_string()).collect(),
    })
}

/// Replaces the pairwise coprime parts of `N` by their refinement against `d`.
fn refine(parts: &mut Vec<BigUint>, d: &BigUint) {
    let mut pending: Vec<BigUint> = Vec::new();
    for p in parts.drain(..) {
        let g = p.gcd(d);
        if g.is_one() || g == p {
            pending.push(p);
        } else {
            let rest = &p / &g;
            pending.push(g);
            pending.push(rest);
        }
    }
    *parts = coprime_base(pending);
}

/// Refines `items` into distinct pairwise coprime factors.
fn coprime_base(mut items: Vec<BigUint>) -> Vec<BigUint> {
    let one = BigUint::one();
    'restart: loop {
        items.retain(|x| x != &one);
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                let g = items[i].gcd(&items[j]);
                if g.is_one() || items[i] == items[j] {
                    continue;
                }
                let (a, b) = (&items[i] / &g, &items[j] / &g);
                let mut next: Vec<BigUint> = items
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, x)| x.clone())
                    .collect();
                next.extend([g.clone(), g, a, b]);
                items = next;
                continue 'restart;
            }
        }
        break;
    }
    items.sort();
    items.dedup();
    items
}

/// The factorization once every part reduces to a prime power.
fn complete(parts: &[BigUint], n: &BigUint) -> Option<Vec<(BigUint, u32)>> {
    let mut primes = Vec::new();
    for p in parts {
        let (base, _) = perfect_power(p).unwrap_or((p.clone(), 1));
        if !is_probable_prime(&base) {
            return None;
        }
        primes.push(base);
    }
    primes.sort();
    primes.dedup();
    let mut rest = n.clone();
    let mut out = Vec::new();
    for q in primes {
        let mut e = 0;
        while (&rest % &q).bits() == 0 {
            rest /= &q;
            e += 1;
        }
        out.push((q, e));
    }
    if rest.is_one() {
        Some(out)
    } else {
        None
    }
}
