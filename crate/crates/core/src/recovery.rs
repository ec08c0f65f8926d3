//! Recovering the order `r` from candidates `r̃ = r/d` with `d` `cm`-smooth.
//!
//! A positive integer is `cm`-smooth when no prime power greater than `cm`
//! divides it. All routines work in any [`CyclicGroup`] and count the
//! exponent lengths they use in an [`ExponentMeter`]. Failures are returned
//! as [`RecoveryFailure`] values.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, ceil_log2, ceil_log2_u64, floor_log, FactorLimits};
use crate::error::{invalid, Error, Result};
use crate::group::CyclicGroup;

pub use crate::arith::primes_up_to;

/// The primes `q <= cm` with exponents `e_q = floor(log_q cm)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessContext {
    /// `floor(c·m)`.
    pub bound: u64,
    pub m: u32,
    pub primes: Vec<u64>,
    pub exponents: Vec<u32>,
    prime_powers: Vec<BigUint>,
    e: BigUint,
}

impl SmoothnessContext {
    pub fn new(c: f64, m: u32) -> Result<Self> {
        if !(c >= 1.0) || !c.is_finite() {
            return Err(invalid(format!("c = {c} must be a finite real >= 1")));
        }
        Self::with_bound((c * m as f64).floor() as u64, m)
    }

    /// Context for the integer smoothness bound `cm` directly.
    pub fn with_bound(bound: u64, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(invalid("m must be positive"));
        }
        let primes = primes_up_to(bound);
        let exponents: Vec<u32> = primes.iter().map(|&q| floor_log(q, bound)).collect();
        let prime_powers: Vec<BigUint> = primes
            .iter()
            .zip(&exponents)
            .map(|(&q, &e)| BigUint::from(q).pow(e))
            .collect();
        let e = prime_powers.iter().fold(BigUint::one(), |acc, x| acc * x);
        Ok(SmoothnessContext {
            bound,
            m,
            primes,
            exponents,
            prime_powers,
            e,
        })
    }

    /// `e = Π q^{e_q}`.
    pub fn smooth_exponent(&self) -> &BigUint {
        &self.e
    }

    pub fn prime_power(&self, i: usize) -> &BigUint {
        &self.prime_powers[i]
    }

    /// Whether `d` is `cm`-smooth.
    pub fn is_smooth(&self, d: &BigUint) -> bool {
        let mut rest = d.clone();
        for (i, &q) in self.primes.iter().enumerate() {
            if rest.is_one() {
                break;
            }
            let mut k = 0;
            while (&rest % q).is_zero() {
                rest /= q;
                k += 1;
            }
            if k > self.exponents[i] {
                return false;
            }
        }
        rest.is_one()
    }

    fn in_range(&self, r_tilde: &BigUint) -> bool {
        !r_tilde.is_zero() && r_tilde.bits() <= u64::from(self.m)
    }

    /// `Σ_q ceil(log2 q^{e_q})`, the exponent length of `e` under the
    /// metering convention.
    fn exponent_bits(&self) -> u64 {
        self.prime_powers.iter().map(ceil_log2).sum()
    }
}

/// Running total of exponent lengths.
///
/// An exponent `e` counts as `ceil(log2 e)` bits, the convention under which
/// the worst-case totals below are stated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentMeter {
    pub total_bits: u64,
}

impl ExponentMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pow<G: CyclicGroup>(&mut self, group: &G, x: &G::Element, e: &BigUint) -> G::Element {
        self.total_bits += ceil_log2(e);
        group.pow(x, e)
    }
}

/// Worst-case exponent totals.
pub mod exponent_limits {
    use super::*;

    pub fn multiple(ctx: &SmoothnessContext) -> u64 {
        u64::from(ctx.m) + ceil_log2_u64(ctx.bound) * ctx.primes.len() as u64
    }

    pub fn stack(ctx: &SmoothnessContext) -> u64 {
        let lc = ceil_log2_u64(ctx.bound);
        u64::from(ctx.m)
            + ctx
                .primes
                .iter()
                .zip(&ctx.exponents)
                .map(|(&q, &e)| lc + u64::from(ctx.m) + u64::from(e) * ceil_log2_u64(q))
                .sum::<u64>()
    }

    pub fn tree(ctx: &SmoothnessContext) -> u64 {
        let lc = ceil_log2_u64(ctx.bound);
        u64::from(ctx.m)
            + lc * lc * ctx.primes.len() as u64
            + ctx
                .primes
                .iter()
                .zip(&ctx.exponents)
                .map(|(&q, &e)| u64::from(e) * ceil_log2_u64(q))
                .sum::<u64>()
    }

    pub fn filter(ctx: &SmoothnessContext, candidates: usize) -> u64 {
        ctx.primes.len() as u64 * ceil_log2_u64(ctx.bound) + candidates as u64 * u64::from(ctx.m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryFailure {
    /// The candidate is not in `[1, 2^m)`.
    OutOfRange,
    /// No multiple `d·r̃` with `d` `cm`-smooth annihilates `g`.
    NotSmooth,
}

/// Result of a recovery together with the sequence of intermediate values
/// (`r'` for the multiple search, `d` for the order searches).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recovery {
    pub result: std::result::Result<BigUint, RecoveryFailure>,
    pub trace: Vec<BigUint>,
}

impl Recovery {
    fn fail(f: RecoveryFailure, trace: Vec<BigUint>) -> Self {
        Recovery { result: Err(f), trace }
    }
}

/// Multiplies `r̃` by prime powers `q^{e_q}` in increasing `q` until the
/// result annihilates `g`.
pub fn recover_multiple<G: CyclicGroup>(
    r_tilde: &BigUint,
    group: &G,
    g: &G::Element,
    ctx: &SmoothnessContext,
    meter: &mut ExponentMeter,
) -> Recovery {
    if !ctx.in_range(r_tilde) {
        return Recovery::fail(RecoveryFailure::OutOfRange, vec![]);
    }
    let mut r_prime = r_tilde.clone();
    let mut trace = vec![r_prime.clone()];
    let mut x = meter.pow(group, g, r_tilde);
    for i in 0..ctx.primes.len() {
        if group.is_identity(&x) {
            return Recovery {
                result: Ok(r_prime),
                trace,
            };
        }
        let qe = ctx.prime_power(i);
        x = meter.pow(group, &x, qe);
        r_prime *= qe;
        trace.push(r_prime.clone());
    }
    if !group.is_identity(&x) {
        return Recovery::fail(RecoveryFailure::NotSmooth, trace);
    }
    Recovery {
        result: Ok(r_prime),
        trace,
    }
}

/// Recovers `r = d·r̃` with a stack of partial powers and backtracking.
pub fn recover_order_stack<G: CyclicGroup>(
    r_tilde: &BigUint,
    group: &G,
    g: &G::Element,
    ctx: &SmoothnessContext,
    meter: &mut ExponentMeter,
) -> Recovery {
    if !ctx.in_range(r_tilde) {
        return Recovery::fail(RecoveryFailure::OutOfRange, vec![]);
    }
    let mut x = meter.pow(group, g, r_tilde);
    if group.is_identity(&x) {
        return Recovery {
            result: Ok(r_tilde.clone()),
            trace: vec![BigUint::one()],
        };
    }
    let mut stack = Vec::new();
    for i in 0..ctx.primes.len() {
        stack.push((x.clone(), ctx.primes[i], ctx.exponents[i]));
        x = meter.pow(group, &x, ctx.prime_power(i));
        if group.is_identity(&x) {
            break;
        }
    }
    if !group.is_identity(&x) {
        return Recovery::fail(RecoveryFailure::NotSmooth, vec![]);
    }
    let mut d = BigUint::one();
    let mut trace = vec![d.clone()];
    while let Some((x0, q, e)) = stack.pop() {
        let mut x = meter.pow(group, &x0, &d);
        let q = BigUint::from(q);
        for _ in 0..e {
            if group.is_identity(&x) {
                break;
            }
            x = meter.pow(group, &x, &q);
            d *= &q;
            trace.push(d.clone());
        }
    }
    Recovery {
        result: Ok(d * r_tilde),
        trace,
    }
}

/// Recovers `r = d·r̃` by splitting the prime set in a binary tree so each
/// prime's contribution is isolated with few exponentiations.
pub fn recover_order_tree<G: CyclicGroup>(
    r_tilde: &BigUint,
    group: &G,
    g: &G::Element,
    ctx: &SmoothnessContext,
    meter: &mut ExponentMeter,
) -> Recovery {
    if !ctx.in_range(r_tilde) {
        return Recovery::fail(RecoveryFailure::OutOfRange, vec![]);
    }
    let x = meter.pow(group, g, r_tilde);
    let mut d = BigUint::one();
    let mut trace = vec![d.clone()];
    if ctx.primes.is_empty() {
        return if group.is_identity(&x) {
            Recovery {
                result: Ok(r_tilde.clone()),
                trace,
            }
        } else {
            Recovery::fail(RecoveryFailure::NotSmooth, trace)
        };
    }
    let indices: Vec<usize> = (0..ctx.primes.len()).collect();
    let mut leaves = Vec::with_capacity(indices.len());
    split(group, ctx, x, &indices, meter, &mut leaves);
    for (i, mut xi) in leaves {
        let q = BigUint::from(ctx.primes[i]);
        let e_max = ctx.exponents[i];
        let mut e = 0;
        while !group.is_identity(&xi) {
            if e == e_max {
                return Recovery::fail(RecoveryFailure::NotSmooth, trace);
            }
            xi = meter.pow(group, &xi, &q);
            d *= &q;
            e += 1;
            trace.push(d.clone());
        }
    }
    Recovery {
        result: Ok(d * r_tilde),
        trace,
    }
}

fn split<G: CyclicGroup>(
    group: &G,
    ctx: &SmoothnessContext,
    x: G::Element,
    primes: &[usize],
    meter: &mut ExponentMeter,
    out: &mut Vec<(usize, G::Element)>,
) {
    if primes.len() == 1 {
        out.push((primes[0], x));
        return;
    }
    let (left, right) = primes.split_at(primes.len() / 2);
    let product = |set: &[usize]| set.iter().fold(BigUint::one(), |acc, &i| acc * ctx.prime_power(i));
    let x_left = meter.pow(group, &x, &product(right));
    let x_right = meter.pow(group, &x, &product(left));
    split(group, ctx, x_left, left, meter, out);
    split(group, ctx, x_right, right, meter, out);
}

/// Streaming candidate filter with a known multiple `μ` of `r`.
///
/// A candidate `r̃` in `[1, 2^m)` is accepted when `x^{r̃} = 1` for
/// `x = g^e`; once `μ != 0` the test uses `x^{gcd(r̃, μ)}`, which is
/// equivalent. Accepted candidates and dismissed reduced exponents are cached.
#[derive(Clone, Debug)]
pub struct FilterState<G: CyclicGroup> {
    pub mu: BigUint,
    pub x: G::Element,
    pub use_mu: bool,
    accepted: HashSet<BigUint>,
    dismissed: HashSet<BigUint>,
}

impl<G: CyclicGroup> FilterState<G> {
    pub fn new(group: &G, g: &G::Element, ctx: &SmoothnessContext, meter: &mut ExponentMeter) -> Self {
        let x = group.pow(g, ctx.smooth_exponent());
        meter.total_bits += ctx.exponent_bits();
        FilterState {
            mu: BigUint::zero(),
            x,
            use_mu: true,
            accepted: HashSet::new(),
            dismissed: HashSet::new(),
        }
    }

    /// The same filter without the `μ` shortcut.
    pub fn without_mu(mut self) -> Self {
        self.use_mu = false;
        self
    }

    pub fn test(&mut self, group: &G, r_tilde: &BigUint, ctx: &SmoothnessContext, meter: &mut ExponentMeter) -> bool {
        if !ctx.in_range(r_tilde) {
            return false;
        }
        if self.accepted.contains(r_tilde) {
            return true;
        }
        let y = if self.use_mu && !self.mu.is_zero() {
            r_tilde.gcd(&self.mu)
        } else {
            r_tilde.clone()
        };
        if self.dismissed.contains(&y) {
            return false;
        }
        if group.is_identity(&meter.pow(group, &self.x, &y)) {
            self.accepted.insert(r_tilde.clone());
            if self.use_mu {
                let multiple = r_tilde * ctx.smooth_exponent();
                self.mu = if self.mu.is_zero() { multiple } else { multiple.gcd(&self.mu) };
            }
            true
        } else {
            self.dismissed.insert(y);
            false
        }
    }
}

/// Candidates `r̃ ∈ S` in range with `x^{r̃} = 1`, in input order.
pub fn filter_candidates<G: CyclicGroup>(
    candidates: &[BigUint],
    group: &G,
    ctx: &SmoothnessContext,
    state: &mut FilterState<G>,
    meter: &mut ExponentMeter,
) -> Vec<BigUint> {
    candidates
        .iter()
        .filter(|c| state.test(group, c, ctx, meter))
        .cloned()
        .collect()
}

/// Choice of order-recovery routine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Stack,
    Tree,
}

pub fn recover_order<G: CyclicGroup>(
    algorithm: Algorithm,
    r_tilde: &BigUint,
    group: &G,
    g: &G::Element,
    ctx: &SmoothnessContext,
    meter: &mut ExponentMeter,
) -> Recovery {
    match algorithm {
        Algorithm::Stack => recover_order_stack(r_tilde, group, g, ctx, meter),
        Algorithm::Tree => recover_order_tree(r_tilde, group, g, ctx, meter),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSolution {
    pub survivors: Vec<BigUint>,
    /// Minimum over the values recovered from the survivors.
    pub recovered: Option<BigUint>,
}

/// Filters `S`, recovers an order from each survivor and returns the minimum.
pub fn solve_candidate_set<G: CyclicGroup>(
    candidates: &[BigUint],
    group: &G,
    g: &G::Element,
    ctx: &SmoothnessContext,
    algorithm: Algorithm,
    meter: &mut ExponentMeter,
) -> CandidateSolution {
    let mut state = FilterState::new(group, g, ctx, meter);
    let mut unique = Vec::new();
    let mut seen = HashSet::new();
    for c in candidates {
        if seen.insert(c.clone()) {
            unique.push(c.clone());
        }
    }
    let survivors = filter_candidates(&unique, group, ctx, &mut state, meter);
    let recovered = survivors
        .iter()
        .filter_map(|c| recover_order(algorithm, c, group, g, ctx, meter).result.ok())
        .min();
    CandidateSolution { survivors, recovered }
}

/// Divides primes `q <= prime_bound` out of `r'` while `g^{r'/q} = 1`.
///
/// A heuristic shortcut: the result is still a multiple of the order, but the
/// success bounds do not account for it.
pub fn smooth_part_division<G: CyclicGroup>(
    r_prime: &BigUint,
    group: &G,
    g: &G::Element,
    prime_bound: u64,
    meter: &mut ExponentMeter,
) -> BigUint {
    let mut r = r_prime.clone();
    for q in primes_up_to(prime_bound) {
        while (&r % q).is_zero() {
            let reduced = &r / q;
            if group.is_identity(&meter.pow(group, g, &reduced)) {
                r = reduced;
            } else {
                break;
            }
        }
    }
    r
}

/// Whether `r` is exactly the order of `g`, given `g^r = 1`.
///
/// Factors `r` completely, checks the factorization (product, distinct
/// primes, primality) and tests `g^{r/q} != 1` for each prime `q | r`.
pub fn verify_order<G: CyclicGroup>(r: &BigUint, group: &G, g: &G::Element, limits: FactorLimits) -> Result<bool> {
    if r.is_zero() || !group.is_identity(&group.pow(g, r)) {
        return Err(Error::Precondition(format!("g^{r} is not the identity")));
    }
    let factors = arith::factorize(r, limits)?;
    let product = factors.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
    let distinct = factors.windows(2).all(|w| w[0].0 < w[1].0);
    let primes = factors.iter().all(|(p, _)| arith::is_probable_prime(p));
    if &product != r || !distinct || !primes {
        return Err(Error::Precondition("factorization of the candidate is incomplete".into()));
    }
    Ok(factors.iter().all(|(q, _)| !group.is_identity(&group.pow(g, &(r / q)))))
}
