//! Finite cyclic groups used by the classical post-processing.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::arith;
use crate::error::{invalid, Error, Result};

/// A group supporting exponentiation by arbitrary non-negative integers.
pub trait CyclicGroup: Sync {
    type Element: Clone + Debug + Eq + Hash + Send + Sync;

    fn identity(&self) -> Self::Element;
    fn is_identity(&self, x: &Self::Element) -> bool;
    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn inverse(&self, a: &Self::Element) -> Self::Element;
    fn pow(&self, x: &Self::Element, e: &BigUint) -> Self::Element;
    fn random_element(&self, rng: &mut dyn RngCore) -> Self::Element;
}

/// Cyclic group of known order `r`; elements are exponents of a fixed
/// generator reduced mod `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulatedGroup {
    order: BigUint,
}

impl SimulatedGroup {
    pub fn new(order: BigUint) -> Result<Self> {
        if order.is_zero() {
            return Err(invalid("group order must be positive"));
        }
        Ok(SimulatedGroup { order })
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// The generator (exponent 1).
    pub fn generator(&self) -> BigUint {
        BigUint::one() % &self.order
    }

    /// Element with the given exponent.
    pub fn element(&self, exponent: &BigUint) -> BigUint {
        exponent % &self.order
    }

    /// True order of `g`: `r / gcd(r, exponent)`.
    pub fn element_order(&self, g: &BigUint) -> BigUint {
        if g.is_zero() {
            return BigUint::one();
        }
        &self.order / self.order.gcd(g)
    }
}

impl CyclicGroup for SimulatedGroup {
    type Element = BigUint;

    fn identity(&self) -> BigUint {
        BigUint::zero()
    }
    fn is_identity(&self, x: &BigUint) -> bool {
        x.is_zero()
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.order
    }
    fn inverse(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            a.clone()
        } else {
            &self.order - a
        }
    }
    fn pow(&self, x: &BigUint, e: &BigUint) -> BigUint {
        (x * (e % &self.order)) % &self.order
    }
    fn random_element(&self, rng: &mut dyn RngCore) -> BigUint {
        rng.gen_biguint_below(&self.order)
    }
}

/// The multiplicative group of integers modulo an odd composite `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModNGroup {
    modulus: BigUint,
}

impl ModNGroup {
    /// Accepts odd `N > 3` that is not a perfect power.
    pub fn new(modulus: BigUint) -> Result<Self> {
        if modulus <= BigUint::from(3u32) {
            return Err(invalid("modulus must be > 3"));
        }
        if modulus.is_even() {
            return Err(Error::EvenModulus(format!(
                "{modulus}; split off the factor 2 classically first"
            )));
        }
        if let Some((base, k)) = arith::perfect_power(&modulus) {
            return Err(Error::PerfectPower(modulus.to_string(), base.to_string(), k));
        }
        Ok(ModNGroup { modulus })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Residue as group element; fails unless coprime to `N`.
    pub fn element(&self, x: &BigUint) -> Result<BigUint> {
        let x = x % &self.modulus;
        if !x.gcd(&self.modulus).is_one() {
            return Err(invalid(format!("{x} is not a unit modulo {}", self.modulus)));
        }
        Ok(x)
    }
}

impl CyclicGroup for ModNGroup {
    type Element = BigUint;

    fn identity(&self) -> BigUint {
        BigUint::one()
    }
    fn is_identity(&self, x: &BigUint) -> bool {
        x.is_one()
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.modulus
    }
    fn inverse(&self, a: &BigUint) -> BigUint {
        arith::mod_inverse(a, &self.modulus).expect("group elements are units")
    }
    fn pow(&self, x: &BigUint, e: &BigUint) -> BigUint {
        x.modpow(e, &self.modulus)
    }
    fn random_element(&self, rng: &mut dyn RngCore) -> BigUint {
        loop {
            let x = rng.gen_biguint_range(&BigUint::one(), &self.modulus);
            if x.gcd(&self.modulus).is_one() {
                return x;
            }
        }
    }
}
