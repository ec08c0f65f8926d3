//! Lattice post-processing in the two-dimensional lattice spanned by
//! `(j, 1/2)` and `(2^n, 0)`.
//!
//! Vectors are stored with the second coordinate doubled so that all
//! arithmetic is on integers: `(w1, w2)` is kept as `(w1, 2·w2)`. Squared norms
//! and inner products are kept scaled by four.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::group::CyclicGroup;
use crate::model::round_half_up_ratio;

/// Lattice vector `(w1, w2)` stored as `(w1, 2·w2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeVector {
    pub w1: BigInt,
    pub w2x2: BigInt,
}

impl LatticeVector {
    pub fn new(w1: BigInt, w2x2: BigInt) -> Self {
        LatticeVector { w1, w2x2 }
    }

    /// `4·|w|²`.
    pub fn norm4(&self) -> BigInt {
        BigInt::from(4) * &self.w1 * &self.w1 + &self.w2x2 * &self.w2x2
    }

    /// `4·<u, v>`.
    pub fn dot4(&self, v: &LatticeVector) -> BigInt {
        BigInt::from(4) * &self.w1 * &v.w1 + &self.w2x2 * &v.w2x2
    }

    fn sub_mul(&self, k: &BigInt, v: &LatticeVector) -> LatticeVector {
        LatticeVector {
            w1: &self.w1 - k * &v.w1,
            w2x2: &self.w2x2 - k * &v.w2x2,
        }
    }

    fn combine(a: &BigInt, u: &LatticeVector, b: &BigInt, v: &LatticeVector) -> LatticeVector {
        LatticeVector {
            w1: a * &u.w1 + b * &v.w1,
            w2x2: a * &u.w2x2 + b * &v.w2x2,
        }
    }

    /// The candidate `2·|w2|`.
    pub fn candidate(&self) -> BigUint {
        self.w2x2.magnitude().clone()
    }
}

/// Output of Lagrange reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedBasis {
    pub s1: LatticeVector,
    pub s2: LatticeVector,
    /// Rows express `s1`, `s2` in the basis `(j, 1/2)`, `(2^n, 0)`.
    pub nu: [[BigInt; 2]; 2],
    /// Size-reduction steps performed.
    pub steps: u64,
}

impl ReducedBasis {
    /// Doubled determinant `|s1.w1·s2.w2x2 - s1.w2x2·s2.w1|`; equals `2^n`.
    pub fn det2(&self) -> BigUint {
        (&self.s1.w1 * &self.s2.w2x2 - &self.s1.w2x2 * &self.s2.w1)
            .magnitude()
            .clone()
    }

    /// `|μ| <= 1/2` with `μ = <s1, s2> / <s1, s1>`.
    pub fn is_size_reduced(&self) -> bool {
        BigInt::from(2) * self.s1.dot4(&self.s2).abs() <= self.s1.norm4()
    }

    pub fn lambda1_sq(&self) -> f64 {
        self.s1.norm4().to_f64().unwrap() / 4.0
    }
}

fn basis(j: &BigInt, n: u32) -> (LatticeVector, LatticeVector) {
    (
        LatticeVector::new(j.clone(), BigInt::one()),
        LatticeVector::new(BigInt::one() << n, BigInt::zero()),
    )
}

fn reduce(mut u: LatticeVector, mut v: LatticeVector, nu: [[BigInt; 2]; 2]) -> ReducedBasis {
    let [mut nu_u, mut nu_v] = nu;
    if u.norm4() > v.norm4() {
        std::mem::swap(&mut u, &mut v);
        std::mem::swap(&mut nu_u, &mut nu_v);
    }
    let mut steps = 0;
    loop {
        let mu = round_half_up_ratio(&u.dot4(&v), &u.norm4());
        if !mu.is_zero() {
            v = v.sub_mul(&mu, &u);
            nu_v = [&nu_v[0] - &mu * &nu_u[0], &nu_v[1] - &mu * &nu_u[1]];
        }
        steps += 1;
        if v.norm4() < u.norm4() {
            std::mem::swap(&mut u, &mut v);
            std::mem::swap(&mut nu_u, &mut nu_v);
        } else {
            break;
        }
    }
    ReducedBasis {
        s1: u,
        s2: v,
        nu: [nu_u, nu_v],
        steps,
    }
}

fn identity_nu() -> [[BigInt; 2]; 2] {
    [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]]
}

/// Lagrange-reduced basis of the lattice for frequency `j`.
pub fn lagrange_reduce(j: &BigUint, n: u32) -> ReducedBasis {
    let (b1, b2) = basis(&BigInt::from(j.clone()), n);
    reduce(b1, b2, identity_nu())
}

/// Candidate from the shortest vector: `2·|w2|` of `s1`.
pub fn solve_shortest(j: &BigUint, n: u32) -> BigUint {
    let c = lagrange_reduce(j, n).s1.candidate();
    if c.is_zero() {
        BigUint::one()
    } else {
        c
    }
}

/// Reductions for `j - B, …, j + B`, each seeded from its neighbour's row
/// multiples.
pub fn reduce_offset_range(j: &BigUint, b: u64, n: u32) -> Vec<ReducedBasis> {
    let j = BigInt::from(j.clone());
    let center = {
        let (b1, b2) = basis(&j, n);
        reduce(b1, b2, identity_nu())
    };
    let seeded = |from: &ReducedBasis, jj: &BigInt| {
        let (b1, b2) = basis(jj, n);
        let u = LatticeVector::combine(&from.nu[0][0], &b1, &from.nu[0][1], &b2);
        let v = LatticeVector::combine(&from.nu[1][0], &b1, &from.nu[1][1], &b2);
        reduce(u, v, from.nu.clone())
    };
    let mut up = Vec::with_capacity(b as usize);
    let mut down = Vec::with_capacity(b as usize);
    let mut prev = center.clone();
    for k in 1..=b {
        let next = seeded(&prev, &(&j + k));
        up.push(next.clone());
        prev = next;
    }
    prev = center.clone();
    for k in 1..=b {
        let next = seeded(&prev, &(&j - k));
        down.push(next.clone());
        prev = next;
    }
    down.reverse();
    down.push(center);
    down.extend(up);
    down
}

/// One enumerated lattice vector `m1·s1 + m2·s2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedVector {
    pub m1: BigInt,
    pub m2: BigInt,
    pub w: LatticeVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationResult {
    /// Distinct candidates in order of discovery.
    pub candidates: Vec<BigUint>,
    /// Nonzero lattice vectors inside the search radius.
    pub vectors_visited: u64,
    /// Vectors that passed the half-plane and coordinate restrictions.
    pub vectors: Vec<EnumeratedVector>,
    /// Whether the enumeration stopped at the budget.
    pub budget_exhausted: bool,
}

/// Candidates from the lattice vectors of norm below `2^{m - 1/2}`.
///
/// When `λ2⊥ >= 2^{m-1/2}` only the shortest vector can lie in the ball and
/// its candidate is returned directly. Otherwise all vectors `m1·s1 + m2·s2`
/// in the ball are visited; those with `w2 > 0`, `|w1| < 2^{m-1}` and
/// `w2 < 2^{m-1}` yield candidates. Visiting stops after `budget` vectors.
pub fn enumerate_candidates(j: &BigUint, m: u32, n: u32, budget: u64) -> EnumerationResult {
    let basis = lagrange_reduce(j, n);
    enumerate_reduced(&basis, m, n, budget)
}

pub fn enumerate_reduced(basis: &ReducedBasis, m: u32, n: u32, budget: u64) -> EnumerationResult {
    assert!(n > m, "register must be longer than m");
    let ell = n - m;
    let n1 = basis.s1.norm4();
    // λ2⊥ >= 2^{m-1/2}  <=>  4λ1² <= 2^{2ℓ+1}
    if n1 <= (BigInt::one() << (2 * ell + 1)) {
        let c = basis.s1.candidate();
        let c = if c.is_zero() { BigUint::one() } else { c };
        return EnumerationResult {
            candidates: vec![c],
            vectors_visited: 1,
            vectors: vec![EnumeratedVector {
                m1: BigInt::one(),
                m2: BigInt::zero(),
                w: basis.s1.clone(),
            }],
            budget_exhausted: false,
        };
    }
    let g = basis.s1.dot4(&basis.s2);
    let n2 = basis.s2.norm4();
    // 4|w|² < 2^{2m+1}
    let radius = BigInt::one() << (2 * m + 1);
    // m2² · 2^{2ℓ+1} < N1
    let m2_max = ((&n1 - 1u32) >> (2 * ell + 1)).sqrt();
    let w1_limit = BigInt::one() << (m - 1);
    let w2_limit = BigInt::one() << m;
    let mut out = EnumerationResult {
        candidates: Vec::new(),
        vectors_visited: 0,
        vectors: Vec::new(),
        budget_exhausted: false,
    };
    let mut seen = std::collections::HashSet::new();
    let quad = |m1: &BigInt, m2: &BigInt| m1 * m1 * &n1 + BigInt::from(2) * m1 * m2 * &g + m2 * m2 * &n2;
    let mut m2 = -m2_max.clone();
    'outer: while m2 <= m2_max {
        let center = floor_div(&(-(&m2 * &g)), &n1);
        for dir in [-1i32, 1] {
            let mut m1 = if dir < 0 { center.clone() } else { &center + 1 };
            loop {
                if quad(&m1, &m2) >= radius {
                    break;
                }
                if !(m1.is_zero() && m2.is_zero()) {
                    if out.vectors_visited == budget {
                        out.budget_exhausted = true;
                        break 'outer;
                    }
                    out.vectors_visited += 1;
                    let w = LatticeVector::combine(&m1, &basis.s1, &m2, &basis.s2);
                    if w.w2x2.sign() == Sign::Plus && w.w1.abs() < w1_limit && w.w2x2 < w2_limit {
                        let c = w.candidate();
                        if seen.insert(c.clone()) {
                            out.candidates.push(c);
                        }
                        out.vectors.push(EnumeratedVector {
                            m1: m1.clone(),
                            m2: m2.clone(),
                            w,
                        });
                    }
                }
                m1 += dir;
            }
        }
        m2 += 1;
    }
    out
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::div_floor(a, b)
}

/// Precomputes `x1 = x^{2·s1.w2}` and `x2 = x^{2·s2.w2}` so that
/// `x^{2·w2} = x1^{m1}·x2^{m2}` for each enumerated `w = m1·s1 + m2·s2`.
pub fn structured_filter_precompute<G: CyclicGroup>(
    group: &G,
    basis: &ReducedBasis,
    x: &G::Element,
) -> (G::Element, G::Element) {
    (
        signed_pow(group, x, &basis.s1.w2x2),
        signed_pow(group, x, &basis.s2.w2x2),
    )
}

/// `x1^{m1}·x2^{m2}`.
pub fn structured_test<G: CyclicGroup>(
    group: &G,
    x1: &G::Element,
    x2: &G::Element,
    m1: &BigInt,
    m2: &BigInt,
) -> G::Element {
    group.mul(&signed_pow(group, x1, m1), &signed_pow(group, x2, m2))
}

/// `x^e` for signed `e`.
pub fn signed_pow<G: CyclicGroup>(group: &G, x: &G::Element, e: &BigInt) -> G::Element {
    let y = group.pow(x, e.magnitude());
    if e.is_negative() {
        group.inverse(&y)
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn zero_frequency() {
        let r = lagrange_reduce(&b(0), 6);
        assert_eq!(r.s1, LatticeVector::new(0.into(), 1.into()));
        assert_eq!(solve_shortest(&b(0), 6), b(1));
    }

    #[test]
    fn small_instance() {
        let r = lagrange_reduce(&b(5), 4);
        assert_eq!(r.s1.w1.abs(), BigInt::from(1));
        assert_eq!(r.s1.w2x2.abs(), BigInt::from(3));
        assert_eq!(r.det2(), b(16));
        assert!(r.is_size_reduced());
        assert_eq!(solve_shortest(&b(5), 4), b(3));
        // row multiples reproduce the vectors
        let (b1, b2) = basis(&5.into(), 4);
        let s1 = LatticeVector::combine(&r.nu[0][0], &b1, &r.nu[0][1], &b2);
        assert_eq!(s1, r.s1);
    }

    #[test]
    fn enumeration_contains_order() {
        // r = 3, m = 4, Δ = 2, z = 1: j0 = round(64/3) = 21
        let res = enumerate_candidates(&b(21), 4, 6, crate::bounds::lattice_budget(2));
        assert!(res.candidates.contains(&b(3)), "{:?}", res.candidates);
    }

    #[test]
    fn offset_range_base_case() {
        let v = reduce_offset_range(&b(37), 0, 8);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0], lagrange_reduce(&b(37), 8));
    }
}
