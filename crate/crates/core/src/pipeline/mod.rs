//! Single-run order finding end to end and the Monte Carlo harness.
//!
//! A run samples one frequency `j`, solves `j` and its `2B` neighbours for
//! candidates, filters them and recovers the order with the minimum rule.

mod factor;
mod report;

use std::time::{Duration, Instant};

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::arith::is_probable_prime;
use crate::bounds::{lattice_budget, lattice_success_bound, single_run_success_bound, BoundInputs, REliminationMode};
use crate::cf::solve_cf;
use crate::distribution::{Measurement, SampleOutcome, DEFAULT_T_MAX};
use crate::error::{invalid, Result};
use crate::exec::{map_trials, Execution};
use crate::group::{CyclicGroup, SimulatedGroup};
use crate::lattice::{enumerate_reduced, reduce_offset_range, solve_shortest};
use crate::model::{pow2, Params, MAX_REGISTER_BITS};
use crate::recovery::{solve_candidate_set, Algorithm, ExponentMeter, SmoothnessContext};

pub use factor::{factor_completely, FactorConfig, FactorOutcome};
pub use report::{format_decimal, wilson_interval, FailureCounts, MonteCarloReport, CSV_HEADER, WILSON_Z99};

/// Post-processing applied to each frequency.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Strategy {
    /// Last convergent with denominator below `2^{(m+ℓ)/2}`.
    Cf,
    /// Candidate from the shortest vector of the reduced basis.
    LatticeShortest,
    /// All short vectors, for `ℓ = m - Δ`.
    LatticeEnumerate { delta: u32 },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Cf => "cf",
            Strategy::LatticeShortest => "lattice_shortest",
            Strategy::LatticeEnumerate { .. } => "lattice_enumerate",
        }
    }
}

/// Configuration shared by every trial. The order itself comes from an
/// [`RSampler`] or is passed to [`run_once`] directly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub m: u32,
    pub ell: u32,
    pub b: u64,
    pub c: f64,
    pub strategy: Strategy,
    pub recovery: Algorithm,
    pub trials: u64,
    pub seed: u64,
    pub t_max: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl RunConfig {
    /// Defaults: continued fractions, stack recovery, `T_max = 2^24`.
    pub fn new(m: u32, ell: u32, b: u64, c: f64) -> Self {
        RunConfig {
            m,
            ell,
            b,
            c,
            strategy: Strategy::Cf,
            recovery: Algorithm::Stack,
            trials: 1,
            seed: 0,
            t_max: DEFAULT_T_MAX,
            execution: Execution::default(),
        }
    }

    pub fn n(&self) -> u32 {
        self.m + self.ell
    }

    /// Checks the parameters that do not depend on `r`. `B < B_max` is
    /// required for every `r < 2^m`, i.e. `2B + 1 < 2^ℓ`.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be >= 1"));
        }
        if self.m == 0 || self.ell == 0 || self.n() > MAX_REGISTER_BITS {
            return Err(invalid(format!("m = {} and ell = {} out of range", self.m, self.ell)));
        }
        if !(self.c >= 1.0) || !self.c.is_finite() {
            return Err(invalid(format!("c = {} must be a finite real >= 1", self.c)));
        }
        if self.b == 0 {
            return Err(invalid("B must be >= 1"));
        }
        if self.ell < 64 && (2 * self.b as u128 + 1) >= (1u128 << self.ell) {
            return Err(invalid(format!("B < B_max violated: 2B + 1 must be < 2^ell = 2^{}", self.ell)));
        }
        if let Strategy::LatticeEnumerate { delta } = self.strategy {
            if delta >= self.m || self.ell != self.m - delta {
                return Err(invalid(format!("lattice_enumerate with delta = {delta} requires ell = m - delta")));
            }
        }
        if self.c * (self.m as f64) < 2.0 {
            return Err(invalid("c*m must be >= 2 so that the smoothness bound has primes"));
        }
        Ok(())
    }

    /// Parameters of one instance with order `r`.
    pub fn params(&self, r: &BigUint) -> Result<Params> {
        let p = match self.strategy {
            Strategy::LatticeEnumerate { delta } => Params::with_delta(r.clone(), self.m, delta, self.b, self.c)?,
            _ => Params::new(r.clone(), self.m, self.ell, self.b, self.c)?,
        };
        if !matches!(self.strategy, Strategy::LatticeEnumerate { .. }) {
            p.validate_unique_recovery()?;
        }
        Ok(p)
    }

    /// The analytic bound on the success probability for this configuration.
    /// `fixed_r` is used only to justify `ρ < 2^{-(m+ℓ)/2}` when `ℓ < m`.
    pub fn analytic_bound(&self, fixed_r: Option<&BigUint>) -> Result<f64> {
        match self.strategy {
            Strategy::LatticeEnumerate { delta } => Ok(lattice_success_bound(self.m, delta, self.b, self.c)?.probability),
            _ => {
                let sqrt_ok = self.ell >= self.m || fixed_r.is_some_and(|r| r * r < pow2(self.n()));
                if !sqrt_ok {
                    return Err(invalid("the sqrt bound on r/2^(m+ell) requires ell >= m or a fixed r with r^2 < 2^(m+ell)"));
                }
                single_run_success_bound(&BoundInputs {
                    m: self.m,
                    ell: self.ell,
                    b: self.b,
                    c: self.c,
                    r_elimination: REliminationMode::Sqrt,
                })
            }
        }
    }

    fn smoothness(&self) -> Result<SmoothnessContext> {
        SmoothnessContext::new(self.c, self.m)
    }
}

/// Distribution of the order over Monte Carlo trials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RSampler {
    /// Uniform odd in `[2^{m-1}, 2^m)`.
    UniformOdd,
    /// Uniform in `[2, 2^m)`.
    Uniform,
    Fixed {
        #[serde(with = "crate::model::biguint_string")]
        r: BigUint,
    },
    /// Product of the consecutive primes above `cm` that fits below `2^m`,
    /// so every nontrivial `gcd(r, z)` has a prime factor above `cm`.
    SmoothPoor,
}

impl RSampler {
    pub fn name(&self) -> &'static str {
        match self {
            RSampler::UniformOdd => "uniform_odd",
            RSampler::Uniform => "uniform",
            RSampler::Fixed { .. } => "fixed",
            RSampler::SmoothPoor => "smooth_poor",
        }
    }

    pub fn sample(&self, m: u32, cm: u64, rng: &mut dyn RngCore) -> Result<BigUint> {
        match self {
            RSampler::UniformOdd => {
                if m < 2 {
                    return Err(invalid("uniform_odd needs m >= 2"));
                }
                let lo = pow2(m - 1);
                Ok(rng.gen_biguint_range(&lo, &pow2(m)) | BigUint::one())
            }
            RSampler::Uniform => {
                if m < 2 {
                    return Err(invalid("uniform needs m >= 2"));
                }
                Ok(rng.gen_biguint_range(&BigUint::from(2u32), &pow2(m)))
            }
            RSampler::Fixed { r } => Ok(r.clone()),
            RSampler::SmoothPoor => smooth_poor(m, cm),
        }
    }
}

fn smooth_poor(m: u32, cm: u64) -> Result<BigUint> {
    let limit = pow2(m);
    let mut r = BigUint::one();
    let mut q = cm + 1;
    loop {
        if is_probable_prime(&BigUint::from(q)) {
            let next = &r * q;
            if next >= limit {
                break;
            }
            r = next;
        }
        q += 1;
    }
    if r.is_one() {
        return Err(invalid(format!("no prime above cm = {cm} fits below 2^{m}")));
    }
    Ok(r)
}

/// Why a run did not return the true order. Listed in precedence order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    /// The sampler left the offset cap.
    Tail,
    /// Enumeration stopped at its budget.
    Budget,
    /// No candidate led to the order.
    NoCandidate,
    /// A divisor `r̃` of `r` was found, but `r/r̃` is not `cm`-smooth.
    UnsmoothD,
}

/// Everything recorded about one run.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeRecord {
    pub sample: SampleOutcome,
    /// Offsets `t` around the sampled `j`, in the order solved.
    pub offsets: Vec<i64>,
    /// Candidates from `j + t`, aligned with `offsets`.
    pub candidate_sets: Vec<Vec<BigUint>>,
    pub survivors: Vec<BigUint>,
    pub recovered: Option<BigUint>,
    pub failure: Option<FailureReason>,
    pub exponent_bits: u64,
    pub budget_exhausted: bool,
    pub wall_time: Duration,
}

impl OutcomeRecord {
    pub fn success(&self) -> bool {
        self.failure.is_none()
    }
}

/// Offsets `0, 1, -1, …, B, -B`.
fn offset_order(b: u64) -> Vec<i64> {
    let mut out = vec![0];
    for t in 1..=b as i64 {
        out.push(t);
        out.push(-t);
    }
    out
}

/// One simulated run against `g` of order `measurement.r()`.
///
/// `group` may be any realization; success is judged against the order
/// carried by `measurement`.
pub fn run_once<G: CyclicGroup>(
    group: &G,
    g: &G::Element,
    measurement: &Measurement,
    config: &RunConfig,
    ctx: &SmoothnessContext,
    rng: &mut dyn RngCore,
) -> OutcomeRecord {
    let start = Instant::now();
    let sample = measurement.sample_frequency(rng, config.t_max);
    let Some(j) = sample.frequency().cloned() else {
        return OutcomeRecord {
            sample,
            offsets: vec![],
            candidate_sets: vec![],
            survivors: vec![],
            recovered: None,
            failure: Some(FailureReason::Tail),
            exponent_bits: 0,
            budget_exhausted: false,
            wall_time: start.elapsed(),
        };
    };
    let n = measurement.n();
    let modulus = pow2(n);
    let offsets = offset_order(config.b);
    let shifted = |t: i64| {
        if t >= 0 {
            (&j + t as u64) % &modulus
        } else {
            (&j + &modulus - (t.unsigned_abs() % &modulus)) % &modulus
        }
    };
    let mut budget_exhausted = false;
    let candidate_sets: Vec<Vec<BigUint>> = match config.strategy {
        Strategy::Cf => offsets.iter().map(|&t| vec![solve_cf(&shifted(t), n)]).collect(),
        Strategy::LatticeShortest => offsets.iter().map(|&t| vec![solve_shortest(&shifted(t), n)]).collect(),
        Strategy::LatticeEnumerate { delta } => {
            let budget = lattice_budget(delta);
            // bases[B + t] reduces j + t
            let bases = reduce_offset_range(&j, config.b, n);
            offsets
                .iter()
                .map(|&t| {
                    let basis = &bases[(config.b as i64 + t) as usize];
                    let res = enumerate_reduced(basis, config.m, n, budget);
                    budget_exhausted |= res.budget_exhausted;
                    res.candidates
                })
                .collect()
        }
    };
    let all: Vec<BigUint> = candidate_sets.iter().flatten().cloned().collect();
    let mut meter = ExponentMeter::new();
    let solution = solve_candidate_set(&all, group, g, ctx, config.recovery, &mut meter);
    let r = measurement.r();
    let failure = if solution.recovered.as_ref() == Some(r) {
        None
    } else if budget_exhausted {
        Some(FailureReason::Budget)
    } else if all.iter().any(|c| !c.is_zero() && (r % c).is_zero() && !ctx.is_smooth(&(r / c))) {
        Some(FailureReason::UnsmoothD)
    } else {
        Some(FailureReason::NoCandidate)
    };
    OutcomeRecord {
        sample,
        offsets,
        candidate_sets,
        survivors: solution.survivors,
        recovered: solution.recovered,
        failure,
        exponent_bits: meter.total_bits,
        budget_exhausted,
        wall_time: start.elapsed(),
    }
}

/// Convenience wrapper: one run in the simulated group of order `r` with a
/// uniformly random element.
pub fn run_simulated(r: &BigUint, config: &RunConfig, rng: &mut dyn RngCore) -> Result<OutcomeRecord> {
    let params = config.params(r)?;
    let measurement = Measurement::new(&params)?;
    let group = SimulatedGroup::new(r.clone())?;
    let ctx = config.smoothness()?;
    Ok(run_once(&group, &group.generator(), &measurement, config, &ctx, rng))
}

/// Summary of one trial kept by the harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct TrialSummary {
    failure: Option<FailureReason>,
    exponent_bits: u64,
}

/// Runs `config.trials` independent trials in the simulated group.
///
/// The order of trial `i` is drawn from stream `i` followed by the run
/// itself, so reports do not depend on the execution mode.
pub fn monte_carlo(config: &RunConfig, sampler: &RSampler) -> Result<MonteCarloReport> {
    config.validate()?;
    let ctx = config.smoothness()?;
    let fixed = match sampler {
        RSampler::Fixed { r } => Some(r),
        _ => None,
    };
    let bound = config.analytic_bound(fixed)?;
    if let RSampler::Fixed { r } = sampler {
        config.params(r)?;
    }
    let results = map_trials(config.execution, config.seed, config.trials, |_, rng| -> Result<TrialSummary> {
        let r = sampler.sample(config.m, ctx.bound, rng)?;
        let params = config.params(&r)?;
        let measurement = Measurement::new(&params)?;
        let group = SimulatedGroup::new(r)?;
        let g = group.generator();
        let rec = run_once(&group, &g, &measurement, config, &ctx, rng);
        Ok(TrialSummary {
            failure: rec.failure,
            exponent_bits: rec.exponent_bits,
        })
    });
    let mut counts = FailureCounts::default();
    let mut successes = 0;
    let mut bits_total: u128 = 0;
    let mut bits_max = 0;
    for res in results {
        let s = res?;
        match s.failure {
            None => successes += 1,
            Some(reason) => counts.record(reason),
        }
        bits_total += u128::from(s.exponent_bits);
        bits_max = bits_max.max(s.exponent_bits);
    }
    Ok(MonteCarloReport::new(
        config.clone(),
        sampler.clone(),
        successes,
        bound,
        counts,
        bits_total as f64 / config.trials as f64,
        bits_max,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SimRng;

    fn exhaustive_cfg(b: u64, c: f64, m: u32) -> RunConfig {
        let mut cfg = RunConfig::new(m, m, b, c);
        cfg.trials = 1;
        cfg
    }

    #[test]
    fn power_of_two_order_always_succeeds() {
        let cfg = exhaustive_cfg(1, 4.0, 3);
        let mut rng = SimRng::new(1);
        for _ in 0..200 {
            let rec = run_simulated(&BigUint::from(4u32), &cfg, &mut rng).unwrap();
            assert_eq!(rec.failure, None);
            assert_eq!(rec.sample.offset_t, 0);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::new(8, 8, 1, 2.0);
        assert!(cfg.validate().is_ok());
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        cfg.trials = 1;
        cfg.strategy = Strategy::LatticeEnumerate { delta: 2 };
        assert!(cfg.validate().is_err());
        cfg.ell = 6;
        assert!(cfg.validate().is_ok());
        let cfg = RunConfig::new(8, 2, 2, 2.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn smooth_poor_orders() {
        let r = smooth_poor(16, 10).unwrap();
        assert_eq!(r, BigUint::from(11u32 * 13 * 17 * 19));
        assert!(smooth_poor(3, 10).is_err());
    }

    #[test]
    fn failure_taxonomy() {
        // r = 2·7 with cm = 4: z odd multiples leave d = 7 unsmooth
        let cfg = RunConfig::new(4, 4, 1, 1.0);
        let mut rng = SimRng::new(3);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..300 {
            let rec = run_simulated(&BigUint::from(14u32), &cfg, &mut rng).unwrap();
            if let Some(f) = rec.failure {
                seen.insert(f);
            } else {
                assert_eq!(rec.recovered, Some(BigUint::from(14u32)));
            }
        }
        assert!(seen.contains(&FailureReason::UnsmoothD));
    }

    #[test]
    fn monte_carlo_rejects_zero_trials() {
        let mut cfg = RunConfig::new(8, 8, 1, 2.0);
        cfg.trials = 0;
        assert!(monte_carlo(&cfg, &RSampler::UniformOdd).is_err());
    }
}
