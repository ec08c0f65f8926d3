use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, Serializer};

use super::{FailureReason, RSampler, RunConfig, Strategy};

/// Two-sided 99% normal quantile.
pub const WILSON_Z99: f64 = 2.575_829_303_548_900_4;

/// Fixed CSV column order.
pub const CSV_HEADER: &str = "m,ell,b,c,strategy,delta,recovery,r_sampler,seed,t_max,trials,successes,rate,\
wilson99_lo,wilson99_hi,bound,pass,tail,no_candidate,unsmooth_d,budget,exponent_bits_mean,exponent_bits_max";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCounts {
    pub tail: u64,
    pub no_candidate: u64,
    pub unsmooth_d: u64,
    pub budget: u64,
}

impl FailureCounts {
    pub fn record(&mut self, reason: FailureReason) {
        match reason {
            FailureReason::Tail => self.tail += 1,
            FailureReason::NoCandidate => self.no_candidate += 1,
            FailureReason::UnsmoothD => self.unsmooth_d += 1,
            FailureReason::Budget => self.budget += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tail + self.no_candidate + self.unsmooth_d + self.budget
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentBits {
    pub mean: f64,
    pub max: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    #[serde(flatten)]
    pub run: RunConfig,
    pub r_sampler: RSampler,
}

/// Aggregate of a Monte Carlo experiment.
///
/// `pass` holds when `rate >= bound - 3·sqrt(bound(1 - bound)/trials)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub config: ReportConfig,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub wilson99: [f64; 2],
    pub bound: f64,
    pub pass: bool,
    pub failure_counts: FailureCounts,
    pub exponent_bits: ExponentBits,
}

/// Wilson score interval for `k` successes out of `n` at quantile `z`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> [f64; 2] {
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    [(center - half).max(0.0), (center + half).min(1.0)]
}

impl MonteCarloReport {
    pub(super) fn new(
        run: RunConfig,
        r_sampler: RSampler,
        successes: u64,
        bound: f64,
        failure_counts: FailureCounts,
        bits_mean: f64,
        bits_max: u64,
    ) -> Self {
        let trials = run.trials;
        let rate = successes as f64 / trials as f64;
        let slack = 3.0 * (bound * (1.0 - bound) / trials as f64).max(0.0).sqrt();
        MonteCarloReport {
            config: ReportConfig { run, r_sampler },
            trials,
            successes,
            rate,
            wilson99: wilson_interval(successes, trials, WILSON_Z99),
            bound,
            pass: rate >= bound - slack,
            failure_counts,
            exponent_bits: ExponentBits {
                mean: bits_mean,
                max: bits_max,
            },
        }
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        format!(
            "{} rate={} wilson99=[{}, {}] bound={} ({}/{} successes)",
            if self.pass { "PASS" } else { "FAIL" },
            format_decimal(self.rate),
            format_decimal(self.wilson99[0]),
            format_decimal(self.wilson99[1]),
            format_decimal(self.bound),
            self.successes,
            self.trials
        )
    }

    /// Pretty JSON with every float rounded to 12 significant digits.
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = Serializer::with_formatter(&mut buf, DecimalFormatter::default());
        self.serialize(&mut ser).expect("report serializes");
        String::from_utf8(buf).expect("utf-8")
    }

    /// Header and one data row.
    pub fn to_csv(&self) -> String {
        let run = &self.config.run;
        let delta = match run.strategy {
            Strategy::LatticeEnumerate { delta } => delta.to_string(),
            _ => String::new(),
        };
        let recovery = match run.recovery {
            crate::recovery::Algorithm::Stack => "stack",
            crate::recovery::Algorithm::Tree => "tree",
        };
        let row = [
            run.m.to_string(),
            run.ell.to_string(),
            run.b.to_string(),
            format_decimal(run.c),
            run.strategy.name().to_string(),
            delta,
            recovery.to_string(),
            self.config.r_sampler.name().to_string(),
            run.seed.to_string(),
            run.t_max.to_string(),
            self.trials.to_string(),
            self.successes.to_string(),
            format_decimal(self.rate),
            format_decimal(self.wilson99[0]),
            format_decimal(self.wilson99[1]),
            format_decimal(self.bound),
            self.pass.to_string(),
            self.failure_counts.tail.to_string(),
            self.failure_counts.no_candidate.to_string(),
            self.failure_counts.unsmooth_d.to_string(),
            self.failure_counts.budget.to_string(),
            format_decimal(self.exponent_bits.mean),
            self.exponent_bits.max.to_string(),
        ];
        format!("{CSV_HEADER}\n{}\n", row.join(","))
    }
}

/// Plain decimal rendering of `x` rounded to 12 significant digits, with
/// trailing zeros dropped.
pub fn format_decimal(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = exp + 1;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-point) as usize));
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        out.extend(std::iter::repeat_n('0', point as usize - digits.len()));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    out
}

#[derive(Default)]
struct DecimalFormatter {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.inner.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for DecimalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_decimal(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}
