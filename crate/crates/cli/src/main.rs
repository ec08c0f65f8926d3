use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use ofsim::bounds::{
    factoring_success_bound, floor5, lattice_success_bound, single_run_success_bound, table1, BoundInputs,
    FactoringBoundInputs, FactoringVariant, REliminationMode, TABLE1_B, TABLE1_C,
};
use ofsim::distribution::{Measurement, SampleKind, DEFAULT_T_MAX};
use ofsim::exec::Execution;
use ofsim::pipeline::{factor_completely, monte_carlo, FactorConfig, RSampler, RunConfig, Strategy};
use ofsim::recovery::Algorithm;
use ofsim::{Error, SimRng};

#[derive(Parser)]
#[command(name = "ofsim", version, about = "Single-run order finding: bounds, simulation and factoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a lower bound on the success probability.
    Bound(BoundArgs),
    /// Print the bound over the tabulated (c, B) grid at m = ell = 128.
    Table1 {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the single-run success rate.
    Simulate(SimulateArgs),
    /// Dump sampled frequencies for a fixed order.
    Sample(SampleArgs),
    /// Factor N completely with one simulated order-finding run.
    Factor(FactorArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Cf,
    LatticeShortest,
    LatticeEnumerate,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecoveryArg {
    Stack,
    Tree,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    UniformOdd,
    Uniform,
    Fixed,
    SmoothPoor,
}

#[derive(Clone, Copy, ValueEnum)]
enum RhoArg {
    Sqrt,
    Pow2ell,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    ell: Option<u32>,
    /// Lattice trade-off; selects the enumeration bound with ell = m - delta.
    #[arg(long)]
    delta: Option<u32>,
    #[arg(long = "B")]
    b: u64,
    #[arg(long)]
    c: f64,
    /// Bound on r/2^(m+ell) when r is unknown.
    #[arg(long, value_enum, default_value_t = RhoArg::Sqrt)]
    rho: RhoArg,
    /// Known order, replacing the bound on r/2^(m+ell).
    #[arg(long)]
    r: Option<BigUint>,
    /// Bit length of N; selects the complete-factoring bound.
    #[arg(long)]
    l: Option<u32>,
    /// Number of distinct prime factors of N.
    #[arg(long, default_value_t = 2)]
    primes: u32,
    #[arg(long, default_value_t = 20)]
    k: u32,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    ell: Option<u32>,
    #[arg(long)]
    delta: Option<u32>,
    #[arg(long = "B", default_value_t = 1)]
    b: u64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Cf)]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = RecoveryArg::Stack)]
    recovery: RecoveryArg,
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    tmax: u64,
    #[arg(long = "r-sampler", value_enum, default_value_t = SamplerArg::UniformOdd)]
    r_sampler: SamplerArg,
    /// Order for the fixed sampler.
    #[arg(long)]
    r: Option<BigUint>,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    r: BigUint,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    ell: u32,
    #[arg(long, default_value_t = 10)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    tmax: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FactorArgs {
    n: BigUint,
    #[arg(long = "B", default_value_t = 10)]
    b: u64,
    #[arg(long, default_value_t = 4.0)]
    c: f64,
    #[arg(long, default_value_t = 20)]
    k: u32,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long)]
    ell: Option<u32>,
    #[arg(long)]
    delta: Option<u32>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Cf)]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = RecoveryArg::Stack)]
    recovery: RecoveryArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    tmax: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit status 2 carries a usage message.
enum Failure {
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn strategy(arg: StrategyArg, delta: Option<u32>) -> Result<Strategy, Failure> {
    match (arg, delta) {
        (StrategyArg::Cf, _) => Ok(Strategy::Cf),
        (StrategyArg::LatticeShortest, _) => Ok(Strategy::LatticeShortest),
        (StrategyArg::LatticeEnumerate, Some(delta)) => Ok(Strategy::LatticeEnumerate { delta }),
        (StrategyArg::LatticeEnumerate, None) => Err(usage("--strategy lattice-enumerate requires --delta")),
    }
}

fn recovery(arg: RecoveryArg) -> Algorithm {
    match arg {
        RecoveryArg::Stack => Algorithm::Stack,
        RecoveryArg::Tree => Algorithm::Tree,
    }
}

fn run_bound(a: BoundArgs) -> Result<bool, Failure> {
    if let Some(l) = a.l {
        let variant = match (a.delta, a.ell) {
            (Some(delta), _) => FactoringVariant::Lattice { delta },
            (None, Some(ell)) => FactoringVariant::Standard { ell },
            (None, None) => {
                // least ℓ for l-bit N lies in [l - 3, l - 1]; the smallest gives the weakest bound
                FactoringVariant::Standard {
                    ell: l.saturating_sub(3).max(1),
                }
            }
        };
        let p = factoring_success_bound(&FactoringBoundInputs {
            l,
            n: a.primes,
            k: a.k,
            sigma: a.sigma,
            b: a.b,
            c: a.c,
            variant,
        })?;
        println!("{}", floor5(p));
        return Ok(true);
    }
    let m = a.m.ok_or_else(|| usage("--m is required"))?;
    if let Some(delta) = a.delta {
        let lb = lattice_success_bound(m, delta, a.b, a.c)?;
        println!("{}", floor5(lb.probability));
        println!("budget {}", lb.budget);
        return Ok(true);
    }
    let ell = a.ell.ok_or_else(|| usage("--ell or --delta is required"))?;
    let r_elimination = match (a.r, a.rho) {
        (Some(r), _) => REliminationMode::ExplicitR(r),
        (None, RhoArg::Sqrt) => REliminationMode::Sqrt,
        (None, RhoArg::Pow2ell) => REliminationMode::Pow2Ell,
    };
    let p = single_run_success_bound(&BoundInputs {
        m,
        ell,
        b: a.b,
        c: a.c,
        r_elimination,
    })?;
    println!("{}", floor5(p));
    Ok(true)
}

fn run_table1(format: Format, out: &Option<PathBuf>) -> Result<bool, Failure> {
    let t = table1();
    let text = match format {
        Format::Csv => {
            let mut s = String::from("c");
            for b in TABLE1_B {
                s.push_str(&format!(",B={b}"));
            }
            s.push('\n');
            for (i, c) in TABLE1_C.iter().enumerate() {
                s.push_str(&c.to_string());
                for v in t[i] {
                    s.push(',');
                    s.push_str(&floor5(v));
                }
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = TABLE1_C
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    serde_json::json!({
                        "c": c,
                        "values": t[i].iter().map(|&v| floor5(v)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let doc = serde_json::json!({ "m": 128, "ell": 128, "B": TABLE1_B, "rows": rows });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
    };
    emit(&text, out)?;
    Ok(true)
}

fn run_simulate(a: SimulateArgs) -> Result<bool, Failure> {
    let ell = match (a.ell, a.delta) {
        (Some(ell), _) => ell,
        (None, Some(delta)) if delta < a.m => a.m - delta,
        _ => return Err(usage("--ell or --delta < m is required")),
    };
    let mut cfg = RunConfig::new(a.m, ell, a.b, a.c);
    cfg.strategy = strategy(a.strategy, a.delta)?;
    cfg.recovery = recovery(a.recovery);
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.t_max = a.tmax;
    if a.sequential {
        cfg.execution = Execution::Sequential;
    }
    let sampler = match (a.r_sampler, a.r) {
        (SamplerArg::Fixed, Some(r)) => RSampler::Fixed { r },
        (SamplerArg::Fixed, None) => return Err(usage("--r-sampler fixed requires --r")),
        (_, Some(r)) => RSampler::Fixed { r },
        (SamplerArg::UniformOdd, None) => RSampler::UniformOdd,
        (SamplerArg::Uniform, None) => RSampler::Uniform,
        (SamplerArg::SmoothPoor, None) => RSampler::SmoothPoor,
    };
    let report = monte_carlo(&cfg, &sampler)?;
    let text = match a.format {
        Format::Json => format!("{}\n", report.to_json()),
        Format::Csv => report.to_csv(),
    };
    emit(&text, &a.out)?;
    eprintln!("{}", report.summary());
    Ok(report.pass)
}

fn run_sample(a: SampleArgs) -> Result<bool, Failure> {
    let measurement = Measurement::with_order(&a.r, a.m + a.ell)?;
    if a.r.bits() > u64::from(a.m) {
        return Err(usage(format!("r must be below 2^m = 2^{}", a.m)));
    }
    let base = SimRng::new(a.seed);
    let samples: Vec<_> = (0..a.count)
        .map(|i| measurement.sample_frequency(&mut base.split(i), a.tmax))
        .collect();
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("index,j,peak_z,offset\n");
            for (i, o) in samples.iter().enumerate() {
                match &o.kind {
                    SampleKind::Frequency(j) => s.push_str(&format!("{i},{j},{},{}\n", o.peak_z, o.offset_t)),
                    SampleKind::Tail => s.push_str(&format!("{i},tail,{},\n", o.peak_z)),
                }
            }
            s
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = samples
                .iter()
                .map(|o| match &o.kind {
                    SampleKind::Frequency(j) => serde_json::json!({
                        "j": j.to_string(), "peak_z": o.peak_z.to_string(), "offset": o.offset_t
                    }),
                    SampleKind::Tail => serde_json::json!({ "j": "tail", "peak_z": o.peak_z.to_string() }),
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&items).expect("json"))
        }
    };
    emit(&text, &a.out)?;
    Ok(true)
}

fn run_factor(a: FactorArgs) -> Result<bool, Failure> {
    let cfg = FactorConfig {
        strategy: strategy(a.strategy, a.delta)?,
        recovery: recovery(a.recovery),
        b: a.b,
        c: a.c,
        k: a.k,
        sigma: a.sigma,
        ell: a.ell,
        t_max: a.tmax,
        seed: a.seed,
    };
    match factor_completely(&a.n, &cfg) {
        Ok(out) => {
            let text = match a.format {
                Format::Csv => {
                    let mut s = String::from("prime,exponent\n");
                    for (p, e) in &out.factors {
                        s.push_str(&format!("{p},{e}\n"));
                    }
                    s
                }
                Format::Json => {
                    let factors: Vec<_> = out
                        .factors
                        .iter()
                        .map(|(p, e)| serde_json::json!({ "prime": p.to_string(), "exponent": e }))
                        .collect();
                    let doc = serde_json::json!({
                        "n": a.n.to_string(),
                        "order": out.order.to_string(),
                        "iterations": out.iterations,
                        "factors": factors,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
                }
            };
            emit(&text, &a.out)?;
            Ok(true)
        }
        Err(e @ (Error::RecoveryFailed(_) | Error::IncompleteFactorization { .. })) => {
            eprintln!("FAIL: {e}");
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bound(a) => run_bound(a),
        Command::Table1 { format, out } => run_table1(format, &out),
        Command::Simulate(a) => run_simulate(a),
        Command::Sample(a) => run_sample(a),
        Command::Factor(a) => run_factor(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `ofsim --help` for usage.");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
