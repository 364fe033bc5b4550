//! Argument handling and report rendering for the `mengoli` binary.

use std::fmt::Write as _;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use mengoli::limits::ZetaTarget;
use mengoli::multifactor::multi_sum;
use mengoli::oracle::{truncated_sum, verdict};
use mengoli::report::{self, format_f64, DigammaReport, EvalReport, ZetaReport};
use mengoli::sample::ShiftSampler;
use mengoli::{Error, ProductSeriesSpec, Rational, RealHP, DEFAULT_PRECISION_BITS};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "mengoli", version, about = "Closed forms for sum_{n>=1} 1/prod_i (n + q_i) at rational shifts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Working precision in bits (at least 64).
    #[arg(long, global = true, env = "MENGOLI_PRECISION", default_value_t = DEFAULT_PRECISION_BITS)]
    pub precision: usize,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sum the series for a list of shifts.
    Eval(EvalArgs),
    /// psi(x) + gamma at a positive rational x.
    Digamma(DigammaArgs),
    /// Reproduce zeta(2) or zeta(4) from the w -> infinity construction.
    Zeta(ZetaArgs),
    /// Check closed forms against the truncated series.
    Verify(VerifyArgs),
    /// Time to reach a tolerance: closed form vs truncated series.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Comma-separated rationals, e.g. "-1/2,1/2".
    #[arg(long, allow_hyphen_values = true)]
    pub shifts: String,
    /// Also report the oracle enclosure at this many terms.
    #[arg(long, value_name = "N")]
    pub oracle: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DigammaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub arg: String,
}

#[derive(Debug, Args)]
pub struct ZetaArgs {
    /// 2 or 4.
    #[arg(long)]
    pub s: u32,
    /// Comma-separated w grid, geometric for best results.
    #[arg(long, default_value = "16,32,64,128")]
    pub w: String,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Check one spec instead of random trials.
    #[arg(long, allow_hyphen_values = true)]
    pub shifts: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 24)]
    pub max_den: u64,
    /// Largest factor count for random specs; counts are drawn from 2..=this.
    #[arg(long, default_value_t = 2)]
    pub max_factors: usize,
    /// Oracle truncation point.
    #[arg(long = "N", default_value_t = 1_000_000)]
    pub n: u64,
    /// Added to every closed value before checking (fault injection).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub perturb: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub shifts: String,
    /// Target width of the oracle enclosure.
    #[arg(long, default_value_t = 1e-9)]
    pub eps: f64,
    /// Give up doubling the oracle past this many terms.
    #[arg(long, default_value_t = 1 << 30)]
    pub max_terms: u64,
}

/// Rendered output and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub output: String,
}

/// Parses a comma-separated shift list. Every entry is parsed before anything runs.
pub fn parse_shifts(s: &str, precision: usize) -> Result<ProductSeriesSpec, Error> {
    let shifts = s
        .split(',')
        .map(|t| t.trim().parse::<Rational>())
        .collect::<Result<Vec<_>, _>>()?;
    ProductSeriesSpec::from_unsorted(shifts, precision)
}

fn parse_grid(s: &str) -> Result<Vec<u64>, Error> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| Error::InvalidInput(format!("bad w {t:?}: {e}")))
        })
        .collect()
}

pub fn run(cli: &Cli) -> Result<Outcome, Error> {
    let bits = cli.precision;
    match &cli.command {
        Command::Eval(a) => eval(a, bits, cli.format),
        Command::Digamma(a) => digamma(a, bits, cli.format),
        Command::Zeta(a) => zeta(a, bits, cli.format),
        Command::Verify(a) => verify(a, bits, cli.format),
        Command::Bench(a) => bench(a, bits, cli.format),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn eval(a: &EvalArgs, bits: usize, format: Format) -> Result<Outcome, Error> {
    let spec = parse_shifts(&a.shifts, bits)?;
    let r = report::evaluate(&spec, a.oracle)?;
    let code = if r.oracle_failed() { EXIT_VERIFY_FAILED } else { EXIT_OK };
    let output = match format {
        Format::Json => to_json(&r),
        Format::Text => eval_text(&r),
    };
    Ok(Outcome { code, output })
}

fn eval_text(r: &EvalReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "shifts      {}", r.shifts.join(", "));
    let _ = writeln!(s, "value       {}", r.value);
    if let Some(e) = &r.exact {
        let _ = writeln!(s, "exact       {e}");
    }
    let _ = writeln!(s, "error bound {}", r.error_bound);
    let _ = writeln!(s, "method      {}", r.method);
    if let Some(o) = &r.oracle {
        let _ = writeln!(
            s,
            "oracle      [{}, {}] at N={} {}",
            o.low,
            o.high,
            o.n,
            if o.pass { "pass" } else { "FAIL" }
        );
    }
    s
}

fn digamma(a: &DigammaArgs, bits: usize, format: Format) -> Result<Outcome, Error> {
    let x: Rational = a.arg.trim().parse()?;
    let r = report::digamma(&x, bits)?;
    let output = match format {
        Format::Json => to_json(&r),
        Format::Text => digamma_text(&r),
    };
    Ok(Outcome { code: EXIT_OK, output })
}

fn digamma_text(r: &DigammaReport) -> String {
    let mut s = format!("psi({}) + gamma = {}\nerror bound {}\n", r.arg, r.value, r.error_bound);
    if let Some(t) = &r.terms {
        let _ = writeln!(s, "Gauss terms for {}/{}:", t.p, t.q);
        let _ = writeln!(s, "  -(pi/2) cot  {}", t.cot_term);
        let _ = writeln!(s, "  -ln q        {}", t.log_term);
        let _ = writeln!(s, "  trig sum     {}", t.trig_sum);
    }
    s
}

fn zeta(a: &ZetaArgs, bits: usize, format: Format) -> Result<Outcome, Error> {
    let target = ZetaTarget::from_s(a.s)?;
    let grid = parse_grid(&a.w)?;
    let r = report::zeta(target, &grid, a.order, bits)?;
    let output = match format {
        Format::Json => to_json(&r),
        Format::Text => zeta_text(&r),
    };
    Ok(Outcome { code: EXIT_OK, output })
}

fn zeta_text(r: &ZetaReport) -> String {
    let mut s = String::new();
    for t in &r.terms {
        let _ = writeln!(s, "w={:<6} {}", t.w, t.value);
    }
    let _ = writeln!(s, "extrapolated (order {}) {}", r.order, r.extrapolated);
    let _ = writeln!(s, "cot series limit       {}", r.series_limit);
    let _ = writeln!(s, "target {}, |error| {}", r.target, r.abs_error);
    if let Some(p) = &r.convergence_order {
        let _ = writeln!(s, "observed order {p}");
    }
    s
}

#[derive(Debug, Serialize)]
struct TrialFailure {
    index: usize,
    shifts: Vec<String>,
    value: String,
    error_bound: String,
    low: String,
    high: String,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    trials: usize,
    seed: u64,
    max_den: u64,
    max_factors: usize,
    #[serde(rename = "N")]
    n: u64,
    perturb: String,
    precision: usize,
    passed: usize,
    failed: usize,
    failures: Vec<TrialFailure>,
}

fn verify(a: &VerifyArgs, bits: usize, format: Format) -> Result<Outcome, Error> {
    let specs = match &a.shifts {
        Some(s) => vec![parse_shifts(s, bits)?],
        None => {
            if a.max_factors < 2 {
                return Err(Error::InvalidInput(format!("--max-factors must be >= 2, got {}", a.max_factors)));
            }
            let mut sampler = ShiftSampler::new(a.seed, a.max_den)?;
            (0..a.trials)
                .map(|_| {
                    let k = sampler.factor_count(2, a.max_factors);
                    sampler.spec(k, bits)
                })
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    if a.n < 2 {
        return Err(Error::InvalidInput(format!("oracle needs N >= 2, got {}", a.n)));
    }
    if !a.perturb.is_finite() {
        return Err(Error::InvalidInput(format!("perturbation must be finite, got {}", a.perturb)));
    }
    let shift = RealHP::from_f64(a.perturb, bits)?;

    // Trials run in parallel; collecting by index keeps the report order fixed.
    let results: Vec<Result<Option<TrialFailure>, Error>> = specs
        .par_iter()
        .enumerate()
        .map(|(index, spec)| {
            let closed = multi_sum(spec)?;
            let value = closed.value.add(&shift);
            let oracle = truncated_sum(spec, a.n)?;
            let v = verdict(&oracle, &value, closed.error_bound);
            Ok((!v.pass).then(|| TrialFailure {
                index,
                shifts: spec.shifts().iter().map(Rational::to_string).collect(),
                value: value.to_plain_decimal(report::decimal_digits(bits)),
                error_bound: format_f64(closed.error_bound),
                low: format!("{:.16e}", v.oracle_low),
                high: format!("{:.16e}", v.oracle_high),
            }))
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    let r = VerifyReport {
        trials: specs.len(),
        seed: a.seed,
        max_den: a.max_den,
        max_factors: a.max_factors,
        n: a.n,
        perturb: format_f64(a.perturb),
        precision: bits,
        passed: specs.len() - failures.len(),
        failed: failures.len(),
        failures,
    };
    let code = if r.failed == 0 { EXIT_OK } else { EXIT_VERIFY_FAILED };
    let output = match format {
        Format::Json => to_json(&r),
        Format::Text => {
            let mut s = format!("{}/{} passed at N={}\n", r.passed, r.trials, r.n);
            for f in &r.failures {
                let _ = writeln!(
                    s,
                    "FAIL #{} [{}] value {} +- {} outside [{}, {}]",
                    f.index,
                    f.shifts.join(", "),
                    f.value,
                    f.error_bound,
                    f.low,
                    f.high
                );
            }
            s
        }
    };
    Ok(Outcome { code, output })
}

#[derive(Debug, Serialize)]
struct BenchReport {
    shifts: Vec<String>,
    eps: String,
    closed_value: String,
    closed_error_bound: String,
    closed_seconds: f64,
    oracle_terms: u64,
    oracle_width: String,
    oracle_seconds: f64,
    oracle_reached: bool,
    speedup: f64,
}

fn bench(a: &BenchArgs, bits: usize, format: Format) -> Result<Outcome, Error> {
    let spec = parse_shifts(&a.shifts, bits)?;
    if a.eps.is_nan() || a.eps <= 0.0 {
        return Err(Error::InvalidInput(format!("--eps must be positive, got {}", a.eps)));
    }
    let t0 = Instant::now();
    let closed = multi_sum(&spec)?;
    let closed_seconds = t0.elapsed().as_secs_f64();

    // Double N until the enclosure is narrow enough; time only the final run.
    let mut n = 1024u64;
    let (oracle, oracle_seconds) = loop {
        let t = Instant::now();
        let o = truncated_sum(&spec, n)?;
        let secs = t.elapsed().as_secs_f64();
        if o.width() <= a.eps || n >= a.max_terms {
            break (o, secs);
        }
        n = (n * 2).min(a.max_terms);
    };
    let r = BenchReport {
        shifts: spec.shifts().iter().map(Rational::to_string).collect(),
        eps: format_f64(a.eps),
        closed_value: closed.value.to_plain_decimal(report::decimal_digits(bits)),
        closed_error_bound: format_f64(closed.error_bound),
        closed_seconds,
        oracle_terms: oracle.terms_used,
        oracle_width: format_f64(oracle.width()),
        oracle_seconds,
        oracle_reached: oracle.width() <= a.eps,
        speedup: oracle_seconds / closed_seconds.max(1e-9),
    };
    let output = match format {
        Format::Json => to_json(&r),
        Format::Text => format!(
            "closed form  {} +- {} in {:.3e} s\noracle       N={} width {} in {:.3e} s{}\nspeedup      {:.1}x\n",
            r.closed_value,
            r.closed_error_bound,
            r.closed_seconds,
            r.oracle_terms,
            r.oracle_width,
            r.oracle_seconds,
            if r.oracle_reached { "" } else { " (tolerance not reached)" },
            r.speedup
        ),
    };
    Ok(Outcome { code: EXIT_OK, output })
}
