//! WebAssembly entry points for the static page in `www/`.
//!
//! Each export takes plain strings and numbers and returns a JSON report, or
//! throws a string naming the invalid input.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use mengoli::limits::ZetaTarget;
use mengoli::report::{self, decimal_digits};
use mengoli::{ProductSeriesSpec, Rational};

/// Largest w plotted; the table of sines grows linearly with w.
const MAX_PLOT_W: u64 = 512;
/// Oracle terms are summed on the page's thread.
const MAX_ORACLE_TERMS: u32 = 5_000_000;

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report serializes")
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

pub fn evaluate_json(shifts: &str, precision: usize, oracle_terms: u32) -> Result<String, String> {
    if oracle_terms > MAX_ORACLE_TERMS {
        return Err(format!("at most {MAX_ORACLE_TERMS} oracle terms in the browser"));
    }
    let shifts = shifts
        .split(',')
        .map(|s| s.trim().parse::<Rational>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let spec = ProductSeriesSpec::from_unsorted(shifts, precision).map_err(err)?;
    let oracle = (oracle_terms >= 2).then_some(oracle_terms as u64);
    Ok(json(&report::evaluate(&spec, oracle).map_err(err)?))
}

pub fn digamma_json(arg: &str, precision: usize) -> Result<String, String> {
    let x: Rational = arg.trim().parse().map_err(err)?;
    Ok(json(&report::digamma(&x, precision).map_err(err)?))
}

#[derive(Serialize)]
struct Point {
    w: u64,
    value: String,
    /// `|T(w) - limit|`, for a log-log plot.
    error: f64,
}

#[derive(Serialize)]
struct ZetaSequence {
    report: report::ZetaReport,
    points: Vec<Point>,
}

pub fn zeta_sequence_json(s: u32, w_max: u32, precision: usize) -> Result<String, String> {
    let target = ZetaTarget::from_s(s).map_err(err)?;
    let w_max = w_max as u64;
    if !(16..=MAX_PLOT_W).contains(&w_max) {
        return Err(format!("w_max must be in 16..={MAX_PLOT_W}, got {w_max}"));
    }
    // Richardson on the last four powers of two up to w_max.
    let top = 1u64 << w_max.ilog2();
    let grid: Vec<u64> = (0..4).rev().map(|k| top >> k).collect();
    let rep = report::zeta(target, &grid, 3, precision).map_err(err)?;
    let limit = target.reference(precision).map_err(err)?;

    let mut points = Vec::new();
    let mut w = target.min_w();
    while w <= w_max {
        let (v, _) = target.term(w, precision).map_err(err)?;
        points.push(Point {
            w,
            value: v.to_plain_decimal(decimal_digits(precision).min(20)),
            error: v.abs_diff(&limit),
        });
        w = if w < 32 { w + 1 } else { w + w / 8 };
    }
    Ok(json(&ZetaSequence { report: rep, points }))
}

/// Sum of `1/prod (n + q_i)` for comma-separated rational shifts.
#[wasm_bindgen]
pub fn evaluate(shifts: &str, precision: u32, oracle_terms: u32) -> Result<String, JsValue> {
    evaluate_json(shifts, precision as usize, oracle_terms).map_err(|e| JsValue::from_str(&e))
}

/// `psi(x) + gamma` at a positive rational.
#[wasm_bindgen]
pub fn digamma(arg: &str, precision: u32) -> Result<String, JsValue> {
    digamma_json(arg, precision as usize).map_err(|e| JsValue::from_str(&e))
}

/// The zeta(2) or zeta(4) sequence up to `w_max`, with its extrapolated limit.
#[wasm_bindgen]
pub fn zeta_sequence(s: u32, w_max: u32, precision: u32) -> Result<String, JsValue> {
    zeta_sequence_json(s, w_max, precision as usize).map_err(|e| JsValue::from_str(&e))
}
