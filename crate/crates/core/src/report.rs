//! Serializable reports shared by the command line and the web page.
//!
//! Numbers are carried as decimal strings so that output is byte-for-byte
//! reproducible across platforms and languages.

use serde::Serialize;

use crate::digamma::{digamma_plus_gamma, gauss_terms};
use crate::error::Result;
use crate::hp::RealHP;
use crate::limits::{cot_expansion_limit, zeta_limit, LimitEstimate, OrderEstimate, ZetaTarget};
use crate::multifactor::multi_sum;
use crate::oracle::{truncated_sum, TruncationReport};
use crate::pairsum::EvalResult;
use crate::rational::{decompose, ProductSeriesSpec, Rational};

/// Significant decimal digits carried by `bits` binary digits.
pub fn decimal_digits(bits: usize) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize
}

/// Error bounds and oracle endpoints are binary64; rendered with 6 digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.5e}")
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct OracleReport {
    pub low: String,
    pub high: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub pass: bool,
}

impl OracleReport {
    pub fn from_truncation(report: &TruncationReport, value: &RealHP, error_bound: f64) -> Self {
        let (lo, hi) = report.interval();
        Self {
            low: format!("{lo:.16e}"),
            high: format!("{hi:.16e}"),
            n: report.terms_used,
            pass: report.contains(value, error_bound),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct EvalReport {
    pub shifts: Vec<String>,
    pub value: String,
    pub error_bound: String,
    pub method: String,
    pub precision: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
}

impl EvalReport {
    pub fn new(spec: &ProductSeriesSpec, result: &EvalResult, oracle: Option<&TruncationReport>) -> Self {
        Self {
            shifts: spec.shifts().iter().map(Rational::to_string).collect(),
            value: result.value.to_plain_decimal(decimal_digits(spec.precision())),
            error_bound: format_f64(result.error_bound),
            method: result.method.to_string(),
            precision: spec.precision(),
            exact: result.exact.as_ref().map(Rational::to_string),
            oracle: oracle.map(|o| OracleReport::from_truncation(o, &result.value, result.error_bound)),
        }
    }

    pub fn oracle_failed(&self) -> bool {
        self.oracle.as_ref().is_some_and(|o| !o.pass)
    }
}

/// Evaluates a spec and, when `oracle_terms` is given, checks it against the
/// truncated series.
pub fn evaluate(spec: &ProductSeriesSpec, oracle_terms: Option<u64>) -> Result<EvalReport> {
    let result = multi_sum(spec)?;
    let oracle = oracle_terms.map(|n| truncated_sum(spec, n)).transpose()?;
    Ok(EvalReport::new(spec, &result, oracle.as_ref()))
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct DigammaReport {
    pub arg: String,
    /// `psi(arg) + gamma`.
    pub value: String,
    pub error_bound: String,
    pub precision: usize,
    /// The Gauss term groups for the fractional part, absent for integers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<GaussTermsReport>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GaussTermsReport {
    pub p: u64,
    pub q: u64,
    pub cot_term: String,
    pub log_term: String,
    pub trig_sum: String,
}

pub fn digamma(arg: &Rational, precision: usize) -> Result<DigammaReport> {
    let (value, budget) = digamma_plus_gamma(arg, precision)?;
    let digits = decimal_digits(precision);
    let (_, x, w) = decompose(arg).to_machine()?;
    let terms = if x == 0 {
        None
    } else {
        let t = gauss_terms(x, w, precision)?;
        Some(GaussTermsReport {
            p: x,
            q: w,
            cot_term: t.cot_term.to_plain_decimal(digits),
            log_term: t.log_term.to_plain_decimal(digits),
            trig_sum: t.trig_sum.to_plain_decimal(digits),
        })
    };
    Ok(DigammaReport {
        arg: arg.to_string(),
        value: value.to_plain_decimal(digits),
        error_bound: format_f64(budget),
        precision,
        terms,
    })
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TermReport {
    pub w: u64,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ZetaReport {
    pub s: u32,
    pub target: String,
    pub w: Vec<u64>,
    pub terms: Vec<TermReport>,
    pub order: usize,
    pub extrapolated: String,
    pub series_limit: String,
    pub abs_error: String,
    pub difference_estimate: String,
    pub convergence_order: Option<String>,
    pub precision: usize,
}

pub fn target_name(target: ZetaTarget) -> &'static str {
    match target {
        ZetaTarget::Zeta2 => "pi^2/6",
        ZetaTarget::Zeta4 => "pi^4/90",
    }
}

impl ZetaReport {
    pub fn new(est: &LimitEstimate, target: ZetaTarget, series_limit: &RealHP, precision: usize) -> Self {
        let digits = decimal_digits(precision);
        Self {
            s: target.s(),
            target: target_name(target).to_string(),
            w: est.raw_terms.iter().map(|(w, _)| *w).collect(),
            terms: est
                .raw_terms
                .iter()
                .map(|(w, v)| TermReport {
                    w: *w,
                    value: v.to_plain_decimal(digits),
                })
                .collect(),
            order: est.order,
            extrapolated: est.extrapolated.to_plain_decimal(digits),
            series_limit: series_limit.to_plain_decimal(digits),
            abs_error: format_f64(est.target_hint.unwrap_or(f64::NAN)),
            difference_estimate: format_f64(est.difference_estimate),
            convergence_order: match est.order_estimate {
                OrderEstimate::Measured(p) => Some(format!("{p:.4}")),
                OrderEstimate::Saturated => Some("saturated".into()),
                OrderEstimate::Unknown => None,
            },
            precision,
        }
    }
}

pub fn zeta(target: ZetaTarget, grid: &[u64], order: usize, precision: usize) -> Result<ZetaReport> {
    let est = zeta_limit(target, grid, order, precision)?;
    let series = cot_expansion_limit(target, precision)?;
    Ok(ZetaReport::new(&est, target, &series.limit, precision))
}
