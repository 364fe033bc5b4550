//! Brute-force truncated summation with rigorous enclosures.
//!
//! The oracle deliberately shares no code with the closed forms: it sums
//! `1/prod_i (n + q_i)` term by term in binary64 with compensated
//! accumulation, then brackets the omitted tail with the integral test. The
//! resulting interval accounts for both the tail and every rounding made on
//! the way.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::hp::RealHP;
use crate::pairsum::EvalResult;
use crate::rational::ProductSeriesSpec;

const U: f64 = f64::EPSILON / 2.0;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    abs_total: f64,
    count: u64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_total += x.abs();
        self.count += 1;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Upper estimate of `sum |x_i|`, inflated for its own rounding.
    pub fn abs_total(&self) -> f64 {
        self.abs_total * (1.0 + self.count as f64 * U * 1.01)
    }

    /// Bound on the accumulation error of [`value`](Self::value):
    /// `2u|S| + 2 n u^2 sum|x_i|`.
    pub fn error_bound(&self) -> f64 {
        2.0 * U * self.value().abs() + 2.0 * self.count as f64 * U * U * self.abs_total()
    }
}

/// A partial sum plus an enclosure of everything it leaves out.
///
/// The true sum lies in `[partial + tail_low - rounding, partial + tail_high + rounding]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    pub partial: f64,
    /// Bound on the rounding error of `partial` itself.
    pub rounding: f64,
    pub tail_low: f64,
    pub tail_high: f64,
    pub terms_used: u64,
}

impl TruncationReport {
    pub(crate) fn new(partial: f64, rounding: f64, tail_low: f64, tail_high: f64, terms_used: u64) -> Self {
        debug_assert!(tail_low <= tail_high);
        Self {
            partial,
            rounding,
            tail_low,
            tail_high,
            terms_used,
        }
    }

    /// Closed enclosure of the full sum, widened outward for the final additions.
    pub fn interval(&self) -> (f64, f64) {
        let lo = self.partial + self.tail_low - self.rounding;
        let hi = self.partial + self.tail_high + self.rounding;
        (lo - 4.0 * U * lo.abs(), hi + 4.0 * U * hi.abs())
    }

    pub fn width(&self) -> f64 {
        let (lo, hi) = self.interval();
        hi - lo
    }

    /// Whether `value +- error_bound` meets the enclosure.
    pub fn contains(&self, value: &RealHP, error_bound: f64) -> bool {
        let v = value.to_f64();
        let slack = error_bound + 2.0 * U * v.abs();
        let (lo, hi) = self.interval();
        v + slack >= lo && v - slack <= hi
    }
}

struct MachineShift {
    num: i128,
    den: i128,
}

fn machine_shifts(spec: &ProductSeriesSpec) -> Result<Vec<MachineShift>> {
    spec.shifts()
        .iter()
        .map(|q| {
            let num = q.numer().to_i64().ok_or_else(|| Error::OutOfRange(format!("shift {q}")))?;
            let den = q.denom().to_i64().ok_or_else(|| Error::OutOfRange(format!("shift {q}")))?;
            Ok(MachineShift {
                num: num as i128,
                den: den as i128,
            })
        })
        .collect()
}

/// `1/prod_i (n + q_i)` as `prod den_i / prod (n den_i + num_i)` in binary64.
fn term(shifts: &[MachineShift], n: u64, den_product: f64) -> f64 {
    let n = n as i128;
    let mut prod = 1.0f64;
    for s in shifts {
        prod *= (n * s.den + s.num) as f64;
    }
    den_product / prod
}

fn accumulate(spec: &ProductSeriesSpec, first: u64, last: u64, reverse: bool) -> Result<CompensatedSum> {
    let shifts = machine_shifts(spec)?;
    let den_product: f64 = shifts.iter().map(|s| s.den as f64).product();
    let mut sum = CompensatedSum::new();
    if reverse {
        for n in (first..=last).rev() {
            sum.add(term(&shifts, n, den_product));
        }
    } else {
        for n in first..=last {
            sum.add(term(&shifts, n, den_product));
        }
    }
    Ok(sum)
}

/// Relative rounding per term: `k - 1` products each side, the division, and
/// up to `k` integer conversions above 2^53.
fn per_term_error(k: usize) -> f64 {
    (3 * k + 1) as f64 * U * 1.01
}

fn check_terms(terms: u64) -> Result<()> {
    if terms < 2 {
        return Err(Error::InvalidInput(format!("oracle needs N >= 2, got {terms}")));
    }
    // Shifts are validated to be > -1 by `ProductSeriesSpec::new`, so every
    // factor n + q_i is positive for n >= 1.
    Ok(())
}

/// `sum_{n=1}^{N} 1/prod_i(n + q_i)` with an integral-test tail enclosure:
///
/// ```text
/// 1/((k-1)(N+1+q_max)^(k-1)) <= tail <= 1/((k-1)(N+q_min)^(k-1))
/// ```
pub fn truncated_sum(spec: &ProductSeriesSpec, terms: u64) -> Result<TruncationReport> {
    check_terms(terms)?;
    let sum = accumulate(spec, 1, terms, false)?;
    Ok(report(spec, &sum, terms))
}

/// Same as [`truncated_sum`] but accumulating from `n = N` down to `n = 1`.
pub fn truncated_sum_reversed(spec: &ProductSeriesSpec, terms: u64) -> Result<TruncationReport> {
    check_terms(terms)?;
    let sum = accumulate(spec, 1, terms, true)?;
    Ok(report(spec, &sum, terms))
}

fn report(spec: &ProductSeriesSpec, sum: &CompensatedSum, terms: u64) -> TruncationReport {
    let k = spec.len();
    let rounding = per_term_error(k) * sum.abs_total() + sum.error_bound();
    let (lo, hi) = tail_bounds(spec, terms);
    TruncationReport::new(sum.value(), rounding, lo, hi, terms)
}

/// Integral-test bounds on `sum_{n>N} 1/prod_i(n + q_i)`.
pub fn tail_bounds(spec: &ProductSeriesSpec, terms: u64) -> (f64, f64) {
    let k = spec.len() as i32;
    let shifts = spec.shifts();
    let q_min = shifts[0].to_f64();
    let q_max = shifts[shifts.len() - 1].to_f64();
    let n = terms as f64;
    let kf = (k - 1) as f64;
    let high = 1.0 / (kf * (n + q_min).powi(k - 1)) * (1.0 + 16.0 * U);
    let low = 1.0 / (kf * (n + 1.0 + q_max).powi(k - 1)) * (1.0 - 16.0 * U);
    (low, high)
}

/// Outcome of checking a closed-form value against the oracle enclosure.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub closed: f64,
    pub closed_error: f64,
    pub oracle_low: f64,
    pub oracle_high: f64,
    pub terms_used: u64,
    /// Distance from the closed value to the nearer end of the enclosure;
    /// negative when outside.
    pub margin: f64,
}

/// Pass iff `closed.value +- closed.error_bound` meets the enclosure at `N` terms.
pub fn verify(spec: &ProductSeriesSpec, closed: &EvalResult, terms: u64) -> Result<Verdict> {
    let report = truncated_sum(spec, terms)?;
    Ok(verdict(&report, &closed.value, closed.error_bound))
}

pub fn verdict(report: &TruncationReport, value: &RealHP, error_bound: f64) -> Verdict {
    let (lo, hi) = report.interval();
    let v = value.to_f64();
    let margin = (v - lo).min(hi - v);
    Verdict {
        pass: report.contains(value, error_bound),
        closed: v,
        closed_error: error_bound,
        oracle_low: lo,
        oracle_high: hi,
        terms_used: report.terms_used,
        margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn spec(shifts: &[(i64, i64)]) -> ProductSeriesSpec {
        ProductSeriesSpec::new(
            shifts.iter().map(|&(n, d)| Rational::new(n, d).unwrap()).collect(),
            128,
        )
        .unwrap()
    }

    fn hp(v: f64) -> RealHP {
        RealHP::from_f64(v, 128).unwrap()
    }

    #[test]
    fn mengoli_partial_sum_telescopes() {
        let r = truncated_sum(&spec(&[(0, 1), (1, 1)]), 1000).unwrap();
        let exact = 1.0 - 1.0 / 1001.0;
        assert!((r.partial - exact).abs() <= r.rounding + 1e-16);
        assert!(r.tail_low <= 1.0 / 1001.0 && 1.0 / 1001.0 <= r.tail_high);
        assert!(r.contains(&hp(1.0), 0.0));
    }

    #[test]
    fn half_shifts_enclose_two() {
        let r = truncated_sum(&spec(&[(-1, 2), (1, 2)]), 1_000_000).unwrap();
        assert!(r.contains(&hp(2.0), 0.0));
        assert!(!r.contains(&hp(2.0 + 1e-9), 0.0));
    }

    #[test]
    fn three_factor_encloses_quarter() {
        let r = truncated_sum(&spec(&[(0, 1), (1, 1), (2, 1)]), 100_000).unwrap();
        assert!(r.contains(&hp(0.25), 0.0));
        assert!(r.tail_low >= 0.0 && r.tail_low <= r.tail_high);
    }

    #[test]
    fn tail_scales_with_factor_count() {
        for s in [spec(&[(0, 1), (1, 3)]), spec(&[(-1, 2), (0, 1), (5, 2)]), spec(&[(-2, 3), (-1, 3), (1, 3), (2, 3)])] {
            let k = s.len() as i32;
            let (_, h1) = tail_bounds(&s, 1 << 20);
            let (_, h2) = tail_bounds(&s, 1 << 21);
            let ratio = h1 / h2;
            assert!((ratio - 2f64.powi(k - 1)).abs() < 1e-4 * 2f64.powi(k - 1), "k={k} ratio={ratio}");
        }
    }

    #[test]
    fn forward_and_backward_agree() {
        let s = spec(&[(-1, 3), (1, 7)]);
        let n = 10_000_000;
        let f = truncated_sum(&s, n).unwrap();
        let b = truncated_sum_reversed(&s, n).unwrap();
        assert!((f.partial - b.partial).abs() <= 2.0 * (f.rounding + b.rounding), "{} vs {}", f.partial, b.partial);
    }

    #[test]
    fn compensated_beats_naive_on_cancelling_input() {
        let mut c = CompensatedSum::new();
        let mut naive = 0.0;
        for x in [1e16, 1.0, -1e16, 1.0] {
            c.add(x);
            naive += x;
        }
        assert_eq!(c.value(), 2.0);
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn rejects_single_term() {
        assert!(truncated_sum(&spec(&[(0, 1), (1, 1)]), 1).is_err());
    }

    #[test]
    fn verdict_flags_perturbation() {
        let s = spec(&[(0, 1), (1, 1)]);
        let r = truncated_sum(&s, 10_000).unwrap();
        assert!(verdict(&r, &hp(1.0), 0.0).pass);
        assert!(!verdict(&r, &hp(1.0 + 1e-3), 0.0).pass);
        assert!(verdict(&r, &hp(1.0 + 1e-3), 1e-2).pass);
    }
}
