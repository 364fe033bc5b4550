//! Closed forms for `sum_{n>=1} 1/((n + q1)(n + q2))` with distinct rational
//! shifts `q1, q2 > -1`.
//!
//! Writing a shift as `a + x/w` (`0 <= x < w`), there are three closed forms
//! depending on which shifts are integral, one unified form that covers all
//! three through explicit guards, and an independent route through the
//! digamma recurrence `Psi(1 + a + x/w) = G(x, w) + w/x + C(a, x, w)`, where
//! `G` is Gauss's digamma sum and `C` the integer-offset correction.

use std::fmt;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::digamma::{gauss_parts, gauss_value};
use crate::error::{Error, Result};
use crate::hp::{big_to_f64, op_error, Ctx, RealHP, TrigTable};
use crate::rational::{
    check_admissible, check_precision, correction_sum, decompose, decompose_over, harmonic, Rational,
};

/// Which closed form produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Both shifts non-negative integers: a difference of harmonic numbers.
    IntegerShifts,
    /// Both shifts with non-zero fractional part over a common denominator.
    BothFractional,
    /// One fractional shift, one non-negative integer shift.
    MixedShifts,
    /// The guarded form that covers all three cases above.
    Unified,
    /// Difference of digamma values assembled from Gauss sums and exact
    /// recurrence terms, each shift over its own denominator.
    DigammaRecurrence,
    /// Partial-fraction reduction of a product with three or more factors.
    PartialFractions,
    /// Brute-force truncation.
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::IntegerShifts => "integer-shifts",
            Method::BothFractional => "both-fractional",
            Method::MixedShifts => "mixed-shifts",
            Method::Unified => "unified",
            Method::DigammaRecurrence => "digamma-recurrence",
            Method::PartialFractions => "partial-fractions",
            Method::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

/// A closed-form value with the branch that produced it and an absolute
/// error bound.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub value: RealHP,
    pub method: Method,
    pub error_bound: f64,
    /// Set when the value is an exact rational.
    pub exact: Option<Rational>,
}

impl EvalResult {
    fn exact(r: Rational, method: Method, bits: usize) -> Result<Self> {
        let value = RealHP::from_rational(&r, bits)?;
        let error_bound = op_error(bits) * r.to_f64().abs();
        Ok(Self {
            value,
            method,
            error_bound,
            exact: Some(r),
        })
    }

    /// Whether `self` and `other` agree within their combined budgets.
    pub fn agrees_with(&self, other: &EvalResult) -> bool {
        self.value.abs_diff(&other.value) <= self.error_bound + other.error_bound
    }
}

/// `(H_b - H_a)/(b - a)` for distinct non-negative integers.
pub fn pair_sum_int(a: i64, b: i64) -> Result<Rational> {
    if a < 0 || b < 0 {
        return Err(Error::InvalidInput(format!(
            "integer shifts must be non-negative, got {a} and {b}"
        )));
    }
    if a == b {
        return Err(Error::EqualShifts(a.to_string()));
    }
    let diff = harmonic(b as u64) - harmonic(a as u64);
    Ok(diff / Rational::from(b - a))
}

fn shift_value(a: i64, x: u64, w: u64) -> Result<Rational> {
    Rational::new(BigInt::from(a) * BigInt::from(w) + BigInt::from(x), BigInt::from(w))
}

fn check_fraction(name: &str, x: u64, w: u64, allow_zero: bool) -> Result<()> {
    if w == 0 {
        return Err(Error::ZeroDenominator);
    }
    if x >= w || (!allow_zero && x == 0) {
        let range = if allow_zero { "0 <= x < w" } else { "0 < x < w" };
        return Err(Error::InvalidInput(format!("{name}={x} violates {range} with w={w}")));
    }
    Ok(())
}

/// `w/(x + wa - y - wb)` as an exact rational; zero denominator means equal shifts.
fn prefactor(a: i64, x: u64, b: i64, y: u64, w: u64) -> Result<Rational> {
    let (wb, xb, yb) = (BigInt::from(w), BigInt::from(x), BigInt::from(y));
    let diff = &xb + &wb * BigInt::from(a) - &yb - &wb * BigInt::from(b);
    if diff == BigInt::from(0) {
        return Err(Error::EqualShifts(shift_value(a, x, w)?.to_string()));
    }
    Rational::new(wb, diff)
}

/// Scales a bracket by the exact prefactor and packages the result.
fn finish(
    ctx: &mut Ctx,
    bracket: BigFloat,
    bracket_budget: f64,
    factor: &Rational,
    method: Method,
    bits: usize,
) -> EvalResult {
    let f = ctx.rational(factor);
    let v = ctx.mul(&f, &bracket);
    let factor_abs = factor.to_f64().abs();
    let error_bound = factor_abs * bracket_budget * (1.0 + op_error(ctx.bits()))
        + 4.0 * op_error(ctx.bits()) * big_to_f64(&v).abs();
    EvalResult {
        value: ctx.finish(v, bits),
        method,
        error_bound,
        exact: None,
    }
}

/// Both shifts `a + x/w` and `b + y/w` with `0 < x, y < w`:
///
/// ```text
/// w/(x + wa - y - wb) * [ (pi/2)(cot(pi y/w) - cot(pi x/w))
///     + sum_{n=1}^{w-1} ln(2 sin(pi n/w)) (cos(2 pi n x/w) - cos(2 pi n y/w))
///     + w/x - w/y + C(a, x, w) - C(b, y, w) ]
/// ```
pub fn pair_sum_fractional(a: i64, x: u64, b: i64, y: u64, w: u64, bits: usize) -> Result<EvalResult> {
    check_precision(bits)?;
    check_fraction("x", x, w, false)?;
    check_fraction("y", y, w, false)?;
    check_admissible(&shift_value(a, x, w)?)?;
    check_admissible(&shift_value(b, y, w)?)?;
    let factor = prefactor(a, x, b, y, w)?;

    let mut ctx = Ctx::new(bits);
    let mut table = TrigTable::new(w);
    let half_pi = ctx.div(ctx.pi(), &ctx.small(2));
    let cot_y = table.cot_pi_over(&mut ctx, y as i64);
    let cot_x = table.cot_pi_over(&mut ctx, x as i64);
    let cot_part = ctx.mul(&half_pi, &ctx.sub(&cot_y, &cot_x));

    let mut trig = ctx.small(0);
    let mut magnitude = 0.0;
    for n in 1..w {
        let l = table.log_two_sin(&mut ctx, n);
        let mx = ((n as u128 * x as u128) % w as u128) as i64;
        let my = ((n as u128 * y as u128) % w as u128) as i64;
        let cx = table.cos_two_pi_over(&mut ctx, mx);
        let cy = table.cos_two_pi_over(&mut ctx, my);
        let t = ctx.mul(&l, &ctx.sub(&cx, &cy));
        magnitude += 2.0 * big_to_f64(&l).abs();
        trig = ctx.add(&trig, &t);
    }

    let exact_part = Rational::from(w as i64) / Rational::from(x as i64)
        - Rational::from(w as i64) / Rational::from(y as i64)
        + correction_sum(a, x, w)?
        - correction_sum(b, y, w)?;
    let exact_big = ctx.rational(&exact_part);

    let bracket = ctx.add(&ctx.add(&cot_part, &trig), &exact_big);
    let wf = w as f64;
    let scale = big_to_f64(&cot_y).abs()
        + big_to_f64(&cot_x).abs()
        + 2.0 * wf * wf
        + magnitude
        + exact_part.to_f64().abs()
        + wf;
    let budget = 16.0 * op_error(ctx.bits()) * scale;
    Ok(finish(&mut ctx, bracket, budget, &factor, Method::BothFractional, bits))
}

/// One fractional shift `a + x/w` (`0 < x < w`) and one integer shift `b >= 0`:
///
/// ```text
/// w/(x + wa - wb) * [ -(pi/2) cot(pi x/w) - ln w
///     + sum_{n=1}^{w-1} ln(2 sin(pi n/w)) cos(2 pi n x/w)
///     + w/x + C(a, x, w) - H_b ]
/// ```
pub fn pair_sum_mixed(a: i64, x: u64, w: u64, b: i64, bits: usize) -> Result<EvalResult> {
    check_precision(bits)?;
    check_fraction("x", x, w, false)?;
    if b < 0 {
        return Err(Error::InvalidInput(format!("integer shift b={b} must be non-negative")));
    }
    check_admissible(&shift_value(a, x, w)?)?;
    let factor = prefactor(a, x, b, 0, w)?;

    let mut ctx = Ctx::new(bits);
    let mut table = TrigTable::new(w);
    let parts = gauss_parts(&mut ctx, &mut table, x);
    let exact_part = Rational::from(w as i64) / Rational::from(x as i64) + correction_sum(a, x, w)?
        - harmonic(b as u64);
    let exact_big = ctx.rational(&exact_part);
    let bracket = ctx.add(
        &ctx.add(&ctx.add(&parts.cot_term, &parts.log_term), &parts.trig_sum),
        &exact_big,
    );
    let budget = parts.budget + 8.0 * op_error(ctx.bits()) * (exact_part.to_f64().abs() + big_to_f64(&bracket).abs());
    Ok(finish(&mut ctx, bracket, budget, &factor, Method::MixedShifts, bits))
}

/// `Psi(1 + a + x/w)` over the table's denominator, guarded for `x = 0`:
/// the transcendental group is present only when `x > 0`, and the correction
/// then reduces to `H_a`.
fn guarded_psi(ctx: &mut Ctx, table: &mut TrigTable, a: i64, x: u64) -> Result<(BigFloat, f64)> {
    let w = table.w();
    let correction = correction_sum(a, x, w)?;
    if x == 0 {
        let v = ctx.rational(&correction);
        let budget = op_error(ctx.bits()) * correction.to_f64().abs();
        return Ok((v, budget));
    }
    let (g, g_budget) = gauss_value(ctx, table, x);
    let exact_part = Rational::from(w as i64) / Rational::from(x as i64) + correction;
    let exact_big = ctx.rational(&exact_part);
    let v = ctx.add(&g, &exact_big);
    let budget = g_budget + 4.0 * op_error(ctx.bits()) * (exact_part.to_f64().abs() + big_to_f64(&v).abs());
    Ok((v, budget))
}

/// The unified form for `0 <= x, y < w`. Every term that would divide by
/// `x` or `y`, or take `cot(0)`, is present only when its guard is non-zero.
pub fn pair_sum_unified(a: i64, x: u64, b: i64, y: u64, w: u64, bits: usize) -> Result<EvalResult> {
    check_precision(bits)?;
    check_fraction("x", x, w, true)?;
    check_fraction("y", y, w, true)?;
    check_admissible(&shift_value(a, x, w)?)?;
    check_admissible(&shift_value(b, y, w)?)?;
    let factor = prefactor(a, x, b, y, w)?;

    let mut ctx = Ctx::new(bits);
    let mut table = TrigTable::new(w);
    let (psi_x, bx) = guarded_psi(&mut ctx, &mut table, a, x)?;
    let (psi_y, by) = guarded_psi(&mut ctx, &mut table, b, y)?;
    let bracket = ctx.sub(&psi_x, &psi_y);
    let budget = bx + by + op_error(ctx.bits()) * big_to_f64(&bracket).abs();
    Ok(finish(&mut ctx, bracket, budget, &factor, Method::Unified, bits))
}

/// `Psi(1 + q) = psi(1 + q) + gamma` over `q`'s own denominator, or `None`
/// when `q` is an integer (then it is the exact harmonic number).
fn psi_one_plus(ctx: &mut Ctx, q: &Rational) -> Result<(Option<(BigFloat, f64)>, Rational)> {
    let d = decompose(q);
    let (a, x, w) = d.to_machine()?;
    if x == 0 {
        // q >= 0 here by admissibility.
        return Ok((None, harmonic(a as u64)));
    }
    let mut table = TrigTable::new(w);
    let (g, budget) = gauss_value(ctx, &mut table, x);
    let exact = Rational::from(w as i64) / Rational::from(x as i64) + correction_sum(a, x, w)?;
    Ok((Some((g, budget)), exact))
}

/// `(Psi(1 + q2) - Psi(1 + q1)) / (q2 - q1)`, each digamma value assembled
/// separately over its own denominator.
pub fn pair_sum_digamma(q1: &Rational, q2: &Rational, bits: usize) -> Result<EvalResult> {
    check_precision(bits)?;
    check_admissible(q1)?;
    check_admissible(q2)?;
    if q1 == q2 {
        return Err(Error::EqualShifts(q1.to_string()));
    }
    let factor = (q2 - q1).recip()?;
    let mut ctx = Ctx::new(bits);
    let (t1, e1) = psi_one_plus(&mut ctx, q1)?;
    let (t2, e2) = psi_one_plus(&mut ctx, q2)?;
    let exact_diff = e2 - e1;
    if t1.is_none() && t2.is_none() {
        let mut r = EvalResult::exact(exact_diff * factor, Method::DigammaRecurrence, bits)?;
        r.exact.get_or_insert_with(Rational::zero);
        return Ok(r);
    }
    let zero = (ctx.small(0), 0.0);
    let (g1, b1) = t1.unwrap_or_else(|| zero.clone());
    let (g2, b2) = t2.unwrap_or(zero);
    let exact_big = ctx.rational(&exact_diff);
    let bracket = ctx.add(&ctx.sub(&g2, &g1), &exact_big);
    let budget = b1 + b2 + 4.0 * op_error(ctx.bits()) * (exact_diff.to_f64().abs() + big_to_f64(&bracket).abs());
    Ok(finish(&mut ctx, bracket, budget, &factor, Method::DigammaRecurrence, bits))
}

/// Dispatches to the closed form matching the shifts' integrality:
/// both integral, both fractional (over `lcm` of the denominators), or mixed
/// (arguments swapped so the fractional shift comes first).
pub fn pair_sum(q1: &Rational, q2: &Rational, bits: usize) -> Result<EvalResult> {
    check_precision(bits)?;
    check_admissible(q1)?;
    check_admissible(q2)?;
    if q1 == q2 {
        return Err(Error::EqualShifts(q1.to_string()));
    }
    match (q1.is_integer(), q2.is_integer()) {
        (true, true) => {
            let (a, _, _) = decompose(q1).to_machine()?;
            let (b, _, _) = decompose(q2).to_machine()?;
            EvalResult::exact(pair_sum_int(a, b)?, Method::IntegerShifts, bits)
        }
        (false, false) => {
            let w = q1.denom().lcm(q2.denom());
            let (a, x, w) = decompose_over(q1, &w)?.to_machine()?;
            let (b, y, _) = decompose_over(q2, &BigInt::from(w))?.to_machine()?;
            pair_sum_fractional(a, x, b, y, w, bits)
        }
        (false, true) | (true, false) => {
            let (frac, int) = if q1.is_integer() { (q2, q1) } else { (q1, q2) };
            let (a, x, w) = decompose(frac).to_machine()?;
            let (b, _, _) = decompose(int).to_machine()?;
            pair_sum_mixed(a, x, w, b, bits)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    const BITS: usize = 128;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn zeta2_example(w: u64) -> f64 {
        let wf = w as f64;
        wf * (wf / 2.0 - PI / 2.0 / (PI / wf).tan())
    }

    #[test]
    fn integer_examples() {
        assert_eq!(pair_sum_int(0, 1).unwrap(), Rational::one());
        assert_eq!(pair_sum_int(1, 3).unwrap(), r(5, 12));
        assert!(matches!(pair_sum_int(2, 2), Err(Error::EqualShifts(_))));
        assert!(matches!(pair_sum_int(-1, 2), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn fractional_reproduces_zeta2_example() {
        for w in [2u64, 3, 5, 7, 16, 50] {
            let v = pair_sum_fractional(-1, w - 1, 0, 1, w, BITS).unwrap();
            assert_eq!(v.method, Method::BothFractional);
            assert!((v.value.to_f64() - zeta2_example(w)).abs() < 1e-12 * zeta2_example(w), "w={w}");
        }
    }

    #[test]
    fn fractional_telescoping_half_shifts() {
        let v = pair_sum_fractional(-1, 1, 0, 1, 2, BITS).unwrap();
        assert!(v.value.abs_diff(&RealHP::from_f64(2.0, BITS).unwrap()) < 1e-30);
    }

    #[test]
    fn fractional_agrees_with_digamma_route() {
        let p = pair_sum_fractional(0, 1, 0, 3, 4, BITS).unwrap();
        let d = pair_sum_digamma(&r(1, 4), &r(3, 4), BITS).unwrap();
        assert!(p.agrees_with(&d), "{:?} vs {:?}", p.value, d.value);
    }

    #[test]
    fn fractional_rejects_bad_input() {
        assert!(matches!(pair_sum_fractional(0, 1, 0, 1, 4, BITS), Err(Error::EqualShifts(_))));
        assert!(pair_sum_fractional(0, 0, 0, 1, 4, BITS).is_err());
        assert!(matches!(
            pair_sum_fractional(-2, 1, 0, 1, 4, BITS),
            Err(Error::ShiftBelowMinusOne(_))
        ));
    }

    #[test]
    fn mixed_examples() {
        let v = pair_sum_mixed(0, 1, 2, 0, BITS).unwrap();
        assert!((v.value.to_f64() - (4.0 - 4.0 * LN_2)).abs() < 1e-14);
        let v1 = pair_sum_mixed(0, 1, 2, 1, BITS).unwrap();
        let d1 = pair_sum_digamma(&r(1, 2), &r(1, 1), BITS).unwrap();
        assert!(v1.agrees_with(&d1));
        assert!(pair_sum_mixed(0, 1, 2, -1, BITS).is_err());
    }

    #[test]
    fn digamma_route_examples() {
        let v = pair_sum_digamma(&r(0, 1), &r(1, 1), BITS).unwrap();
        assert_eq!(v.exact, Some(Rational::one()));
        let v = pair_sum_digamma(&r(-1, 2), &r(1, 2), BITS).unwrap();
        assert!((v.value.to_f64() - 2.0).abs() < 1e-15);
        assert!(pair_sum_digamma(&r(1, 3), &r(1, 3), BITS).is_err());
    }

    #[test]
    fn dispatcher_examples() {
        let v = pair_sum(&r(2, 1), &r(5, 1), BITS).unwrap();
        assert_eq!(v.method, Method::IntegerShifts);
        assert_eq!(v.exact, Some(r(47, 180)));
        let v = pair_sum(&r(-1, 7), &r(1, 7), BITS).unwrap();
        assert_eq!(v.method, Method::BothFractional);
        assert!((v.value.to_f64() - zeta2_example(7)).abs() < 1e-13);
        assert!(matches!(pair_sum(&r(1, 2), &r(1, 2), BITS), Err(Error::EqualShifts(_))));
        assert!(matches!(pair_sum(&r(-1, 1), &r(1, 2), BITS), Err(Error::NegativeIntegerShift(_))));
        assert!(matches!(pair_sum(&r(-5, 4), &r(1, 2), BITS), Err(Error::ShiftBelowMinusOne(_))));
        let v = pair_sum(&r(3, 1), &r(1, 3), BITS).unwrap();
        assert_eq!(v.method, Method::MixedShifts);
    }

    #[test]
    fn dispatcher_uses_common_denominator() {
        let v = pair_sum(&r(-1, 6), &r(3, 4), BITS).unwrap();
        let d = pair_sum_digamma(&r(-1, 6), &r(3, 4), BITS).unwrap();
        assert_eq!(v.method, Method::BothFractional);
        assert!(v.agrees_with(&d));
    }

    #[test]
    fn symmetric_in_arguments() {
        let cases = [(r(2, 1), r(5, 1)), (r(-1, 3), r(5, 2)), (r(7, 1), r(-2, 5)), (r(1, 8), r(3, 8))];
        for (q1, q2) in cases {
            let a = pair_sum(&q1, &q2, BITS).unwrap();
            let b = pair_sum(&q2, &q1, BITS).unwrap();
            match (&a.exact, &b.exact) {
                (Some(x), Some(y)) => assert_eq!(x, y),
                _ => assert!(a.agrees_with(&b)),
            }
        }
    }

    #[test]
    fn unified_reproduces_each_branch() {
        // x = y = 0: integer branch.
        let u = pair_sum_unified(3, 0, 1, 0, 5, BITS).unwrap();
        let exact = pair_sum_int(3, 1).unwrap();
        assert!(u.value.abs_diff(&RealHP::from_rational(&exact, BITS).unwrap()) <= u.error_bound);
        // 0 < x, y < w: both-fractional branch.
        let u = pair_sum_unified(-1, 4, 2, 1, 5, BITS).unwrap();
        let f = pair_sum_fractional(-1, 4, 2, 1, 5, BITS).unwrap();
        assert!(u.agrees_with(&f));
        // y = 0: mixed branch.
        let u = pair_sum_unified(1, 2, 3, 0, 7, BITS).unwrap();
        let m = pair_sum_mixed(1, 2, 7, 3, BITS).unwrap();
        assert!(u.agrees_with(&m));
        assert_eq!(u.method, Method::Unified);
    }

    #[test]
    fn integer_limit_is_approached_monotonically() {
        for b in [1i64, 3, 5] {
            let target = pair_sum_int(0, b).unwrap().to_f64();
            let mut last = f64::INFINITY;
            let mut w = 2i64;
            while w <= 256 {
                let v = pair_sum(&r(1, w), &r(b, 1), BITS).unwrap().value.to_f64();
                let gap = (v - target).abs();
                assert!(gap < last, "b={b} w={w} gap={gap} last={last}");
                last = gap;
                w *= 2;
            }
            assert!(last < 0.01, "b={b} final gap {last}");
        }
    }
}
