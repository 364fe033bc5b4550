//! Digamma at rational arguments through Gauss's finite formula.
//!
//! For `0 < p < q`,
//!
//! ```text
//! sum_{n>=0} (1/(n+1) - q/(p+nq))
//!     = -(pi/2) cot(pi p/q) - ln q + sum_{n=1}^{q-1} ln(2 sin(pi n/q)) cos(2 pi n p/q)
//! ```
//!
//! which is `psi(p/q) + gamma`. The left-hand side is also available as a
//! brute-force truncated series, used as the conformance oracle.

use crate::error::{Error, Result};
use crate::hp::{big_to_f64, op_error, Ctx, RealHP, TrigTable};
use crate::oracle::{CompensatedSum, TruncationReport};
use crate::rational::{check_precision, decompose, harmonic, Rational};

use astro_float::BigFloat;

/// The three term groups of the Gauss formula, kept apart so that identities
/// between them can be checked directly.
#[derive(Debug, Clone)]
pub struct GaussTerms {
    /// `-(pi/2) cot(pi p/q)`
    pub cot_term: RealHP,
    /// `-ln q`
    pub log_term: RealHP,
    /// `sum_{n=1}^{q-1} ln(2 sin(pi n/q)) cos(2 pi n p/q)`
    pub trig_sum: RealHP,
}

impl GaussTerms {
    pub fn total(&self) -> RealHP {
        self.cot_term.add(&self.log_term).add(&self.trig_sum)
    }
}

fn check_args(p: u64, q: u64) -> Result<()> {
    if p == 0 || p >= q {
        return Err(Error::InvalidInput(format!(
            "Gauss digamma sum needs 0 < p < q, got p={p}, q={q}"
        )));
    }
    Ok(())
}

pub(crate) struct GaussParts {
    pub cot_term: BigFloat,
    pub log_term: BigFloat,
    pub trig_sum: BigFloat,
    pub budget: f64,
}

/// Term groups of the Gauss formula at the context precision, with an
/// absolute rounding budget. `table` must be built for denominator `q`.
pub(crate) fn gauss_parts(ctx: &mut Ctx, table: &mut TrigTable, p: u64) -> GaussParts {
    let q = table.w();
    let half_pi = ctx.div(ctx.pi(), &ctx.small(2));
    let cot = table.cot_pi_over(ctx, p as i64);
    let cot_term = ctx.mul(&half_pi, &cot).neg();
    let log_term = ctx.ln(&BigFloat::from_u64(q, ctx.bits())).neg();
    let (trig_sum, magnitude) = table.log_sine_cos_sum(ctx, p);

    // First-order budget at 4 ulp per operation. The cot term is amplified
    // by 1/sin^2 of its argument, bounded by q^2/4 on (pi/q, pi - pi/q).
    let qf = q as f64;
    let scale = big_to_f64(&cot_term).abs() + qf * qf + qf.ln() + magnitude + qf;
    let budget = 16.0 * op_error(ctx.bits()) * scale;
    GaussParts {
        cot_term,
        log_term,
        trig_sum,
        budget,
    }
}

/// `psi(p/q) + gamma` with its rounding budget, at the context precision.
pub(crate) fn gauss_value(ctx: &mut Ctx, table: &mut TrigTable, p: u64) -> (BigFloat, f64) {
    let parts = gauss_parts(ctx, table, p);
    let v = ctx.add(&ctx.add(&parts.cot_term, &parts.log_term), &parts.trig_sum);
    let budget = parts.budget + 4.0 * op_error(ctx.bits()) * big_to_f64(&v).abs();
    (v, budget)
}

/// Gauss's closed form for `sum_{n>=0} (1/(n+1) - q/(p+nq)) = psi(p/q) + gamma`.
///
/// `p/q` is not reduced first; `(2, 4)` and `(1, 2)` give the same value.
pub fn gauss_sum(p: u64, q: u64, precision_bits: usize) -> Result<RealHP> {
    Ok(gauss_sum_with_budget(p, q, precision_bits)?.0)
}

/// [`gauss_sum`] plus its absolute rounding budget.
pub fn gauss_sum_with_budget(p: u64, q: u64, precision_bits: usize) -> Result<(RealHP, f64)> {
    check_args(p, q)?;
    check_precision(precision_bits)?;
    let mut ctx = Ctx::new(precision_bits);
    let mut table = TrigTable::new(q);
    let (v, budget) = gauss_value(&mut ctx, &mut table, p);
    Ok((ctx.finish(v, precision_bits), budget))
}

/// The separated term groups of [`gauss_sum`].
pub fn gauss_terms(p: u64, q: u64, precision_bits: usize) -> Result<GaussTerms> {
    check_args(p, q)?;
    check_precision(precision_bits)?;
    let mut ctx = Ctx::new(precision_bits);
    let mut table = TrigTable::new(q);
    let parts = gauss_parts(&mut ctx, &mut table, p);
    Ok(GaussTerms {
        cot_term: ctx.finish(parts.cot_term, precision_bits),
        log_term: ctx.finish(parts.log_term, precision_bits),
        trig_sum: ctx.finish(parts.trig_sum, precision_bits),
    })
}

/// The same series started at `n = 1`: `gauss_sum(p, q) - 1 + q/p`.
pub fn gauss_sum_shifted(p: u64, q: u64, precision_bits: usize) -> Result<RealHP> {
    check_args(p, q)?;
    check_precision(precision_bits)?;
    let mut ctx = Ctx::new(precision_bits);
    let mut table = TrigTable::new(q);
    let (g, _) = gauss_value(&mut ctx, &mut table, p);
    let q_over_p = ctx.div(&BigFloat::from_u64(q, ctx.bits()), &BigFloat::from_u64(p, ctx.bits()));
    let v = ctx.add(&ctx.sub(&g, &ctx.small(1)), &q_over_p);
    Ok(ctx.finish(v, precision_bits))
}

/// `psi(r) + gamma` for any rational `r > 0`: the Gauss formula on the
/// fractional part plus the exact recurrence `psi(x + 1) = psi(x) + 1/x`.
/// Integer arguments give `H_{r-1}` exactly.
pub fn digamma_plus_gamma(r: &Rational, precision_bits: usize) -> Result<(RealHP, f64)> {
    check_precision(precision_bits)?;
    if r.is_negative() || r.is_zero() {
        return Err(Error::InvalidInput(format!("digamma argument must be positive, got {r}")));
    }
    let (a, x, w) = decompose(r).to_machine()?;
    let mut ctx = Ctx::new(precision_bits);
    if x == 0 {
        let h = harmonic(a as u64 - 1);
        let v = ctx.rational(&h);
        return Ok((ctx.finish(v, precision_bits), op_error(ctx.bits()) * h.to_f64()));
    }
    let frac = Rational::new(x as i64, w as i64)?;
    let mut steps = Rational::zero();
    for j in 0..a {
        steps = steps + (&frac + &Rational::from(j)).recip()?;
    }
    let mut table = TrigTable::new(w);
    let (g, g_budget) = gauss_value(&mut ctx, &mut table, x);
    let s = ctx.rational(&steps);
    let v = ctx.add(&g, &s);
    let budget = g_budget + 4.0 * op_error(ctx.bits()) * (steps.to_f64() + big_to_f64(&v).abs());
    Ok((ctx.finish(v, precision_bits), budget))
}

/// Brute-force partial sum `sum_{n=0}^{N-1} (1/(n+1) - q/(p+nq))`.
///
/// Every term is `(p-q)/((n+1)(p+nq)) < 0`, so the tail is negative. Its
/// magnitude lies between `(q-p)/(q(N+1))` and `(q-p)/(qN)`; the reported
/// `tail_low`/`tail_high` are those signed bounds. The looser classical bound
/// `(q/p)/N` is available from [`conservative_tail_bound`].
pub fn series_oracle(p: u64, q: u64, terms: u64) -> Result<TruncationReport> {
    check_args(p, q)?;
    if terms == 0 {
        return Err(Error::InvalidInput("oracle needs at least one term".into()));
    }
    let qf = q as f64;
    let numerator = p as f64 - qf;
    let mut sum = CompensatedSum::new();
    for n in 0..terms {
        let d1 = (n + 1) as f64;
        let d2 = (p as u128 + n as u128 * q as u128) as f64;
        sum.add(numerator / (d1 * d2));
    }
    // Each term carries at most 3 roundings (the integer factors convert
    // exactly below 2^53).
    let per_term = 3.0 * f64::EPSILON / 2.0;
    let rounding = per_term * sum.abs_total() + sum.error_bound();
    let gap = (qf - p as f64) / qf;
    let nf = terms as f64;
    let slack = 1.0 + 4.0 * f64::EPSILON;
    let tail_low = -(gap / nf) * slack;
    let tail_high = -(gap / (nf + 1.0)) / slack;
    Ok(TruncationReport::new(sum.value(), rounding, tail_low, tail_high, terms))
}

/// `(q/p)/N`, which dominates the magnitude of the oracle's tail.
pub fn conservative_tail_bound(p: u64, q: u64, terms: u64) -> f64 {
    (q as f64 / p as f64) / terms as f64
}
