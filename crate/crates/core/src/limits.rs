//! The `w -> infinity` constructions for `zeta(2)` and `zeta(4)`.
//!
//! With shifts `-1/w, 1/w` the pair series equals
//! `w (w/2 - (pi/2) cot(pi/w))`; with `+-1/w, +-2/w` the four-factor series
//! equals `(w^3/24) [pi (4 cot(pi/w) - 2 cot(2pi/w)) - 3w]`. Both tend to the
//! zeta value like `c/w^2`, which makes Richardson extrapolation in
//! `h = 1/w^2` effective.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::hp::{big_to_f64, op_error, Ctx, RealHP, TrigTable};
use crate::multifactor::zeta4_closed_form_with_budget;
use crate::rational::{check_precision, Rational};

/// Which zeta value a sequence targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZetaTarget {
    Zeta2,
    Zeta4,
}

impl ZetaTarget {
    pub fn from_s(s: u32) -> Result<Self> {
        match s {
            2 => Ok(ZetaTarget::Zeta2),
            4 => Ok(ZetaTarget::Zeta4),
            _ => Err(Error::InvalidInput(format!("zeta construction exists only for s = 2 or 4, got {s}"))),
        }
    }

    pub fn s(self) -> u32 {
        match self {
            ZetaTarget::Zeta2 => 2,
            ZetaTarget::Zeta4 => 4,
        }
    }

    /// Smallest `w` whose shifts stay above -1.
    pub fn min_w(self) -> u64 {
        match self {
            ZetaTarget::Zeta2 => 2,
            ZetaTarget::Zeta4 => 3,
        }
    }

    /// Sequence element at `w` with its absolute rounding budget.
    pub fn term(self, w: u64, precision_bits: usize) -> Result<(RealHP, f64)> {
        match self {
            ZetaTarget::Zeta2 => zeta2_term_with_budget(w, precision_bits),
            ZetaTarget::Zeta4 => zeta4_closed_form_with_budget(w, precision_bits),
        }
    }

    /// `pi^2/6` or `pi^4/90`, evaluated directly.
    pub fn reference(self, precision_bits: usize) -> Result<RealHP> {
        check_precision(precision_bits)?;
        let ctx = Ctx::new(precision_bits);
        let pi2 = ctx.mul(ctx.pi(), ctx.pi());
        let v = match self {
            ZetaTarget::Zeta2 => ctx.div(&pi2, &ctx.small(6)),
            ZetaTarget::Zeta4 => ctx.div(&ctx.mul(&pi2, &pi2), &ctx.small(90)),
        };
        Ok(ctx.finish(v, precision_bits))
    }
}

impl fmt::Display for ZetaTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zeta({})", self.s())
    }
}

/// `w (w/2 - (pi/2) cot(pi/w))` for `w >= 2`.
pub fn zeta2_term(w: u64, precision_bits: usize) -> Result<RealHP> {
    Ok(zeta2_term_with_budget(w, precision_bits)?.0)
}

/// [`zeta2_term`] with an absolute rounding budget. About `2 log2 w` bits
/// cancel between `w^2/2` and the cotangent term.
pub fn zeta2_term_with_budget(w: u64, precision_bits: usize) -> Result<(RealHP, f64)> {
    check_precision(precision_bits)?;
    if w < 2 {
        return Err(Error::InvalidInput(format!("zeta(2) construction needs w >= 2, got {w}")));
    }
    let log_w = (w as f64).log2().ceil() as usize;
    let mut ctx = Ctx::new(precision_bits + 2 * log_w + 16);
    let mut table = TrigTable::new(w);
    let w_big = ctx.small(w as i64);
    let cot = table.cot_pi_over(&mut ctx, 1);
    let half_pi_cot = ctx.div(&ctx.mul(ctx.pi(), &cot), &ctx.small(2));
    let half_w = ctx.div(&w_big, &ctx.small(2));
    let v = ctx.mul(&w_big, &ctx.sub(&half_w, &half_pi_cot));

    let wf = w as f64;
    let budget = 16.0 * op_error(ctx.bits()) * wf * wf + 4.0 * op_error(ctx.bits()) * big_to_f64(&v).abs();
    Ok((ctx.finish(v, precision_bits), budget))
}

/// `(w^3/24) [pi (4 cot(pi/w) - 2 cot(2pi/w)) - 3w]` for `w >= 3`.
pub fn zeta4_term(w: u64, precision_bits: usize) -> Result<RealHP> {
    crate::multifactor::zeta4_closed_form(w, precision_bits)
}

/// How fast the raw sequence approaches its limit, read off from the ratio
/// of successive differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderEstimate {
    /// Exponent `p` in `T(w) - L ~ c / w^p`.
    Measured(f64),
    /// Differences have reached the rounding floor.
    Saturated,
    /// Too few terms, or the grid is not geometric.
    Unknown,
}

/// Outcome of extrapolating a `w` sequence.
#[derive(Debug, Clone)]
pub struct LimitEstimate {
    pub raw_terms: Vec<(u64, RealHP)>,
    pub extrapolated: RealHP,
    pub order: usize,
    pub order_estimate: OrderEstimate,
    /// `|extrapolated - extrapolation of one order less|`; zero at order 0.
    pub difference_estimate: f64,
    pub target: Option<ZetaTarget>,
    /// Distance from the directly evaluated zeta value, when the target is known.
    pub target_hint: Option<f64>,
}

/// Evaluates the sequence at every `w` in `grid` and extrapolates.
pub fn zeta_limit(target: ZetaTarget, grid: &[u64], order: usize, precision_bits: usize) -> Result<LimitEstimate> {
    let mut terms = Vec::with_capacity(grid.len());
    for &w in grid {
        if w < target.min_w() {
            return Err(Error::InvalidInput(format!("{target} needs w >= {}, got {w}", target.min_w())));
        }
        terms.push((w, target.term(w, precision_bits)?.0));
    }
    let mut est = richardson(&terms, order)?;
    est.target_hint = Some(est.extrapolated.abs_diff(&target.reference(precision_bits)?));
    est.target = Some(target);
    Ok(est)
}

/// Richardson extrapolation of `(w, T(w))` pairs assuming an error expansion
/// in even powers of `1/w`.
pub fn richardson(terms: &[(u64, RealHP)], order: usize) -> Result<LimitEstimate> {
    let extrapolated = extrapolate(terms, order)?;
    let difference_estimate = if order > 0 {
        extrapolated.abs_diff(&extrapolate(terms, order - 1)?)
    } else {
        0.0
    };
    Ok(LimitEstimate {
        raw_terms: terms.to_vec(),
        extrapolated,
        order,
        order_estimate: estimate_order(terms),
        difference_estimate,
        target: None,
        target_hint: None,
    })
}

/// Polynomial extrapolation to `h = 0` in `h = 1/w^2` through the last
/// `order + 1` terms (Neville's scheme). Eliminates the `1/w^2, ..., 1/w^(2 order)`
/// error terms.
pub fn extrapolate(terms: &[(u64, RealHP)], order: usize) -> Result<RealHP> {
    if terms.len() < order + 1 {
        return Err(Error::InvalidInput(format!(
            "order {order} extrapolation needs {} terms, got {}",
            order + 1,
            terms.len()
        )));
    }
    let used = &terms[terms.len() - order - 1..];
    let bits = used.iter().map(|(_, v)| v.precision_bits()).min().unwrap_or(64);
    let mut ctx = Ctx::new(bits + 16);
    let mut h = Vec::with_capacity(used.len());
    for (w, _) in used {
        if *w == 0 {
            return Err(Error::InvalidInput("w must be positive".into()));
        }
        let w = BigInt::from(*w);
        h.push(Rational::new(1, &w * &w)?);
    }
    for i in 0..h.len() {
        for j in i + 1..h.len() {
            if h[i] == h[j] {
                return Err(Error::InvalidInput(format!("repeated w = {} in extrapolation grid", used[i].0)));
            }
        }
    }
    let mut p: Vec<_> = used.iter().map(|(_, v)| v.big().clone()).collect();
    for m in 1..h.len() {
        for i in 0..h.len() - m {
            let j = i + m;
            // P[i..j](0) = (h_i P[i+1..j] - h_j P[i..j-1]) / (h_i - h_j)
            let hi = ctx.rational(&h[i]);
            let hj = ctx.rational(&h[j]);
            let den = ctx.rational(&(&h[i] - &h[j]));
            let num = ctx.sub(&ctx.mul(&hi, &p[i + 1]), &ctx.mul(&hj, &p[i]));
            p[i] = ctx.div(&num, &den);
        }
    }
    Ok(ctx.finish(p.swap_remove(0), bits))
}

fn estimate_order(terms: &[(u64, RealHP)]) -> OrderEstimate {
    if terms.len() < 3 {
        return OrderEstimate::Unknown;
    }
    let n = terms.len();
    let (w0, t0) = &terms[n - 3];
    let (w1, t1) = &terms[n - 2];
    let (w2, t2) = &terms[n - 1];
    let r01 = *w1 as f64 / *w0 as f64;
    let r12 = *w2 as f64 / *w1 as f64;
    if (r01 - r12).abs() > 1e-12 * r01 || r01 <= 1.0 {
        return OrderEstimate::Unknown;
    }
    let d1 = t0.abs_diff(t1);
    let d2 = t1.abs_diff(t2);
    let floor = 64.0 * op_error(t2.precision_bits()) * t2.to_f64().abs();
    if d2 <= floor || d1 <= floor {
        return OrderEstimate::Saturated;
    }
    OrderEstimate::Measured((d1 / d2).ln() / r01.ln())
}

/// `log(|T(w_lo) - L| / |T(w_hi) - L|) / log(w_hi / w_lo)` against the
/// directly evaluated limit `L`.
pub fn convergence_order(target: ZetaTarget, w_lo: u64, w_hi: u64, precision_bits: usize) -> Result<f64> {
    if w_hi <= w_lo {
        return Err(Error::InvalidInput(format!("need w_hi > w_lo, got {w_lo} and {w_hi}")));
    }
    let reference = target.reference(precision_bits)?;
    let e_lo = target.term(w_lo, precision_bits)?.0.abs_diff(&reference);
    let e_hi = target.term(w_hi, precision_bits)?.0.abs_diff(&reference);
    Ok((e_lo / e_hi).ln() / (w_hi as f64 / w_lo as f64).ln())
}

/// Bernoulli numbers `B_0..=B_n` (with `B_1 = -1/2`).
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(Rational::one());
            continue;
        }
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut binom = BigInt::one();
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc = acc + Rational::from_integer(binom.clone()) * bj.clone();
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        let scale = Rational::new(-1, m as i64 + 1).expect("nonzero");
        b.push(scale * acc);
    }
    b
}

/// Laurent coefficients `c_k` of `cot x = sum_{k>=0} c_k x^(2k-1)`.
pub fn cot_coefficients(count: usize) -> Vec<Rational> {
    let b = bernoulli(2 * count);
    let mut fact = BigInt::one();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        if k > 0 {
            fact = fact * BigInt::from(2 * k - 1) * BigInt::from(2 * k);
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let pow = BigInt::one() << (2 * k);
        let c = Rational::from_integer(pow * sign) * b[2 * k].clone() * Rational::new(1, fact.clone()).expect("nonzero");
        out.push(c);
    }
    out
}

/// `coefficient * w^power`.
type PowerTerm = (i32, Rational);
/// `scale * pi * w^power * cot(multiple * pi / w)` as `(scale, multiple, power)`.
type CotTerm = (Rational, i64, i32);

/// The limit read off the small-angle expansion of the closed form.
#[derive(Debug, Clone)]
pub struct CotExpansion {
    /// `limit = coefficient * pi^pi_power`.
    pub coefficient: Rational,
    pub pi_power: u32,
    pub limit: RealHP,
    /// Coefficient of the leading `1/w^2` correction, times `pi^(pi_power + 2)`.
    pub leading_correction: Rational,
}

/// Expands the construction in powers of `w` using the Laurent series of
/// `cot`, checks that every growing power cancels, and evaluates the
/// constant term.
pub fn cot_expansion_limit(target: ZetaTarget, precision_bits: usize) -> Result<CotExpansion> {
    check_precision(precision_bits)?;
    // polynomial part: w^e -> coefficient
    // cotangent parts: A * pi * w^e * cot(m pi / w)
    let (poly, cots): (Vec<PowerTerm>, Vec<CotTerm>) = match target {
        ZetaTarget::Zeta2 => (vec![(2, Rational::new(1, 2)?)], vec![(Rational::new(-1, 2)?, 1, 1)]),
        ZetaTarget::Zeta4 => (
            vec![(4, Rational::new(-3, 24)?)],
            vec![(Rational::new(4, 24)?, 1, 3), (Rational::new(-2, 24)?, 2, 3)],
        ),
    };
    let c = cot_coefficients(6);
    // w power -> (pi power -> coefficient)
    let mut series: BTreeMap<i32, BTreeMap<u32, Rational>> = BTreeMap::new();
    let mut add = |wp: i32, pp: u32, v: Rational| {
        let e = series.entry(wp).or_default().entry(pp).or_insert_with(Rational::zero);
        *e = &*e + &v;
    };
    for (e, a) in poly {
        add(e, 0, a);
    }
    for (a, m, e) in cots {
        // pi * cot(m pi/w) = sum_k c_k m^(2k-1) pi^(2k) w^(1-2k)
        for (k, ck) in c.iter().enumerate() {
            let k32 = k as i32;
            let m_pow = if k == 0 {
                Rational::new(1, m)?
            } else {
                Rational::from_integer(BigInt::from(m).pow(2 * k as u32 - 1))
            };
            add(e + 1 - 2 * k32, 2 * k as u32, &a * &(ck * &m_pow));
        }
    }
    for (wp, by_pi) in series.range(1..) {
        if by_pi.values().any(|v| !v.is_zero()) {
            return Err(Error::InvalidInput(format!("w^{wp} terms do not cancel in {target} construction")));
        }
    }
    let constant: Vec<_> = series
        .get(&0)
        .map(|m| m.iter().filter(|(_, v)| !v.is_zero()).map(|(p, v)| (*p, v.clone())).collect())
        .unwrap_or_default();
    let [(pi_power, coefficient)] = constant.as_slice() else {
        return Err(Error::InvalidInput(format!("constant term of {target} construction is not a single power of pi")));
    };
    let leading_correction = series
        .get(&-2)
        .and_then(|m| m.get(&(pi_power + 2)).cloned())
        .unwrap_or_else(Rational::zero);

    let mut ctx = Ctx::new(precision_bits);
    let mut v = ctx.rational(coefficient);
    for _ in 0..*pi_power {
        v = ctx.mul(&v, ctx.pi());
    }
    Ok(CotExpansion {
        coefficient: coefficient.clone(),
        pi_power: *pi_power,
        limit: ctx.finish(v, precision_bits),
        leading_correction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const BITS: usize = 128;

    #[test]
    fn zeta2_small_cases() {
        assert!((zeta2_term(2, BITS).unwrap().to_f64() - 2.0).abs() < 1e-15);
        // w = 4: 4 (2 - pi/2)
        assert!((zeta2_term(4, BITS).unwrap().to_f64() - (8.0 - 2.0 * PI)).abs() < 1e-14);
        assert!(zeta2_term(1, BITS).is_err());
        assert!(zeta4_term(2, BITS).is_err());
    }

    #[test]
    fn sequences_decrease_to_their_limits() {
        for target in [ZetaTarget::Zeta2, ZetaTarget::Zeta4] {
            let limit = target.reference(BITS).unwrap().to_f64();
            let mut prev = f64::INFINITY;
            for w in [3u64, 4, 6, 8, 16, 32, 64, 128] {
                let t = target.term(w, BITS).unwrap().0.to_f64();
                assert!(t < prev && t > limit, "{target} w={w} t={t}");
                prev = t;
            }
        }
    }

    #[test]
    fn richardson_recovers_synthetic_limit() {
        let f = |w: u64| {
            let h = 1.0 / (w * w) as f64;
            RealHP::from_f64(1.25 + 3.0 * h - 7.0 * h * h, BITS).unwrap()
        };
        let terms: Vec<_> = [8u64, 16, 32].iter().map(|&w| (w, f(w))).collect();
        let v = extrapolate(&terms, 2).unwrap();
        assert!((v.to_f64() - 1.25).abs() < 1e-14, "{v}");
        let v1 = extrapolate(&terms, 1).unwrap();
        assert!((v1.to_f64() - 1.25).abs() > 1e-8);
    }

    #[test]
    fn richardson_of_constant_is_constant() {
        let c = RealHP::from_f64(0.5, BITS).unwrap();
        let terms: Vec<_> = [4u64, 8, 16, 32].iter().map(|&w| (w, c.clone())).collect();
        for order in 0..4 {
            let est = richardson(&terms, order).unwrap();
            assert!((est.extrapolated.to_f64() - 0.5).abs() < 1e-30);
            assert_eq!(est.order_estimate, OrderEstimate::Saturated);
        }
        assert!(richardson(&terms, 4).is_err());
    }

    #[test]
    fn richardson_rejects_repeated_grid() {
        let c = RealHP::from_f64(0.5, BITS).unwrap();
        let terms = vec![(4, c.clone()), (4, c)];
        assert!(richardson(&terms, 1).is_err());
    }

    #[test]
    fn extrapolated_limits() {
        let z2 = zeta_limit(ZetaTarget::Zeta2, &[16, 32, 64, 128], 3, BITS).unwrap();
        assert!(z2.target_hint.unwrap() < 1e-12, "{:?}", z2.target_hint);
        let z4 = zeta_limit(ZetaTarget::Zeta4, &[16, 32, 64, 128], 3, BITS).unwrap();
        assert!(z4.target_hint.unwrap() < 1e-10, "{:?}", z4.target_hint);
        for (z, t) in [(&z2, ZetaTarget::Zeta2), (&z4, ZetaTarget::Zeta4)] {
            let series = cot_expansion_limit(t, BITS).unwrap().limit;
            assert!(z.extrapolated.abs_diff(&series) < 1e-7);
        }
        match z2.order_estimate {
            OrderEstimate::Measured(p) => assert!((p - 2.0).abs() < 0.05, "{p}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn order_two_convergence() {
        for target in [ZetaTarget::Zeta2, ZetaTarget::Zeta4] {
            let p = convergence_order(target, 32, 256, BITS).unwrap();
            assert!((p - 2.0).abs() < 0.2, "{target} p={p}");
        }
    }

    #[test]
    fn bernoulli_and_cot_coefficients() {
        let b = bernoulli(6);
        assert_eq!(b[1], Rational::new(-1, 2).unwrap());
        assert_eq!(b[2], Rational::new(1, 6).unwrap());
        assert_eq!(b[4], Rational::new(-1, 30).unwrap());
        assert_eq!(b[6], Rational::new(1, 42).unwrap());
        let c = cot_coefficients(4);
        assert_eq!(c[0], Rational::one());
        assert_eq!(c[1], Rational::new(-1, 3).unwrap());
        assert_eq!(c[2], Rational::new(-1, 45).unwrap());
        assert_eq!(c[3], Rational::new(-2, 945).unwrap());
    }

    #[test]
    fn cot_expansion_gives_zeta_values() {
        let z2 = cot_expansion_limit(ZetaTarget::Zeta2, BITS).unwrap();
        assert_eq!((z2.coefficient.clone(), z2.pi_power), (Rational::new(1, 6).unwrap(), 2));
        assert_eq!(z2.leading_correction, Rational::new(1, 90).unwrap());
        let z4 = cot_expansion_limit(ZetaTarget::Zeta4, BITS).unwrap();
        assert_eq!((z4.coefficient.clone(), z4.pi_power), (Rational::new(1, 90).unwrap(), 4));
        assert!(!z4.leading_correction.is_zero());
        for (e, t) in [(z2, ZetaTarget::Zeta2), (z4, ZetaTarget::Zeta4)] {
            assert!(e.limit.abs_diff(&t.reference(BITS).unwrap()) < 1e-35);
        }
    }

    #[test]
    fn only_two_and_four() {
        assert!(ZetaTarget::from_s(3).is_err());
        assert!(ZetaTarget::from_s(6).is_err());
        assert_eq!(ZetaTarget::from_s(4).unwrap(), ZetaTarget::Zeta4);
    }

    #[test]
    fn zeta2_term_is_the_pair_series() {
        use crate::pairsum::pair_sum;
        for w in 2..=64i64 {
            let (t, tb) = zeta2_term_with_budget(w as u64, BITS).unwrap();
            let p = pair_sum(&Rational::new(-1, w).unwrap(), &Rational::new(1, w).unwrap(), BITS).unwrap();
            assert!(t.abs_diff(&p.value) <= tb + p.error_bound, "w={w}");
        }
    }

    #[test]
    fn zeta4_term_far_out() {
        let t = zeta4_term(100, BITS).unwrap().to_f64();
        assert!((t - PI.powi(4) / 90.0).abs() < 1e-2);
    }
}
