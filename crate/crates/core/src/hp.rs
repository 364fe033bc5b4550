//! High-precision reals on top of `astro-float`.
//!
//! Every trigonometric argument in this crate is a rational multiple of `pi`,
//! so sines and cosines come from a per-denominator table built with exact
//! integer argument reduction. Only `sin` on `[0, pi/2]` and `ln` ever reach
//! the backend.

use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::rational::{check_precision, Rational};

const RM: RoundingMode = RoundingMode::ToEven;

/// Extra bits carried internally on top of the requested precision.
pub(crate) const GUARD_BITS: usize = 32;

/// A finite high-precision real together with the precision it was requested at.
#[derive(Clone)]
pub struct RealHP {
    value: BigFloat,
    precision_bits: usize,
}

impl RealHP {
    pub(crate) fn new(value: BigFloat, precision_bits: usize) -> Self {
        debug_assert!(!value.is_nan() && !value.is_inf(), "non-finite RealHP");
        Self {
            value,
            precision_bits,
        }
    }

    pub fn from_rational(r: &Rational, precision_bits: usize) -> Result<Self> {
        check_precision(precision_bits)?;
        let mut ctx = Ctx::new(precision_bits);
        let v = ctx.rational(r);
        Ok(Self::new(v, precision_bits))
    }

    pub fn from_f64(v: f64, precision_bits: usize) -> Result<Self> {
        check_precision(precision_bits)?;
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite value {v}")));
        }
        Ok(Self::new(
            BigFloat::from_f64(v, precision_bits + GUARD_BITS),
            precision_bits,
        ))
    }

    pub fn precision_bits(&self) -> usize {
        self.precision_bits
    }

    pub fn to_f64(&self) -> f64 {
        big_to_f64(&self.value)
    }

    pub fn is_finite(&self) -> bool {
        !self.value.is_nan() && !self.value.is_inf()
    }

    pub(crate) fn big(&self) -> &BigFloat {
        &self.value
    }

    fn working_bits(&self, other: &RealHP) -> usize {
        self.precision_bits.max(other.precision_bits) + GUARD_BITS
    }

    pub fn add(&self, other: &RealHP) -> RealHP {
        let p = self.working_bits(other);
        RealHP::new(
            self.value.add(&other.value, p, RM),
            self.precision_bits.max(other.precision_bits),
        )
    }

    pub fn sub(&self, other: &RealHP) -> RealHP {
        let p = self.working_bits(other);
        RealHP::new(
            self.value.sub(&other.value, p, RM),
            self.precision_bits.max(other.precision_bits),
        )
    }

    /// `|self - other|` rounded to `f64`, with the subtraction done in high precision.
    pub fn abs_diff(&self, other: &RealHP) -> f64 {
        self.sub(other).to_f64().abs()
    }

    pub fn cmp_value(&self, other: &RealHP) -> Ordering {
        match self.value.cmp(&other.value) {
            Some(c) if c < 0 => Ordering::Less,
            Some(0) => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Scientific notation with `sig_digits` significant digits, e.g.
    /// `1.6449340668e0`. Deterministic for a given value.
    pub fn to_decimal(&self, sig_digits: usize) -> String {
        let mut cc = Consts::new().expect("astro-float constants cache");
        let raw = self
            .value
            .format(Radix::Dec, RM, &mut cc)
            .expect("decimal formatting of a finite value");
        round_decimal(&raw, sig_digits.max(1))
    }
}

impl RealHP {
    /// Positional notation with `sig_digits` significant digits when the
    /// decimal exponent lies in `-6..=20`, scientific otherwise.
    pub fn to_plain_decimal(&self, sig_digits: usize) -> String {
        scientific_to_plain(&self.to_decimal(sig_digits))
    }
}

fn scientific_to_plain(sci: &str) -> String {
    let Some((mant, exp)) = sci.split_once('e') else {
        return sci.to_string();
    };
    let Ok(exp) = exp.parse::<i64>() else {
        return sci.to_string();
    };
    if !(-6..=20).contains(&exp) {
        return sci.to_string();
    }
    let (sign, mant) = match mant.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mant),
    };
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    if digits == "0" {
        return "0".to_string();
    }
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    };
    format!("{sign}{body}")
}

impl fmt::Debug for RealHP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealHP({}, {} bits)", self.to_decimal(40), self.precision_bits)
    }
}

impl fmt::Display for RealHP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(self.precision_bits * 3 / 10);
        f.write_str(&self.to_decimal(digits))
    }
}

/// Leading 64 mantissa bits scaled by the exponent; faithful to `f64`.
/// Mantissa words are 64 bits on 64-bit targets and 32 bits on wasm32.
pub(crate) fn big_to_f64(v: &BigFloat) -> f64 {
    if v.is_nan() {
        return f64::NAN;
    }
    if v.is_inf() {
        return if v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let (Some(words), Some(exp)) = (v.mantissa_digits(), v.exponent()) else {
        return 0.0;
    };
    let Some(top) = words.last() else {
        return 0.0;
    };
    let word_bits = (std::mem::size_of_val(top) * 8) as i32;
    let mut mag = 0.0f64;
    let mut scale = exp;
    for &w in words.iter().rev().take((64 / word_bits) as usize) {
        scale -= word_bits;
        mag += (w as f64) * 2f64.powi(scale);
    }
    if v.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Rounds the backend's `d.ddd...e[+-]x` output to `sig` significant digits
/// (half away from zero) and re-renders as `d.ddde<x>`.
fn round_decimal(raw: &str, sig: usize) -> String {
    let (neg, body) = match raw.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, raw),
    };
    let (mant, exp) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let mut digits: Vec<u8> = int_part
        .bytes()
        .chain(frac_part.bytes())
        .map(|b| b - b'0')
        .collect();
    // Position of the decimal point relative to the digit string.
    let mut point = int_part.len() as i64 + exp;
    let lead = digits.iter().position(|&d| d != 0);
    let Some(lead) = lead else {
        return "0e0".to_string();
    };
    digits.drain(..lead);
    point -= lead as i64;
    if digits.len() > sig {
        let round_up = digits[sig] >= 5;
        digits.truncate(sig);
        if round_up {
            let mut i = sig;
            loop {
                if i == 0 {
                    digits.insert(0, 1);
                    digits.truncate(sig);
                    point += 1;
                    break;
                }
                i -= 1;
                if digits[i] == 9 {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
    }
    while digits.len() > 1 && *digits.last().unwrap() == 0 {
        digits.pop();
    }
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push((b'0' + digits[0]) as char);
    if digits.len() > 1 {
        out.push('.');
        out.extend(digits[1..].iter().map(|d| (b'0' + d) as char));
    }
    out.push('e');
    out.push_str(&(point - 1).to_string());
    out
}

/// Relative error allowed per elementary operation: 4 ulp at `bits`.
pub(crate) fn op_error(bits: usize) -> f64 {
    4.0 * 2f64.powi(1 - bits as i32)
}

/// Evaluation context: working precision plus the backend's constant cache.
pub(crate) struct Ctx {
    p: usize,
    cc: Consts,
    pi: BigFloat,
}

impl Ctx {
    /// `requested` bits plus guard bits.
    pub fn new(requested: usize) -> Self {
        let p = requested + GUARD_BITS;
        let mut cc = Consts::new().expect("astro-float constants cache");
        let pi = cc.pi(p, RM);
        Self { p, cc, pi }
    }

    pub fn bits(&self) -> usize {
        self.p
    }

    pub fn pi(&self) -> &BigFloat {
        &self.pi
    }

    pub fn int(&mut self, n: &BigInt) -> BigFloat {
        match n.to_i64() {
            Some(v) => BigFloat::from_i64(v, self.p),
            None => BigFloat::parse(&n.to_string(), Radix::Dec, self.p, RM, &mut self.cc),
        }
    }

    pub fn small(&self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.p)
    }

    pub fn rational(&mut self, r: &Rational) -> BigFloat {
        let num = self.int(r.numer());
        let den = self.int(r.denom());
        self.div(&num, &den)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, RM, &mut self.cc)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.p, RM, &mut self.cc)
    }

    /// `pi * num / den` for small integers.
    pub fn pi_frac(&self, num: i64, den: u64) -> BigFloat {
        let t = self.mul(&self.pi, &self.small(num));
        self.div(&t, &BigFloat::from_u64(den, self.p))
    }

    pub fn finish(&self, v: BigFloat, requested: usize) -> RealHP {
        RealHP::new(v, requested)
    }
}

/// Memoized `sin(pi j / (2w))` on the grid `j = 0..=w`, from which every
/// `sin(pi n/w)`, `cos(2 pi m/w)` and `cot(pi x/w)` is assembled, plus
/// memoized `ln(2 sin(pi n/w))`.
pub(crate) struct TrigTable {
    w: u64,
    quarter: Vec<Option<BigFloat>>,
    log_sine: Vec<Option<BigFloat>>,
}

impl TrigTable {
    pub fn new(w: u64) -> Self {
        assert!(w >= 1);
        Self {
            w,
            quarter: vec![None; w as usize + 1],
            log_sine: vec![None; w as usize],
        }
    }

    pub fn w(&self) -> u64 {
        self.w
    }

    fn quarter_entry(&mut self, ctx: &mut Ctx, j: u64) -> BigFloat {
        let slot = &mut self.quarter[j as usize];
        if let Some(v) = slot {
            return v.clone();
        }
        let v = if j == 0 {
            ctx.small(0)
        } else if j == self.w {
            ctx.small(1)
        } else {
            let arg = ctx.pi_frac(j as i64, 2 * self.w);
            ctx.sin(&arg)
        };
        *slot = Some(v.clone());
        v
    }

    /// `sin(pi j / (2w))` for any integer `j`.
    pub fn sin_grid(&mut self, ctx: &mut Ctx, j: i64) -> BigFloat {
        let period = 4 * self.w as i64;
        let w = self.w as i64;
        let r = j.rem_euclid(period);
        let (idx, negate) = if r <= w {
            (r, false)
        } else if r <= 2 * w {
            (2 * w - r, false)
        } else if r <= 3 * w {
            (r - 2 * w, true)
        } else {
            (4 * w - r, true)
        };
        let v = self.quarter_entry(ctx, idx as u64);
        if negate {
            v.neg()
        } else {
            v
        }
    }

    /// `sin(pi n / w)`.
    pub fn sin_pi_over(&mut self, ctx: &mut Ctx, n: i64) -> BigFloat {
        self.sin_grid(ctx, 2 * n)
    }

    /// `cos(pi n / w) = sin(pi (w - 2n) / (2w))`.
    pub fn cos_pi_over(&mut self, ctx: &mut Ctx, n: i64) -> BigFloat {
        self.sin_grid(ctx, self.w as i64 - 2 * n)
    }

    /// `cos(2 pi m / w)`.
    pub fn cos_two_pi_over(&mut self, ctx: &mut Ctx, m: i64) -> BigFloat {
        self.cos_pi_over(ctx, 2 * m)
    }

    /// `cot(pi x / w)`; `x` must not be a multiple of `w`.
    pub fn cot_pi_over(&mut self, ctx: &mut Ctx, x: i64) -> BigFloat {
        debug_assert!(x.rem_euclid(self.w as i64) != 0);
        let c = self.cos_pi_over(ctx, x);
        let s = self.sin_pi_over(ctx, x);
        ctx.div(&c, &s)
    }

    /// `ln(2 sin(pi n / w))` for `0 < n < w`.
    pub fn log_two_sin(&mut self, ctx: &mut Ctx, n: u64) -> BigFloat {
        debug_assert!(n > 0 && n < self.w);
        let key = n.min(self.w - n) as usize;
        if let Some(v) = &self.log_sine[key] {
            return v.clone();
        }
        let s = self.sin_pi_over(ctx, key as i64);
        let two_s = ctx.mul(&s, &ctx.small(2));
        let v = ctx.ln(&two_s);
        self.log_sine[key] = Some(v.clone());
        v
    }

    /// `sum_{n=1}^{w-1} ln(2 sin(pi n/w)) cos(2 pi n x / w)` and the sum of
    /// the absolute values of its terms.
    pub fn log_sine_cos_sum(&mut self, ctx: &mut Ctx, x: u64) -> (BigFloat, f64) {
        let mut acc = ctx.small(0);
        let mut magnitude = 0.0;
        for n in 1..self.w {
            let l = self.log_two_sin(ctx, n);
            // Reduce n x mod w exactly before touching the table.
            let m = ((n as u128 * x as u128) % self.w as u128) as i64;
            let c = self.cos_two_pi_over(ctx, m);
            let t = ctx.mul(&l, &c);
            magnitude += big_to_f64(&l).abs();
            acc = ctx.add(&acc, &t);
        }
        (acc, magnitude)
    }
}
