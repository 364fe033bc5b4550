//! Exact rational arithmetic for shifts, harmonic numbers and the
//! integer-offset corrections used by the closed forms.
//!
//! Nothing in this module touches floating point. A shift `q` is carried as a
//! reduced fraction and, when a closed form needs it, split into an integer
//! part and a fractional numerator over a chosen denominator,
//! `q = a + x/w` with `0 <= x < w`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact fraction with positive denominator, always in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds the canonical fraction `num/den`.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        normalize(num, den)
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(self.0.recip()))
    }

    /// Nearest `f64`; exact for values representable in binary64.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub(crate) fn as_big(&self) -> &BigRational {
        &self.0
    }
}

/// Canonical `num/den`: positive denominator, reduced to lowest terms.
pub fn normalize(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Rational> {
    let den = den.into();
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    // BigRational::new reduces and moves the sign to the numerator.
    Ok(Rational(BigRational::new(num.into(), den)))
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q` or a bare integer `p`, with optional surrounding spaces.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| parse_err("bad numerator"))?;
        let den: BigInt = den.parse().map_err(|_| parse_err("bad denominator"))?;
        if den.is_zero() {
            return Err(parse_err("zero denominator"));
        }
        normalize(num, den)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div<&Rational> for &Rational {
    type Output = Rational;

    /// Panics on division by zero; use [`Rational::recip`] to handle it.
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, r| acc + r)
    }
}

/// A shift written as `a + x/w` with integer part `a` and `0 <= x < w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShiftDecomposition {
    pub a: BigInt,
    pub x: BigInt,
    pub w: BigInt,
}

impl ShiftDecomposition {
    pub fn value(&self) -> Rational {
        Rational(BigRational::from_integer(self.a.clone()) + BigRational::new(self.x.clone(), self.w.clone()))
    }

    pub fn is_integral(&self) -> bool {
        self.x.is_zero()
    }

    /// The components as machine integers, for the finite trigonometric sums.
    pub fn to_machine(&self) -> Result<(i64, u64, u64)> {
        let a = self
            .a
            .to_i64()
            .ok_or_else(|| Error::OutOfRange(format!("integer part {}", self.a)))?;
        let x = self
            .x
            .to_u64()
            .ok_or_else(|| Error::OutOfRange(format!("fractional numerator {}", self.x)))?;
        let w = self
            .w
            .to_u64()
            .ok_or_else(|| Error::OutOfRange(format!("denominator {}", self.w)))?;
        Ok((a, x, w))
    }
}

/// Floor decomposition over the shift's own reduced denominator
/// (`w = 1` for integers). `-1/7` becomes `(-1) + 6/7`.
pub fn decompose(r: &Rational) -> ShiftDecomposition {
    let a = r.floor();
    let frac = r.as_big() - BigRational::from_integer(a.clone());
    if frac.is_zero() {
        ShiftDecomposition {
            a,
            x: BigInt::zero(),
            w: BigInt::one(),
        }
    } else {
        ShiftDecomposition {
            a,
            x: frac.numer().clone(),
            w: frac.denom().clone(),
        }
    }
}

/// Floor decomposition over a prescribed denominator `w`, which must be a
/// multiple of the shift's reduced denominator.
pub fn decompose_over(r: &Rational, w: &BigInt) -> Result<ShiftDecomposition> {
    if !w.is_positive() {
        return Err(Error::InvalidInput(format!("denominator {w} must be positive")));
    }
    if !(w % r.denom()).is_zero() {
        return Err(Error::InvalidInput(format!(
            "{w} is not a multiple of the denominator of {r}"
        )));
    }
    let a = r.floor();
    let scaled = (r.as_big() - BigRational::from_integer(a.clone())) * BigRational::from_integer(w.clone());
    debug_assert!(scaled.is_integer());
    Ok(ShiftDecomposition {
        a,
        x: scaled.to_integer(),
        w: w.clone(),
    })
}

/// Exact harmonic number `H_n = 1 + 1/2 + ... + 1/n`, with `H_0 = 0`.
pub fn harmonic(n: u64) -> Rational {
    // Accumulate over a running common denominator; one reduction at the end.
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for k in 1..=n {
        let k = BigInt::from(k);
        num = num * &k + &den;
        den *= k;
    }
    Rational(BigRational::new(num, den))
}

/// Integer-offset correction that moves a digamma-type series from
/// `x/w` to `a + x/w`:
///
/// * `a > 0`: `+ sum_{n=1}^{a} w/(x + w n)`
/// * `a = 0`: `0`
/// * `a < 0`: `- sum_{n=0}^{|a|-1} w/(x - w n)`
///
/// The `a < 0` branch needs `x > 0`; with `x = 0` the shift itself would be a
/// negative integer.
pub fn correction_sum(a: i64, x: u64, w: u64) -> Result<Rational> {
    if w == 0 {
        return Err(Error::ZeroDenominator);
    }
    if x >= w {
        return Err(Error::InvalidInput(format!(
            "fractional numerator {x} must be below the denominator {w}"
        )));
    }
    let (x_big, w_big) = (BigInt::from(x), BigInt::from(w));
    match a.cmp(&0) {
        Ordering::Equal => Ok(Rational::zero()),
        Ordering::Greater => Ok((1..=a)
            .map(|n| Rational(BigRational::new(w_big.clone(), &x_big + &w_big * BigInt::from(n))))
            .sum()),
        Ordering::Less => {
            if x == 0 {
                return Err(Error::InvalidInput(
                    "correction sum with a < 0 requires x > 0 (shift would be a negative integer)".into(),
                ));
            }
            let total: Rational = (0..a.unsigned_abs())
                .map(|n| Rational(BigRational::new(w_big.clone(), &x_big - &w_big * BigInt::from(n))))
                .sum();
            Ok(-total)
        }
    }
}

/// Rejects shifts outside the supported domain `q > -1`, naming which
/// condition failed.
pub fn check_admissible(q: &Rational) -> Result<()> {
    let minus_one = Rational::from_integer(-1);
    if *q > minus_one {
        return Ok(());
    }
    if q.is_integer() {
        Err(Error::NegativeIntegerShift(q.to_string()))
    } else {
        Err(Error::ShiftBelowMinusOne(q.to_string()))
    }
}

/// Default working precision for evaluations, in bits.
pub const DEFAULT_PRECISION_BITS: usize = 128;

/// Smallest precision accepted anywhere in the crate.
pub const MIN_PRECISION_BITS: usize = 64;

pub(crate) fn check_precision(bits: usize) -> Result<()> {
    if bits < MIN_PRECISION_BITS {
        Err(Error::PrecisionTooLow(bits))
    } else {
        Ok(())
    }
}

/// Sorted distinct admissible shifts defining `sum_{n>=1} 1/prod_i (n + q_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductSeriesSpec {
    shifts: Vec<Rational>,
    precision: usize,
}

impl ProductSeriesSpec {
    /// Validates an already strictly increasing list of shifts.
    pub fn new(shifts: Vec<Rational>, precision: usize) -> Result<Self> {
        if shifts.len() < 2 {
            return Err(Error::TooFewShifts {
                needed: 2,
                got: shifts.len(),
            });
        }
        check_precision(precision)?;
        for pair in shifts.windows(2) {
            match pair[0].cmp(&pair[1]) {
                Ordering::Less => {}
                Ordering::Equal => return Err(Error::EqualShifts(pair[0].to_string())),
                Ordering::Greater => {
                    return Err(Error::NotIncreasing(format!("{} before {}", pair[0], pair[1])));
                }
            }
        }
        for q in &shifts {
            check_admissible(q)?;
        }
        Ok(Self { shifts, precision })
    }

    /// Sorts first; duplicates are still rejected.
    pub fn from_unsorted(mut shifts: Vec<Rational>, precision: usize) -> Result<Self> {
        shifts.sort();
        Self::new(shifts, precision)
    }

    pub fn shifts(&self) -> &[Rational] {
        &self.shifts
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    /// Same spec with the shift at `index` removed. Callers keep at least two.
    pub(crate) fn without(&self, index: usize) -> Self {
        let mut shifts = self.shifts.clone();
        shifts.remove(index);
        Self {
            shifts,
            precision: self.precision,
        }
    }

    pub fn with_precision(&self, precision: usize) -> Result<Self> {
        check_precision(precision)?;
        Ok(Self {
            shifts: self.shifts.clone(),
            precision,
        })
    }

    /// Exact summand `1/prod_i (n + q_i)` at integer `n`.
    pub fn term(&self, n: i64) -> Result<Rational> {
        let n = Rational::from_integer(n);
        let prod = self
            .shifts
            .iter()
            .fold(Rational::one(), |acc, q| acc * (&n + q));
        prod.recip()
    }
}
