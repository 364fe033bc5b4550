//! Seeded generation of admissible shifts for randomized cross-checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational::{ProductSeriesSpec, Rational};

/// Upper end (exclusive) of sampled shifts; the lower end is -1.
pub const SHIFT_CEILING: i64 = 8;

/// Deterministic stream of shifts in `(-1, 8)` with denominators up to `max_den`.
#[derive(Debug, Clone)]
pub struct ShiftSampler {
    rng: ChaCha8Rng,
    max_den: i64,
}

impl ShiftSampler {
    pub fn new(seed: u64, max_den: u64) -> Result<Self> {
        if max_den == 0 || max_den > 1 << 20 {
            return Err(Error::InvalidInput(format!("max denominator must be in 1..=2^20, got {max_den}")));
        }
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_den: max_den as i64,
        })
    }

    pub fn shift(&mut self) -> Rational {
        let den = self.rng.random_range(1..=self.max_den);
        let num = self.rng.random_range(-den + 1..SHIFT_CEILING * den);
        Rational::new(num, den).expect("positive denominator")
    }

    /// `k` distinct shifts, sorted.
    pub fn spec(&mut self, k: usize, precision: usize) -> Result<ProductSeriesSpec> {
        let mut shifts: Vec<Rational> = Vec::with_capacity(k);
        while shifts.len() < k {
            let q = self.shift();
            if !shifts.contains(&q) {
                shifts.push(q);
            }
        }
        ProductSeriesSpec::from_unsorted(shifts, precision)
    }

    pub fn pair(&mut self) -> (Rational, Rational) {
        let q1 = self.shift();
        loop {
            let q2 = self.shift();
            if q2 != q1 {
                return if q1 < q2 { (q1, q2) } else { (q2, q1) };
            }
        }
    }

    /// A factor count drawn uniformly from `lo..=hi`.
    pub fn factor_count(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }
}

/// The first `count` pairs of the stream for `seed`.
pub fn sample_pairs(seed: u64, count: usize, max_den: u64) -> Result<Vec<(Rational, Rational)>> {
    let mut s = ShiftSampler::new(seed, max_den)?;
    Ok((0..count).map(|_| s.pair()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        assert_eq!(sample_pairs(7, 50, 24).unwrap(), sample_pairs(7, 50, 24).unwrap());
        assert_ne!(sample_pairs(7, 50, 24).unwrap(), sample_pairs(8, 50, 24).unwrap());
    }

    #[test]
    fn shifts_are_in_range() {
        let mut s = ShiftSampler::new(1, 24).unwrap();
        let lo = Rational::from_integer(-1);
        let hi = Rational::from_integer(SHIFT_CEILING);
        for _ in 0..2000 {
            let q = s.shift();
            assert!(q > lo && q < hi, "{q}");
            assert!(q.denom() <= &24.into());
        }
    }

    #[test]
    fn specs_are_admissible() {
        let mut s = ShiftSampler::new(3, 12).unwrap();
        for _ in 0..100 {
            let k = s.factor_count(2, 4);
            let spec = s.spec(k, 128).unwrap();
            assert_eq!(spec.len(), k);
        }
    }

    #[test]
    fn rejects_zero_denominator_bound() {
        assert!(ShiftSampler::new(0, 0).is_err());
    }
}
