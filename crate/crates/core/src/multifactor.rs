//! Products with three or more factors, reduced to two-factor series by
//! partial fractions:
//!
//! ```text
//! 1/prod_k (n + q_k) = 1/(q_j - q_i) * ( 1/prod_{k != j} (n + q_k) - 1/prod_{k != i} (n + q_k) )
//! ```
//!
//! Repeating the step until every product has two factors expresses the
//! series as an exact rational combination of [`pair_sum`] values.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::hp::{big_to_f64, op_error, Ctx, RealHP, TrigTable};
use crate::pairsum::{pair_sum, EvalResult, Method};
use crate::rational::{check_precision, ProductSeriesSpec, Rational};

/// One partial-fraction step: `spec = coefficient * (left - right)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub coefficient: Rational,
    /// The shifts without the second chosen one.
    pub left: ProductSeriesSpec,
    /// The shifts without the first chosen one.
    pub right: ProductSeriesSpec,
}

/// Which pair of shifts a reduction step eliminates between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairChoice {
    /// The two smallest shifts.
    #[default]
    First,
    /// The two largest shifts.
    Last,
    /// The adjacent pair around the middle.
    Middle,
}

impl PairChoice {
    fn indices(self, k: usize) -> (usize, usize) {
        match self {
            PairChoice::First => (0, 1),
            PairChoice::Last => (k - 2, k - 1),
            PairChoice::Middle => {
                let i = (k - 1) / 2;
                (i, i + 1)
            }
        }
    }
}

/// Partial-fraction step between shifts `i < j`.
pub fn reduce_pair(spec: &ProductSeriesSpec, i: usize, j: usize) -> Result<Reduction> {
    let k = spec.len();
    if k < 3 {
        return Err(Error::TooFewShifts { needed: 3, got: k });
    }
    if i >= j || j >= k {
        return Err(Error::InvalidInput(format!("bad reduction indices ({i}, {j}) for {k} shifts")));
    }
    let q = spec.shifts();
    let coefficient = (&q[j] - &q[i]).recip()?;
    Ok(Reduction {
        coefficient,
        left: spec.without(j),
        right: spec.without(i),
    })
}

/// The reduction step on the two smallest shifts.
pub fn reduce_once(spec: &ProductSeriesSpec) -> Result<Reduction> {
    reduce_pair(spec, 0, 1)
}

/// The full reduction down to two-factor leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionTree {
    Leaf(ProductSeriesSpec),
    Node {
        spec: ProductSeriesSpec,
        coefficient: Rational,
        left: Box<ReductionTree>,
        right: Box<ReductionTree>,
    },
}

impl ReductionTree {
    /// Builds the tree explicitly. Its size is exponential in the number of
    /// factors; [`leaf_weights`] is the memoized equivalent.
    pub fn build(spec: &ProductSeriesSpec, choice: PairChoice) -> Result<Self> {
        if spec.len() == 2 {
            return Ok(ReductionTree::Leaf(spec.clone()));
        }
        let (i, j) = choice.indices(spec.len());
        let step = reduce_pair(spec, i, j)?;
        Ok(ReductionTree::Node {
            spec: spec.clone(),
            coefficient: step.coefficient,
            left: Box::new(Self::build(&step.left, choice)?),
            right: Box::new(Self::build(&step.right, choice)?),
        })
    }

    pub fn spec(&self) -> &ProductSeriesSpec {
        match self {
            ReductionTree::Leaf(s) => s,
            ReductionTree::Node { spec, .. } => spec,
        }
    }

    /// Signed weight of every leaf, in depth-first order.
    pub fn weighted_leaves(&self) -> Vec<(Rational, ProductSeriesSpec)> {
        let mut out = Vec::new();
        self.collect(Rational::one(), &mut out);
        out
    }

    fn collect(&self, weight: Rational, out: &mut Vec<(Rational, ProductSeriesSpec)>) {
        match self {
            ReductionTree::Leaf(s) => out.push((weight, s.clone())),
            ReductionTree::Node {
                coefficient,
                left,
                right,
                ..
            } => {
                let w = &weight * coefficient;
                left.collect(w.clone(), out);
                right.collect(-w, out);
            }
        }
    }

    /// Evaluates the summand of the tree at `n` by recombining leaf summands.
    pub fn expand_term(&self, n: i64) -> Result<Rational> {
        match self {
            ReductionTree::Leaf(s) => s.term(n),
            ReductionTree::Node {
                coefficient,
                left,
                right,
                ..
            } => Ok(coefficient * &(left.expand_term(n)? - right.expand_term(n)?)),
        }
    }
}

/// A two-factor leaf, keyed by its (smaller, larger) shift.
pub type LeafKey = (Rational, Rational);

/// Fully expanded reduction: the series equals
/// `sum_leaves weight * sum_n 1/((n + q_a)(n + q_b))`. Sub-products are
/// memoized by their shift list and equal leaves are merged.
pub fn leaf_weights(spec: &ProductSeriesSpec, choice: PairChoice) -> Result<BTreeMap<LeafKey, Rational>> {
    let mut memo: HashMap<Vec<Rational>, BTreeMap<LeafKey, Rational>> = HashMap::new();
    expand(spec, choice, &mut memo)
}

fn expand(
    spec: &ProductSeriesSpec,
    choice: PairChoice,
    memo: &mut HashMap<Vec<Rational>, BTreeMap<LeafKey, Rational>>,
) -> Result<BTreeMap<LeafKey, Rational>> {
    if let Some(hit) = memo.get(spec.shifts()) {
        return Ok(hit.clone());
    }
    let mut out = BTreeMap::new();
    if spec.len() == 2 {
        let q = spec.shifts();
        out.insert((q[0].clone(), q[1].clone()), Rational::one());
    } else {
        let (i, j) = choice.indices(spec.len());
        let step = reduce_pair(spec, i, j)?;
        for (sub, sign) in [(&step.left, Rational::one()), (&step.right, -Rational::one())] {
            let scale = &step.coefficient * &sign;
            for (key, w) in expand(sub, choice, memo)? {
                let entry = out.entry(key).or_insert_with(Rational::zero);
                *entry = &*entry + &(&w * &scale);
            }
        }
        out.retain(|_, w| !w.is_zero());
    }
    memo.insert(spec.shifts().to_vec(), out.clone());
    Ok(out)
}

/// Residue of `1/prod (n + q_k)` at each pole `n = -q_i`, recovered from the
/// expanded leaves. For two or more factors these sum to zero.
pub fn residues(spec: &ProductSeriesSpec, choice: PairChoice) -> Result<Vec<Rational>> {
    let weights = leaf_weights(spec, choice)?;
    let index: HashMap<&Rational, usize> = spec.shifts().iter().enumerate().map(|(i, q)| (q, i)).collect();
    let mut res = vec![Rational::zero(); spec.len()];
    for ((qa, qb), w) in &weights {
        // 1/((n+qa)(n+qb)) = 1/(qb-qa) * (1/(n+qa) - 1/(n+qb))
        let c = w * &(qb - qa).recip()?;
        res[index[qa]] = &res[index[qa]] + &c;
        res[index[qb]] = &res[index[qb]] - &c;
    }
    Ok(res)
}

/// `1/prod_{j != i} (q_j - q_i)`, the residue computed directly.
pub fn direct_residues(spec: &ProductSeriesSpec) -> Result<Vec<Rational>> {
    let q = spec.shifts();
    (0..q.len())
        .map(|i| {
            q.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Rational::one(), |acc, (_, qj)| acc * (qj - &q[i]))
                .recip()
        })
        .collect()
}

/// Sum of the product series, by reduction to two-factor closed forms.
pub fn multi_sum(spec: &ProductSeriesSpec) -> Result<EvalResult> {
    multi_sum_with(spec, PairChoice::First)
}

/// [`multi_sum`] with an explicit elimination order.
pub fn multi_sum_with(spec: &ProductSeriesSpec, choice: PairChoice) -> Result<EvalResult> {
    let bits = spec.precision();
    if spec.len() == 2 {
        let q = spec.shifts();
        return pair_sum(&q[0], &q[1], bits);
    }
    let weights = leaf_weights(spec, choice)?;

    // The recombination cancels: leaves are O(1) while weights grow like the
    // inverse shift gaps to the power k-2. Carry enough extra bits to cover it.
    let total_weight: f64 = weights.values().map(|w| w.to_f64().abs()).sum();
    let extra = total_weight.max(1.0).log2().ceil() as usize + 8;
    let leaf_bits = bits + extra;

    let mut leaves = Vec::with_capacity(weights.len());
    for ((qa, qb), w) in &weights {
        leaves.push((w, pair_sum(qa, qb, leaf_bits)?));
    }

    if leaves.iter().all(|(_, r)| r.exact.is_some()) {
        let exact: Rational = leaves
            .iter()
            .map(|(w, r)| *w * r.exact.as_ref().expect("checked above"))
            .sum();
        let value = RealHP::from_rational(&exact, bits)?;
        return Ok(EvalResult {
            value,
            method: Method::PartialFractions,
            error_bound: op_error(bits) * exact.to_f64().abs(),
            exact: Some(exact),
        });
    }

    let mut ctx = Ctx::new(leaf_bits);
    let mut acc = ctx.small(0);
    let mut budget = 0.0;
    let mut magnitude = 0.0;
    for (w, r) in &leaves {
        let wf = ctx.rational(w);
        let t = ctx.mul(&wf, r.value.big());
        magnitude += big_to_f64(&t).abs();
        budget += w.to_f64().abs() * r.error_bound;
        acc = ctx.add(&acc, &t);
    }
    budget += 4.0 * op_error(ctx.bits()) * magnitude;
    Ok(EvalResult {
        value: ctx.finish(acc, bits),
        method: Method::PartialFractions,
        error_bound: budget,
        exact: None,
    })
}

/// The shifts `-2/w, -1/w, 1/w, 2/w` whose series tends to `zeta(4)`.
pub fn zeta4_spec(w: u64, precision: usize) -> Result<ProductSeriesSpec> {
    if w < 3 {
        return Err(Error::InvalidInput(format!("zeta(4) construction needs w >= 3, got {w}")));
    }
    let w = i64::try_from(w).map_err(|_| Error::OutOfRange(format!("w = {w}")))?;
    let shifts = [-2, -1, 1, 2]
        .iter()
        .map(|&k| Rational::new(k, w))
        .collect::<Result<Vec<_>>>()?;
    ProductSeriesSpec::new(shifts, precision)
}

/// `(w^3/24) [pi (4 cot(pi/w) - 2 cot(2 pi/w)) - 3w]`, the closed form of the
/// four-factor series with shifts `+-1/w, +-2/w`.
pub fn zeta4_closed_form(w: u64, precision_bits: usize) -> Result<RealHP> {
    Ok(zeta4_closed_form_with_budget(w, precision_bits)?.0)
}

/// [`zeta4_closed_form`] with an absolute rounding budget.
///
/// The bracket is `O(1/w^3)` while its terms are `O(w)`, so about `4 log2 w`
/// bits cancel; the working precision is raised by that much.
pub fn zeta4_closed_form_with_budget(w: u64, precision_bits: usize) -> Result<(RealHP, f64)> {
    check_precision(precision_bits)?;
    if w < 3 {
        return Err(Error::InvalidInput(format!("zeta(4) closed form needs w >= 3, got {w}")));
    }
    let log_w = (w as f64).log2().ceil() as usize;
    let mut ctx = Ctx::new(precision_bits + 4 * log_w + 16);
    let mut table = TrigTable::new(w);
    let cot1 = table.cot_pi_over(&mut ctx, 1);
    let cot2 = table.cot_pi_over(&mut ctx, 2);
    let four_cot1 = ctx.mul(&ctx.small(4), &cot1);
    let two_cot2 = ctx.mul(&ctx.small(2), &cot2);
    let combo = ctx.mul(ctx.pi(), &ctx.sub(&four_cot1, &two_cot2));
    let three_w = ctx.small(3 * w as i64);
    let bracket = ctx.sub(&combo, &three_w);
    let w_big = ctx.small(w as i64);
    let w_cubed = ctx.mul(&ctx.mul(&w_big, &w_big), &w_big);
    let scale = ctx.div(&w_cubed, &ctx.small(24));
    let v = ctx.mul(&scale, &bracket);

    let wf = w as f64;
    let magnitude = 16.0 * wf * wf.powi(3) / 24.0;
    let budget = 32.0 * op_error(ctx.bits()) * magnitude + 4.0 * op_error(ctx.bits()) * big_to_f64(&v).abs();
    Ok((ctx.finish(v, precision_bits), budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::truncated_sum;
    use std::f64::consts::PI;

    const BITS: usize = 128;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn spec(shifts: &[(i64, i64)]) -> ProductSeriesSpec {
        ProductSeriesSpec::new(shifts.iter().map(|&(n, d)| r(n, d)).collect(), BITS).unwrap()
    }

    #[test]
    fn reduce_once_examples() {
        let s = spec(&[(-1, 2), (1, 2), (3, 2)]);
        let step = reduce_once(&s).unwrap();
        assert_eq!(step.coefficient, Rational::one());
        assert_eq!(step.left.shifts(), &[r(-1, 2), r(3, 2)]);
        assert_eq!(step.right.shifts(), &[r(1, 2), r(3, 2)]);
        for n in 1..=5 {
            let lhs = s.term(n).unwrap();
            let rhs = &step.coefficient * &(step.left.term(n).unwrap() - step.right.term(n).unwrap());
            assert_eq!(lhs, rhs);
        }

        let step = reduce_once(&spec(&[(1, 1), (2, 1), (3, 1)])).unwrap();
        assert_eq!(step.coefficient, Rational::one());
        assert_eq!(step.left.shifts(), &[r(1, 1), r(3, 1)]);
        assert_eq!(step.right.shifts(), &[r(2, 1), r(3, 1)]);

        let step = reduce_once(&spec(&[(0, 1), (1, 3), (2, 3), (1, 1)])).unwrap();
        assert_eq!(step.coefficient, r(3, 1));
        assert_eq!(step.left.shifts(), &[r(0, 1), r(2, 3), r(1, 1)]);
        assert_eq!(step.right.shifts(), &[r(1, 3), r(2, 3), r(1, 1)]);

        assert!(matches!(
            reduce_once(&spec(&[(0, 1), (1, 1)])),
            Err(Error::TooFewShifts { .. })
        ));
    }

    #[test]
    fn tree_expansion_is_pointwise_exact() {
        let s = spec(&[(-2, 5), (-1, 7), (0, 1), (1, 3), (5, 2)]);
        for choice in [PairChoice::First, PairChoice::Last, PairChoice::Middle] {
            let tree = ReductionTree::build(&s, choice).unwrap();
            for (_, leaf) in tree.weighted_leaves() {
                assert_eq!(leaf.len(), 2);
            }
            for n in 1..=20 {
                assert_eq!(tree.expand_term(n).unwrap(), s.term(n).unwrap());
            }
        }
    }

    #[test]
    fn memoized_weights_match_explicit_tree() {
        let s = spec(&[(-1, 3), (0, 1), (1, 4), (2, 1), (7, 2)]);
        let tree = ReductionTree::build(&s, PairChoice::First).unwrap();
        let mut merged: BTreeMap<LeafKey, Rational> = BTreeMap::new();
        for (w, leaf) in tree.weighted_leaves() {
            let q = leaf.shifts();
            let e = merged.entry((q[0].clone(), q[1].clone())).or_insert_with(Rational::zero);
            *e = &*e + &w;
        }
        merged.retain(|_, w| !w.is_zero());
        assert_eq!(merged, leaf_weights(&s, PairChoice::First).unwrap());
    }

    #[test]
    fn residues_are_conserved() {
        let s = spec(&[(-2, 3), (-1, 3), (1, 3), (2, 3), (5, 4)]);
        for choice in [PairChoice::First, PairChoice::Last, PairChoice::Middle] {
            let res = residues(&s, choice).unwrap();
            assert_eq!(res, direct_residues(&s).unwrap());
            assert!(res.iter().cloned().sum::<Rational>().is_zero());
        }
    }

    #[test]
    fn integer_triple_is_a_quarter() {
        let v = multi_sum(&spec(&[(0, 1), (1, 1), (2, 1)])).unwrap();
        assert_eq!(v.exact, Some(r(1, 4)));
        assert_eq!(v.method, Method::PartialFractions);
    }

    #[test]
    fn two_factor_delegates() {
        let v = multi_sum(&spec(&[(-1, 2), (1, 2)])).unwrap();
        assert!((v.value.to_f64() - 2.0).abs() < 1e-15);
        assert_eq!(v.method, Method::BothFractional);
    }

    #[test]
    fn zeta4_example_matches_reduction() {
        for w in [3u64, 4, 7, 10] {
            let s = zeta4_spec(w, BITS).unwrap();
            let m = multi_sum(&s).unwrap();
            let (c, cb) = zeta4_closed_form_with_budget(w, BITS).unwrap();
            assert!(m.value.abs_diff(&c) <= m.error_bound + cb, "w={w}");
            let wf = w as f64;
            let direct = wf.powi(3) / 24.0
                * (PI * (4.0 / (PI / wf).tan() - 2.0 / (2.0 * PI / wf).tan()) - 3.0 * wf);
            assert!((c.to_f64() - direct).abs() < 1e-9, "w={w}");
        }
    }

    #[test]
    fn zeta4_closed_form_inside_oracle() {
        let s = zeta4_spec(10, BITS).unwrap();
        let (c, cb) = zeta4_closed_form_with_budget(10, BITS).unwrap();
        assert!(truncated_sum(&s, 1_000_000).unwrap().contains(&c, cb));
    }

    #[test]
    fn zeta4_rejects_small_w() {
        assert!(zeta4_closed_form(2, BITS).is_err());
        assert!(zeta4_spec(2, BITS).is_err());
    }

    #[test]
    fn elimination_order_does_not_matter() {
        let s = spec(&[(-1, 4), (1, 6), (2, 3), (3, 1)]);
        let a = multi_sum_with(&s, PairChoice::First).unwrap();
        let b = multi_sum_with(&s, PairChoice::Last).unwrap();
        let c = multi_sum_with(&s, PairChoice::Middle).unwrap();
        assert!(a.agrees_with(&b) && a.agrees_with(&c));
    }
}
