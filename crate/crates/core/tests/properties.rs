use proptest::prelude::*;
use rayon::prelude::*;

use mengoli::digamma::{gauss_sum, gauss_sum_with_budget};
use mengoli::multifactor::{multi_sum, multi_sum_with, PairChoice};
use mengoli::oracle::truncated_sum;
use mengoli::pairsum::pair_sum;
use mengoli::sample::ShiftSampler;
use mengoli::{ProductSeriesSpec, Rational};

#[test]
fn closed_forms_inside_oracle_for_random_specs() {
    let mut sampler = ShiftSampler::new(99, 24).unwrap();
    let specs: Vec<_> = (0..100)
        .map(|_| {
            let k = sampler.factor_count(2, 4);
            sampler.spec(k, 128).unwrap()
        })
        .collect();
    let bad: Vec<String> = specs
        .par_iter()
        .filter_map(|spec| {
            let v = multi_sum(spec).unwrap();
            let o = truncated_sum(spec, 1_000_000).unwrap();
            (!o.contains(&v.value, v.error_bound)).then(|| format!("{:?}", spec.shifts()))
        })
        .collect();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn doubling_precision_is_stable() {
    let grid = [(1u64, 3u64), (2, 7), (5, 12), (11, 24), (1, 97)];
    for (p, q) in grid {
        for bits in [64usize, 128, 256] {
            let a = gauss_sum(p, q, bits).unwrap();
            let b = gauss_sum(p, q, 2 * bits).unwrap();
            assert!(a.abs_diff(&b) < 2f64.powi(-(bits as i32) / 2), "({p},{q}) at {bits}");
        }
    }
}

#[test]
fn gauss_budget_covers_high_precision_reference() {
    for q in [3u64, 8, 13, 30] {
        for p in 1..q {
            let (v, b) = gauss_sum_with_budget(p, q, 64).unwrap();
            let reference = gauss_sum(p, q, 512).unwrap();
            assert!(v.abs_diff(&reference) <= b.max(1e-300), "({p},{q})");
        }
    }
}

fn shift() -> impl Strategy<Value = Rational> {
    (1i64..=16).prop_flat_map(|d| ((-d + 1)..(6 * d)).prop_map(move |n| Rational::new(n, d).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pair_sum_is_symmetric(a in shift(), b in shift()) {
        prop_assume!(a != b);
        let x = pair_sum(&a, &b, 128).unwrap();
        let y = pair_sum(&b, &a, 128).unwrap();
        prop_assert!(x.agrees_with(&y));
    }

    #[test]
    fn elimination_order_is_irrelevant(v in proptest::collection::btree_set(shift(), 3..=5)) {
        let spec = ProductSeriesSpec::new(v.into_iter().collect(), 128).unwrap();
        let a = multi_sum_with(&spec, PairChoice::First).unwrap();
        let b = multi_sum_with(&spec, PairChoice::Last).unwrap();
        let c = multi_sum_with(&spec, PairChoice::Middle).unwrap();
        prop_assert!(a.agrees_with(&b) && a.agrees_with(&c));
    }

    #[test]
    fn multi_sum_matches_short_oracle(v in proptest::collection::btree_set(shift(), 2..=4)) {
        let spec = ProductSeriesSpec::new(v.into_iter().collect(), 128).unwrap();
        let closed = multi_sum(&spec).unwrap();
        prop_assert!(truncated_sum(&spec, 20_000).unwrap().contains(&closed.value, closed.error_bound));
    }
}
