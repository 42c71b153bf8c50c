use dpgrid_cli::stats::{percentile_sorted, summarize};
use proptest::prelude::*;

proptest! {
    #[test]
    fn summary_is_ordered_and_order_free(mut v in prop::collection::vec(-1e6f64..1e6, 1..200), shift in 0usize..200) {
        let s = summarize(&v).unwrap();
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        prop_assert!(lo <= s.p05 && s.p05 <= s.p95 && s.p95 <= hi);
        prop_assert!(lo - 1e-9 <= s.mean && s.mean <= hi + 1e-9);
        prop_assert!(s.std >= 0.0);
        let k = shift % v.len();
        v.rotate_left(k);
        let r = summarize(&v).unwrap();
        prop_assert_eq!((s.p05, s.p95), (r.p05, r.p95));
        prop_assert!((s.mean - r.mean).abs() <= 1e-9 * (1.0 + s.mean.abs()));
    }

    #[test]
    fn percentile_is_monotone_in_q(mut v in prop::collection::vec(-1e3f64..1e3, 1..50), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        v.sort_by(f64::total_cmp);
        let (q0, q1) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(percentile_sorted(&v, q0) <= percentile_sorted(&v, q1) + 1e-12);
    }

    #[test]
    fn constant_samples_have_no_spread(c in -1e3f64..1e3, n in 1usize..40) {
        let s = summarize(&vec![c; n]).unwrap();
        prop_assert_eq!((s.p05, s.p95), (c, c));
        // The mean may be off by an ulp, which leaves a rounding-level std.
        prop_assert!(s.std <= 1e-14 * (1.0 + c.abs()));
    }
}
