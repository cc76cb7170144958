use normloc::space::{FiniteMetricSpace, Measure, Subset};
use normloc::sparsify::{best_decomposition, is_admissible, sparsify_interval, verify_decomposition, ORACLE_CAP};
use proptest::prelude::*;

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..10.0f64, 1e3..1e6f64], 1..400)
        .prop_filter("positive mass", |w| w.iter().any(|x| *x > 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interval_decompositions_verify(w in weights(), m in 1usize..12, k in 2usize..9) {
        let n = w.len();
        let mu = Measure::new(w).unwrap();
        let d = sparsify_interval(&mu, m, k).unwrap();
        let space = FiniteMetricSpace::<f64>::path(n).unwrap();
        let c = 1.0 - 1.0 / k as f64;
        let report = verify_decomposition(&space, &d, &mu, &(m as f64), &((k * m) as f64), &c).unwrap();
        prop_assert!(report.passes(), "{report:?}");
        prop_assert!(report.mass_ratio >= 1.0 - 1.0 / (k + 1) as f64 - 1e-12);
    }

    #[test]
    fn admissibility_is_downward_closed(mask in 1u64..(1 << 9), drop in 0usize..9, m in 1usize..4, r in 0usize..4) {
        let space = FiniteMetricSpace::<f64>::grid(3, 3).unwrap();
        let set = Subset::from_mask(9, mask);
        if is_admissible(&space, set.indices(), &(m as f64), &(r as f64)) {
            let smaller = set.difference(&Subset::singleton(9, drop).unwrap());
            prop_assert!(is_admissible(&space, smaller.indices(), &(m as f64), &(r as f64)));
        }
    }
}

#[test]
fn oracle_beats_interval_sparsifier() {
    let space = FiniteMetricSpace::<f64>::path(14).unwrap();
    let mu = Measure::new((0..14).map(|i| ((i * 7) % 5 + 1) as f64).collect()).unwrap();
    let d = sparsify_interval(&mu, 2, 3).unwrap();
    let (_, best) = best_decomposition(&space, &mu, &2.0, &6.0, ORACLE_CAP).unwrap();
    assert!(best >= d.mass(&mu) / mu.total() - 1e-12);
}
