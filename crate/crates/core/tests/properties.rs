use proptest::prelude::*;
use treepolymer::cascade::{
    enumerate_leaves, martingale_series, partition_function, subtree_sums, Step, Vertex, WeightOracle,
};
use treepolymer::laplace::{asymptotic_variance, laplace_rate, solve_h};
use treepolymer::measure::{
    character_expectation_inf, character_expectation_n, prob_inf_measure, prob_n_measure, Character,
};
use treepolymer::seed::replicate_seed;
use treepolymer::stats::{ks_statistic, standard_normal_cdf};
use treepolymer::{critical_beta, DisorderSpec, Regime};

fn spec_strategy() -> impl Strategy<Value = DisorderSpec> {
    prop_oneof![
        (0.05f64..3.0).prop_map(|b| DisorderSpec::lognormal(b).unwrap()),
        (0.01f64..0.99, 0.01f64..0.99).prop_map(|(a, p)| DisorderSpec::two_point(a, p).unwrap()),
        Just(DisorderSpec::Deterministic),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn streaming_sums_match_enumeration(seed in any::<u64>(), spec in spec_strategy(), k in 0usize..10) {
        let oracle = WeightOracle::new(seed, spec);
        let leaves = enumerate_leaves(&oracle, Vertex::root(), k).unwrap();
        let z: f64 = leaves.iter().map(|l| l.product).sum::<f64>() / 2f64.powi(k as i32);
        let d: f64 = leaves.iter().map(|l| l.brw_position * (-l.brw_position).exp()).sum();
        let scale: f64 = leaves.iter().map(|l| l.brw_position.abs() * (-l.brw_position).exp()).sum();
        let sums = subtree_sums(&oracle, Vertex::root(), k).unwrap();
        prop_assert!((sums.z(k) - z).abs() <= 1e-10 * z);
        prop_assert!((sums.d(k) - d).abs() <= 1e-10 * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn one_step_recursion(seed in any::<u64>(), spec in spec_strategy(), k in 1usize..12) {
        let oracle = WeightOracle::new(seed, spec);
        let plus = Vertex::root().child(Step::Plus);
        let minus = Vertex::root().child(Step::Minus);
        let lhs = partition_function(&oracle, Vertex::root(), k).unwrap();
        let rhs = 0.5 * (oracle.weight_at(plus).unwrap() * partition_function(&oracle, plus, k - 1).unwrap()
            + oracle.weight_at(minus).unwrap() * partition_function(&oracle, minus, k - 1).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn series_is_positive_and_reproducible(seed in any::<u64>(), spec in spec_strategy(), n in 1usize..12) {
        let oracle = WeightOracle::new(seed, spec);
        let a = martingale_series(&oracle, n).unwrap();
        prop_assert_eq!(&a, &martingale_series(&oracle, n).unwrap());
        for k in 1..=n {
            prop_assert!(a.z_at(k) > 0.0 && a.z_at(k).is_finite());
            prop_assert_eq!(a.ratio_at(k).is_some(), a.d_at(k) > 0.0);
        }
    }

    #[test]
    fn weights_positive(seed in any::<u64>(), spec in spec_strategy(), index in 0u64..1024) {
        let oracle = WeightOracle::new(seed, spec);
        let w = oracle.weight_at(Vertex::from_index(10, index)).unwrap();
        prop_assert!(w > 0.0 && w.is_finite());
    }

    #[test]
    fn finite_volume_measure_axioms(seed in any::<u64>(), spec in spec_strategy(), n in 1usize..12, m in 1usize..7) {
        let oracle = WeightOracle::new(seed, spec);
        let fine = prob_n_measure(&oracle, n, m + 1).unwrap();
        let coarse = prob_n_measure(&oracle, n, m).unwrap();
        prop_assert!((coarse.total() - 1.0).abs() <= 1e-12);
        prop_assert!(coarse.probabilities.iter().all(|&p| p >= 0.0));
        for (i, &p) in coarse.probabilities.iter().enumerate() {
            let q = fine.probabilities[2 * i] + fine.probabilities[2 * i + 1];
            prop_assert!((p - q).abs() <= 1e-12 * p.max(1e-300));
        }
    }

    #[test]
    fn character_expectations_bounded(seed in any::<u64>(), spec in spec_strategy(), levels in proptest::collection::btree_set(1usize..6, 0..4)) {
        let oracle = WeightOracle::new(seed, spec);
        let f = Character::new(levels).unwrap();
        let e = character_expectation_n(&oracle, 8, &f).unwrap();
        prop_assert!(e.abs() <= 1.0 + 1e-12);
        if f.levels().next().is_none() {
            prop_assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn infinite_volume_estimate_normalized(seed in any::<u64>(), m in 1usize..5) {
        let oracle = WeightOracle::new(seed, DisorderSpec::lognormal(critical_beta()).unwrap());
        if let Ok(measure) = prob_inf_measure(&oracle, m, 10) {
            prop_assert!((measure.total() - 1.0).abs() <= 1e-12);
            prop_assert_eq!(&measure, &prob_inf_measure(&oracle, m, 10).unwrap());
        }
        let trivial = character_expectation_inf(&oracle, &Character::trivial(), 10);
        if let Ok(e) = trivial {
            prop_assert!((e - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn h_positive_and_even(k in 1.0f64..4.0, r in -3.0f64..3.0) {
        let beta = k * critical_beta();
        let h = solve_h(beta, r).unwrap();
        prop_assert!(h > 0.0);
        prop_assert_eq!(h, solve_h(beta, -r).unwrap());
        let f = laplace_rate(beta, r).unwrap();
        prop_assert!(f >= -1e-12);
        prop_assert!((f - laplace_rate(beta, -r).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn rate_convex_along_r(k in 1.0f64..3.0, r in -2.0f64..2.0) {
        let beta = k * critical_beta();
        let d = 1e-2;
        let second = laplace_rate(beta, r + d).unwrap() - 2.0 * laplace_rate(beta, r).unwrap() + laplace_rate(beta, r - d).unwrap();
        prop_assert!(second >= -1e-11);
    }

    #[test]
    fn asymptotic_variance_monotone(a in 1.0f64..10.0, b in 1.0f64..10.0) {
        let bc = critical_beta();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (vlo, vhi) = (asymptotic_variance(lo * bc), asymptotic_variance(hi * bc));
        prop_assert!(vhi <= vlo);
        prop_assert!(vhi > 0.0 && vlo <= 1.0);
    }

    #[test]
    fn classification_matches_beta_order(beta in 0.01f64..5.0) {
        let expected = if beta < critical_beta() { Regime::Weak } else { Regime::Strong };
        prop_assert_eq!(DisorderSpec::lognormal(beta).unwrap().classify(), expected);
    }

    #[test]
    fn ks_in_unit_interval(xs in proptest::collection::vec(-5.0f64..5.0, 2..200)) {
        let d = ks_statistic(&xs, standard_normal_cdf).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        let mut reversed = xs.clone();
        reversed.reverse();
        prop_assert_eq!(d, ks_statistic(&reversed, standard_normal_cdf).unwrap());
    }

    #[test]
    fn replicate_seeds_pairwise_distinct(base in any::<u64>()) {
        let mut seeds: Vec<u64> = (0..1000).map(|i| replicate_seed(base, i)).collect();
        seeds.sort_unstable();
        seeds.dedup();
        prop_assert_eq!(seeds.len(), 1000);
    }

    #[test]
    fn vertex_concat_depth(a in proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 0..20),
                           b in proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 0..20)) {
        let u = Vertex::from_steps(&a).unwrap();
        let v = Vertex::from_steps(&b).unwrap();
        let w = u.concat(&v);
        prop_assert_eq!(w.depth(), u.depth() + v.depth());
        prop_assert_eq!(w.prefix(u.depth()), u);
        let mut steps = a.clone();
        steps.extend(&b);
        prop_assert_eq!(w.steps(), steps);
    }
}
