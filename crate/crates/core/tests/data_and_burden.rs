mod common;

use std::io::Cursor;

use common::{random_dataset, rng};
use emucheck::bounds::burden_from_terms;
use emucheck::{
    burden_lower_bound, empirical_lipschitz, synthesize, Dataset, EnvelopeModel, EpsilonSpec, Metric, MetricKind,
    SyntheticKind, ValueColumn,
};
use proptest::prelude::*;

#[test]
fn synthetic_khat_never_exceeds_generator_constant() {
    let kinds = [
        SyntheticKind::Linear,
        SyntheticKind::Constant,
        SyntheticKind::ProductSine,
        SyntheticKind::RandomLipschitz,
    ];
    for kind in kinds {
        for metric in [MetricKind::Euclidean, MetricKind::Supremum] {
            for (dim, seed) in [(1, 0), (3, 1), (7, 2), (21, 3)] {
                let (ds, k) = synthesize(kind, dim, 150, seed, metric).unwrap();
                let khat = empirical_lipschitz(&ds, &Metric::new(metric, dim).unwrap());
                assert!(
                    khat <= k * (1.0 + 1e-9) + 1e-12,
                    "{kind} {metric} p={dim}: {khat} > {k}"
                );
            }
        }
    }
}

#[test]
fn burden_monotone_in_epsilon_and_khat() {
    let metric = Metric::euclidean(6);
    let sum = 3.0f64.log10();
    let mut last = u64::MAX as f64 * 10.0;
    for eps in [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0] {
        let b = burden_from_terms(metric, 4.0, sum, eps, EpsilonSpec::Absolute(eps)).unwrap();
        assert!(b.bound.log10 <= last.log10() + 1e-12);
        last = b.bound.approx();
    }
    let mut last = 0.0;
    for khat in [3.0, 4.0, 6.0, 10.0, 50.0] {
        let b = burden_from_terms(metric, khat, sum, 0.1, EpsilonSpec::Absolute(0.1)).unwrap();
        assert!(b.bound.approx() >= last);
        last = b.bound.approx();
    }
}

#[test]
fn burden_units_agree() {
    let mut r = rng(4);
    let model = EnvelopeModel::new(random_dataset(&mut r, 3, 30), MetricKind::Supremum);
    let a = burden_lower_bound(&model, EpsilonSpec::FractionOfKhat(0.25)).unwrap();
    let b = burden_lower_bound(&model, EpsilonSpec::Absolute(0.25 * model.khat())).unwrap();
    assert_eq!(a.bound, b.bound);
    assert_eq!(a.epsilon, b.epsilon);
}

fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    (1usize..=5, 1usize..=30, any::<u64>()).prop_map(|(dim, n, seed)| random_dataset(&mut rng(seed), dim, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip(ds in dataset_strategy()) {
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let back = Dataset::read_csv(Cursor::new(&buf), &ValueColumn::Last).unwrap();
        prop_assert_eq!(back.points_flat(), ds.points_flat());
        prop_assert_eq!(back.values(), ds.values());
        let mut again = Vec::new();
        back.write_csv(&mut again).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn file_round_trip(ds in dataset_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("obs.csv");
        ds.save_csv(&path).unwrap();
        let back = Dataset::load_csv(&path, &ValueColumn::Last).unwrap();
        prop_assert_eq!(back.values(), ds.values());
    }
}
