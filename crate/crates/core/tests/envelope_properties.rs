mod common;

use common::{interval_half_width, random_model, rng, uniform_point};
use emucheck::{EnvelopeModel, MetricKind, Region};
use proptest::prelude::*;

const KINDS: [MetricKind; 2] = [MetricKind::Euclidean, MetricKind::Supremum];

#[test]
fn e_star_matches_interval_intersection() {
    for seed in 0..40u64 {
        let kind = KINDS[seed as usize % 2];
        let dim = 1 + (seed as usize / 2) % 3;
        let model = random_model(seed, dim, 1 + seed as usize % 6, kind);
        let mut r = rng(1000 + seed);
        for _ in 0..200 {
            let w = uniform_point(&mut r, dim);
            let oracle = interval_half_width(&model, &w, model.kappa()).expect("kappa = khat is feasible");
            let got = model.envelope_at(&w).unwrap().e_star;
            assert!((got - oracle).abs() < 1e-10, "seed {seed}: {got} vs {oracle}");
        }
    }
}

#[test]
fn envelopes_interpolate_the_data() {
    for seed in 0..20u64 {
        let model = random_model(seed, 4, 30, KINDS[seed as usize % 2]);
        for (i, x) in model.dataset().points().enumerate() {
            let e = model.envelope_at(x).unwrap();
            let f = model.dataset().value(i);
            // kappa = khat exactly, so a neighbour can undercut by one rounding
            let tol = 1e-12 * (1.0 + f.abs());
            assert!((e.e_plus - f).abs() <= tol && (e.e_minus - f).abs() <= tol);
            assert!(e.e_star.abs() <= tol);
        }
    }
}

#[test]
fn envelopes_are_kappa_lipschitz() {
    for seed in 0..20u64 {
        let kind = KINDS[seed as usize % 2];
        let model = random_model(seed, 5, 40, kind).with_kappa(3.7).unwrap();
        let mut r = rng(seed + 77);
        for _ in 0..500 {
            let (v, w) = (uniform_point(&mut r, 5), uniform_point(&mut r, 5));
            let d = model.metric().distance(&v, &w).unwrap();
            let (a, b) = (model.envelope_at(&v).unwrap(), model.envelope_at(&w).unwrap());
            let slack = 1e-12 * (1.0 + 3.7 * d);
            assert!((a.e_plus - b.e_plus).abs() <= 3.7 * d + slack);
            assert!((a.e_minus - b.e_minus).abs() <= 3.7 * d + slack);
        }
    }
}

#[test]
fn flat_regions_are_disjoint_and_fbar_is_khat_lipschitz() {
    for seed in 0..20u64 {
        let kind = KINDS[seed as usize % 2];
        let dim = 1 + seed as usize % 4;
        let model = random_model(seed, dim, 25, kind);
        let khat = model.khat();
        let ds = model.dataset();
        let mut r = rng(seed + 5);
        let pts: Vec<Vec<f64>> = (0..300).map(|_| uniform_point(&mut r, dim)).collect();
        let fbar: Vec<f64> = pts.iter().map(|w| model.fbar_at(w).unwrap()).collect();
        for w in &pts {
            let inside = |i: &usize| model.metric().distance(ds.point(*i), w).unwrap() < model.flat_radius(*i);
            let plus = model.plus_index().iter().any(inside);
            let minus = model.minus_index().iter().any(inside);
            assert!(!(plus && minus), "seed {seed}: point in both regions");
            let region = model.region_of(w).unwrap();
            assert_eq!(region == Region::Flat, !plus && !minus);
        }
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = model.metric().distance(&pts[i], &pts[j]).unwrap();
                assert!((fbar[i] - fbar[j]).abs() <= khat * d + 1e-10, "seed {seed}");
            }
        }
        // fbar passes through the data
        for (i, x) in ds.points().enumerate() {
            assert!((model.fbar_at(x).unwrap() - ds.value(i)).abs() < 1e-12);
        }
    }
}

fn model_strategy() -> impl Strategy<Value = EnvelopeModel> {
    (1usize..=6, 1usize..=20, any::<u64>(), prop::bool::ANY).prop_map(|(dim, n, seed, sup)| {
        let kind = if sup {
            MetricKind::Supremum
        } else {
            MetricKind::Euclidean
        };
        random_model(seed, dim, n, kind)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn e_star_nonnegative_at_admissible_kappa(model in model_strategy(), seed in any::<u64>(), extra in 0.0f64..5.0) {
        let model = model.clone().with_kappa(model.khat() + extra).unwrap();
        let mut r = rng(seed);
        for _ in 0..50 {
            let w = uniform_point(&mut r, model.dim());
            prop_assert!(model.envelope_at(&w).unwrap().e_star >= -1e-12);
        }
    }

    #[test]
    fn e_star_monotone_in_kappa(model in model_strategy(), seed in any::<u64>(), k1 in 0.0f64..10.0, k2 in 0.0f64..10.0) {
        let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        let mut r = rng(seed);
        for _ in 0..50 {
            let w = uniform_point(&mut r, model.dim());
            let a = model.envelope_with_kappa(&w, lo);
            let b = model.envelope_with_kappa(&w, hi);
            prop_assert!(a.e_star <= b.e_star + 1e-12);
            prop_assert!(a.e_plus <= b.e_plus && a.e_minus >= b.e_minus);
        }
    }

    #[test]
    fn interval_scaling(model in model_strategy(), seed in any::<u64>(), alpha in 1e-6f64..=1.0) {
        let kappa = model.kappa();
        let mut r = rng(seed);
        for _ in 0..50 {
            let w = uniform_point(&mut r, model.dim());
            let full = model.envelope_with_kappa(&w, kappa).e_star;
            let scaled = model.envelope_with_kappa(&w, alpha * kappa).e_star;
            prop_assert!(alpha * full >= scaled - 1e-10);
        }
    }

    #[test]
    fn minimax_emulator_lies_between_envelopes(model in model_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        for _ in 0..20 {
            let w = uniform_point(&mut r, model.dim());
            let e = model.envelope_at(&w).unwrap();
            let m = model.minimax_emulator_at(&w).unwrap();
            prop_assert!(e.e_minus - 1e-12 <= m && m <= e.e_plus + 1e-12);
            prop_assert!((e.e_plus - m - e.e_star).abs() <= 1e-12 * (1.0 + e.e_plus.abs()));
        }
    }
}
