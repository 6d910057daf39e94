#![allow(dead_code)]

use emucheck::{Dataset, EnvelopeModel, MetricKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random::<f64>()).collect()
}

/// Random observations with values in `[-2, 2)`.
pub fn random_dataset(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> Dataset {
    let points = (0..n).map(|_| uniform_point(rng, dim)).collect();
    let values = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    Dataset::new(dim, points, values).unwrap()
}

pub fn random_model(seed: u64, dim: usize, n: usize, kind: MetricKind) -> EnvelopeModel {
    let mut r = rng(seed);
    EnvelopeModel::new(random_dataset(&mut r, dim, n), kind)
}

/// Feasible values at `w` for a `kappa`-Lipschitz function through the data,
/// found by testing every constraint endpoint against every constraint.
/// Returns half the length of the feasible interval, or `None` if empty.
pub fn interval_half_width(model: &EnvelopeModel, w: &[f64], kappa: f64) -> Option<f64> {
    let ds = model.dataset();
    let metric = model.metric();
    let radii: Vec<f64> = ds.points().map(|x| kappa * metric.distance(x, w).unwrap()).collect();
    let feasible = |y: f64| {
        ds.values()
            .iter()
            .zip(&radii)
            .all(|(f, r)| (y - f).abs() <= r + 1e-12 * (1.0 + f.abs() + r))
    };
    let candidates: Vec<f64> = ds
        .values()
        .iter()
        .zip(&radii)
        .flat_map(|(f, r)| [f - r, f + r])
        .collect();
    let inside: Vec<f64> = candidates.into_iter().filter(|y| feasible(*y)).collect();
    let lo = inside.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo <= hi).then_some(0.5 * (hi - lo))
}

/// Every point of the regular grid with `per_axis` points per coordinate.
pub fn grid(dim: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let step = 1.0 / (per_axis - 1) as f64;
    let total = per_axis.pow(dim as u32);
    (0..total)
        .map(|mut k| {
            (0..dim)
                .map(|_| {
                    let c = (k % per_axis) as f64 * step;
                    k /= per_axis;
                    c
                })
                .collect()
        })
        .collect()
}
