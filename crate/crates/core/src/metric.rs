//! Distances on the unit hypercube and the ball-volume constants used by the
//! burden bound.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    /// `l2`, q = 2.
    Euclidean,
    /// `linf`, q = infinity.
    Supremum,
}

impl MetricKind {
    pub fn token(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "l2",
            MetricKind::Supremum => "linf",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "Euclidean",
            MetricKind::Supremum => "supremum",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l2" | "euclidean" | "2" => Ok(MetricKind::Euclidean),
            "linf" | "sup" | "supremum" | "inf" => Ok(MetricKind::Supremum),
            other => Err(Error::InvalidArgument(format!(
                "unknown metric `{other}` (expected l2 or linf)"
            ))),
        }
    }
}

/// A distance on `[0,1]^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metric {
    pub kind: MetricKind,
    pub dim: usize,
}

impl Metric {
    pub fn new(kind: MetricKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        Ok(Self { kind, dim })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self {
            kind: MetricKind::Euclidean,
            dim,
        }
    }

    pub fn supremum(dim: usize) -> Self {
        Self {
            kind: MetricKind::Supremum,
            dim,
        }
    }

    /// Distance between two points, checking their lengths.
    pub fn distance(&self, v: &[f64], w: &[f64]) -> Result<f64> {
        for got in [v.len(), w.len()] {
            if got != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got,
                });
            }
        }
        Ok(self.dist(v, w))
    }

    /// Unchecked distance for hot loops; both slices must have length `dim`.
    #[inline]
    pub fn dist(&self, v: &[f64], w: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), w.len());
        match self.kind {
            MetricKind::Euclidean => v.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            MetricKind::Supremum => v.iter().zip(w).fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs())),
        }
    }

    /// Natural log of the unit-ball volume constant C_q.
    pub fn ln_ball_volume_constant(&self) -> f64 {
        let p = self.dim as f64;
        match self.kind {
            MetricKind::Euclidean => 0.5 * p * PI.ln() - ln_gamma(0.5 * p + 1.0),
            MetricKind::Supremum => p * std::f64::consts::LN_2,
        }
    }

    /// Volume of the radius-one ball: `pi^(p/2) / Gamma(p/2 + 1)` for l2 and
    /// `2^p` for l-infinity, so that `mu(B(0, r)) = C_q r^p`.
    pub fn ball_volume_constant(&self) -> f64 {
        match self.kind {
            // exact for every dim that fits in an f64 exponent
            MetricKind::Supremum => 2f64.powi(self.dim as i32),
            MetricKind::Euclidean => self.ln_ball_volume_constant().exp(),
        }
    }

    /// `max(d(v, 0), d(v, 1))`, an upper bound on `d(v, w)` for every `w` in
    /// the cube. Only valid under the supremum metric.
    pub fn corner_distance_bound(&self, v: &[f64]) -> Result<f64> {
        if self.kind != MetricKind::Supremum {
            return Err(Error::UnsupportedMetric {
                operation: "corner_distance_bound",
            });
        }
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(corner_distance_linf(v))
    }
}

#[inline]
pub(crate) fn corner_distance_linf(v: &[f64]) -> f64 {
    let to_zero = v.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    let to_one = v.iter().fold(0.0_f64, |a, &x| a.max((1.0 - x).abs()));
    to_zero.max(to_one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| rng.random::<f64>()).collect()
    }

    #[test]
    fn cube_diagonal() {
        let zero = vec![0.0; 21];
        let one = vec![1.0; 21];
        assert_eq!(Metric::supremum(21).distance(&zero, &one).unwrap(), 1.0);
        let d2 = Metric::euclidean(21).distance(&zero, &one).unwrap();
        assert!((d2 - 21f64.sqrt()).abs() < 1e-15);
        assert!((d2 - 4.5826).abs() < 1e-4);
    }

    #[test]
    fn identity_of_indiscernibles() {
        let v = [0.3, 0.7, 0.1];
        for m in [Metric::euclidean(3), Metric::supremum(3)] {
            assert_eq!(m.distance(&v, &v).unwrap(), 0.0);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = Metric::supremum(2).distance(&[0.0, 1.0], &[0.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, got: 1 }));
    }

    #[test]
    fn ball_constants_low_dimensions() {
        let expected = [2.0, PI, 4.0 * PI / 3.0];
        for (p, want) in (1..=3).zip(expected) {
            let got = Metric::euclidean(p).ball_volume_constant();
            assert!((got - want).abs() < 1e-12, "p={p}: {got} vs {want}");
        }
        assert_eq!(Metric::supremum(21).ball_volume_constant(), 2_097_152.0);
        assert_eq!(Metric::supremum(1).ball_volume_constant(), 2.0);
    }

    #[test]
    fn ball_constants_follow_recursion() {
        // V_p = V_{p-2} * 2 pi / p
        let mut v = [1.0, 2.0];
        for p in 2..=30 {
            let want = v[p % 2] * 2.0 * PI / p as f64;
            v[p % 2] = want;
            let got = Metric::euclidean(p).ball_volume_constant();
            assert!((got - want).abs() <= 1e-12 * want, "p={p}: {got} vs {want}");
        }
        let c21 = Metric::euclidean(21).ball_volume_constant();
        assert!((c21 - 0.013949).abs() < 5e-7, "{c21}");
    }

    #[test]
    fn ball_constant_large_dimension_is_finite() {
        let c = Metric::euclidean(400).ball_volume_constant();
        assert!(c.is_finite() && c > 0.0);
        assert!(Metric::euclidean(400).ln_ball_volume_constant() < -500.0);
    }

    #[test]
    fn corner_distance_examples() {
        let m1 = Metric::supremum(1);
        assert_eq!(m1.corner_distance_bound(&[0.25]).unwrap(), 0.75);
        let m = Metric::supremum(5);
        assert_eq!(m.corner_distance_bound(&[0.5; 5]).unwrap(), 0.5);
        assert_eq!(m.corner_distance_bound(&[0.0; 5]).unwrap(), 1.0);
        assert!(matches!(
            Metric::euclidean(1).corner_distance_bound(&[0.5]),
            Err(Error::UnsupportedMetric { .. })
        ));
    }

    #[test]
    fn triangle_inequality_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in [MetricKind::Euclidean, MetricKind::Supremum] {
            for _ in 0..10_000 {
                let dim = rng.random_range(1..=8);
                let m = Metric { kind, dim };
                let (a, b, c) = (
                    random_point(&mut rng, dim),
                    random_point(&mut rng, dim),
                    random_point(&mut rng, dim),
                );
                assert!(m.dist(&a, &c) <= m.dist(&a, &b) + m.dist(&b, &c) + 1e-12);
                assert_eq!(m.dist(&a, &b), m.dist(&b, &a));
            }
        }
    }

    #[test]
    fn corner_bound_dominates_all_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10_000 {
            let dim = rng.random_range(1..=10);
            let m = Metric::supremum(dim);
            let v = random_point(&mut rng, dim);
            let w = random_point(&mut rng, dim);
            assert!(m.dist(&v, &w) <= m.corner_distance_bound(&v).unwrap());
        }
    }

    #[test]
    fn parses_cli_tokens() {
        assert_eq!("l2".parse::<MetricKind>().unwrap(), MetricKind::Euclidean);
        assert_eq!("LINF".parse::<MetricKind>().unwrap(), MetricKind::Supremum);
        assert!("l1".parse::<MetricKind>().is_err());
    }
}
