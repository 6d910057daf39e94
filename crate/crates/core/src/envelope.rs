//! Empirical Lipschitz constant, Lipschitz envelopes, the minimax emulator and
//! the adversarial "flat" function used by the burden bound.
//!
//! For a regularity budget `kappa`, every kappa-Lipschitz function that agrees
//! with the observations lies between
//!
//! ```text
//! e_plus(w)  = min_x [ f(x) + kappa d(x, w) ]
//! e_minus(w) = max_x [ f(x) - kappa d(x, w) ]
//! ```
//!
//! and half their gap, `e_star`, is the pointwise minimax error.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metric::{Metric, MetricKind};

/// Relative slack allowed when checking `kappa >= khat`.
pub const KAPPA_RELATIVE_SLACK: f64 = 1e-12;

/// Exact maximum of `|f(x) - f(y)| / d(x, y)` over all observation pairs.
///
/// Returns 0 for a single observation or constant data.
pub fn empirical_lipschitz(dataset: &Dataset, metric: &Metric) -> f64 {
    let n = dataset.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let (xi, fi) = (dataset.point(i), dataset.value(i));
            let mut best = 0.0_f64;
            for j in (i + 1)..n {
                let d = metric.dist(xi, dataset.point(j));
                if d > 0.0 {
                    best = best.max((fi - dataset.value(j)).abs() / d);
                }
            }
            best
        })
        // max is order independent, so the result does not depend on scheduling
        .reduce(|| 0.0, f64::max)
}

/// Natural log of `sum |v - center|^exponent`, accumulated in log space so
/// large exponents never overflow. Returns `-inf` when every term is zero.
pub fn ln_power_sum(values: &[f64], center: f64, exponent: f64) -> f64 {
    let logs = values.iter().map(|v| exponent * (v - center).abs().ln());
    let peak = logs.clone().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return peak;
    }
    peak + logs.map(|l| (l - peak).exp()).sum::<f64>().ln()
}

/// Minimizer of `sum |v - gamma|^exponent` over `gamma`.
///
/// For exponent 1 the minimizers form the median interval and its midpoint is
/// returned. Otherwise the objective is strictly convex and its derivative is
/// increasing, so the minimizer is found by bisection on the sign of the
/// derivative over `[min v, max v]`, to within `1e-10 * (max - min)`.
pub fn gamma_bar(values: &[f64], exponent: usize) -> f64 {
    assert!(!values.is_empty(), "gamma_bar of an empty sample");
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return lo;
    }
    if exponent == 1 {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        return if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
    }
    let q = exponent as f64 - 1.0;
    // derivative sign: compare the pull from above with the pull from below, in logs
    let rising = |g: f64| {
        let above: Vec<f64> = values.iter().filter(|&&v| v > g).map(|v| v - g).collect();
        let below: Vec<f64> = values.iter().filter(|&&v| v < g).map(|v| g - v).collect();
        ln_power_sum(&above, 0.0, q) <= ln_power_sum(&below, 0.0, q)
    };
    let (mut a, mut b) = (lo, hi);
    let tol = 1e-10 * (hi - lo);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if rising(mid) {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// How the centering constant of the flat function is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Centering {
    /// Minimizer of `sum |f(x) - gamma|^p` (p = dimension).
    #[default]
    ArgminPower,
    /// Sample mean of the observed values; usually gives a looser bound.
    Mean,
}

/// Envelope values at one query point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub e_plus: f64,
    pub e_minus: f64,
    pub e_star: f64,
    /// Observation attaining `e_plus` (lowest index on ties).
    pub plus_witness: usize,
    /// Observation attaining `e_minus` (lowest index on ties).
    pub minus_witness: usize,
}

impl Envelope {
    /// Midpoint of the envelopes, the minimax emulator's prediction.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.e_plus + self.e_minus)
    }
}

/// Which part of the domain a point falls in for the flat function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// Within `(f(x) - gamma_bar) / khat` of some `x` with `f(x) >= gamma_bar`.
    Plus,
    /// Within `(gamma_bar - f(x)) / khat` of some `x` with `f(x) < gamma_bar`.
    Minus,
    /// Neither; the flat function equals `gamma_bar` here.
    Flat,
}

/// Observations together with a metric, a regularity budget and the derived
/// constants every bound needs. Immutable once built.
#[derive(Debug, Clone)]
pub struct EnvelopeModel {
    dataset: Dataset,
    metric: Metric,
    kappa: f64,
    khat: f64,
    gamma_bar: f64,
    gamma_hat: f64,
    centering: Centering,
    plus_index: Vec<usize>,
    minus_index: Vec<usize>,
    /// Midrange of the values; envelopes are accumulated relative to it so
    /// that `e_plus - e_minus` does not cancel against a large offset.
    reference: f64,
    shifted: Vec<f64>,
}

impl EnvelopeModel {
    /// Builds the model with `kappa = khat`.
    pub fn new(dataset: Dataset, kind: MetricKind) -> Self {
        let metric = Metric {
            kind,
            dim: dataset.dim(),
        };
        let khat = empirical_lipschitz(&dataset, &metric);
        let gamma_hat = dataset.values().iter().sum::<f64>() / dataset.len() as f64;
        let lo = dataset.values().iter().copied().fold(f64::INFINITY, f64::min);
        let hi = dataset.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let reference = if lo == hi { lo } else { 0.5 * lo + 0.5 * hi };
        let shifted = dataset.values().iter().map(|v| v - reference).collect();
        let mut model = Self {
            dataset,
            metric,
            kappa: khat,
            khat,
            gamma_bar: 0.0,
            gamma_hat,
            centering: Centering::ArgminPower,
            plus_index: Vec::new(),
            minus_index: Vec::new(),
            reference,
            shifted,
        };
        model.set_centering(Centering::ArgminPower);
        model
    }

    /// Replaces the regularity budget. Values below `khat` are accepted for
    /// diagnostics; `e_star` may then be negative and the emulator and
    /// burden evaluators refuse to run.
    pub fn with_kappa(mut self, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "kappa must be finite and >= 0, got {kappa}"
            )));
        }
        self.kappa = kappa;
        Ok(self)
    }

    pub fn with_centering(mut self, centering: Centering) -> Self {
        self.set_centering(centering);
        self
    }

    fn set_centering(&mut self, centering: Centering) {
        self.centering = centering;
        self.gamma_bar = match centering {
            Centering::ArgminPower => gamma_bar(self.dataset.values(), self.dataset.dim()),
            Centering::Mean => self.gamma_hat,
        };
        let (plus, minus): (Vec<usize>, Vec<usize>) =
            (0..self.dataset.len()).partition(|&i| self.dataset.value(i) >= self.gamma_bar);
        self.plus_index = plus;
        self.minus_index = minus;
    }

    /// Offset subtracted from the values in `shifted_values`.
    pub(crate) fn reference(&self) -> f64 {
        self.reference
    }

    pub(crate) fn shifted_values(&self) -> &[f64] {
        &self.shifted
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.dataset.dim()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn khat(&self) -> f64 {
        self.khat
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    pub fn gamma_hat(&self) -> f64 {
        self.gamma_hat
    }

    pub fn centering(&self) -> Centering {
        self.centering
    }

    /// Indices with `f(x) >= gamma_bar`.
    pub fn plus_index(&self) -> &[usize] {
        &self.plus_index
    }

    /// Indices with `f(x) < gamma_bar`.
    pub fn minus_index(&self) -> &[usize] {
        &self.minus_index
    }

    /// True when `kappa >= khat` up to relative slack, i.e. the admissible
    /// class is non-empty.
    pub fn kappa_admissible(&self) -> bool {
        self.kappa >= self.khat - KAPPA_RELATIVE_SLACK * self.khat
    }

    pub(crate) fn ensure_admissible(&self) -> Result<()> {
        if self.kappa_admissible() {
            Ok(())
        } else {
            Err(Error::EmptyClass {
                kappa: self.kappa,
                khat: self.khat,
            })
        }
    }

    fn check_point(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: w.len(),
            });
        }
        Ok(())
    }

    pub fn envelope_at(&self, w: &[f64]) -> Result<Envelope> {
        self.check_point(w)?;
        Ok(self.envelope_with_kappa(w, self.kappa))
    }

    /// Envelopes for an arbitrary budget; `w` must have length `dim`.
    pub fn envelope_with_kappa(&self, w: &[f64], kappa: f64) -> Envelope {
        let mut e_plus = f64::INFINITY;
        let mut e_minus = f64::NEG_INFINITY;
        let (mut plus_witness, mut minus_witness) = (0, 0);
        for (i, x) in self.dataset.points().enumerate() {
            let reach = kappa * self.metric.dist(x, w);
            let f = self.shifted[i];
            if f + reach < e_plus {
                e_plus = f + reach;
                plus_witness = i;
            }
            if f - reach > e_minus {
                e_minus = f - reach;
                minus_witness = i;
            }
        }
        Envelope {
            e_plus: self.reference + e_plus,
            e_minus: self.reference + e_minus,
            e_star: 0.5 * (e_plus - e_minus),
            plus_witness,
            minus_witness,
        }
    }

    /// `e_star` only; `w` must have length `dim`.
    #[inline]
    pub fn e_star(&self, w: &[f64]) -> f64 {
        self.envelope_with_kappa(w, self.kappa).e_star
    }

    /// Prediction of the minimax emulator, the midpoint of the envelopes.
    pub fn minimax_emulator_at(&self, w: &[f64]) -> Result<f64> {
        self.ensure_admissible()?;
        Ok(self.envelope_at(w)?.midpoint())
    }

    /// Radius of the ball around observation `i` on which the flat function
    /// follows an envelope instead of staying at `gamma_bar`.
    pub fn flat_radius(&self, i: usize) -> f64 {
        (self.dataset.value(i) - self.gamma_bar).abs() / self.khat
    }

    pub fn region_of(&self, w: &[f64]) -> Result<Region> {
        self.check_point(w)?;
        self.ensure_nondegenerate()?;
        let inside = |i: &usize| self.metric.dist(self.dataset.point(*i), w) < self.flat_radius(*i);
        Ok(if self.plus_index.iter().any(inside) {
            Region::Plus
        } else if self.minus_index.iter().any(inside) {
            Region::Minus
        } else {
            Region::Flat
        })
    }

    /// The adversarial function: `e_minus` on the plus region, `e_plus` on
    /// the minus region and `gamma_bar` elsewhere, with envelopes taken at
    /// `kappa = khat`.
    pub fn fbar_at(&self, w: &[f64]) -> Result<f64> {
        Ok(match self.region_of(w)? {
            Region::Plus => self.envelope_with_kappa(w, self.khat).e_minus,
            Region::Minus => self.envelope_with_kappa(w, self.khat).e_plus,
            Region::Flat => self.gamma_bar,
        })
    }

    pub(crate) fn ensure_nondegenerate(&self) -> Result<()> {
        if self.khat > 0.0 {
            Ok(())
        } else {
            Err(Error::Degenerate(
                "empirical Lipschitz constant is 0 (constant or single observation)".into(),
            ))
        }
    }
}
