//! Distribution of the pointwise minimax error over the cube: uniform Monte
//! Carlo samples with one-sided lower confidence bounds for quantiles
//! (binomial inversion) and for the mean (z-test).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

use crate::envelope::EnvelopeModel;
use crate::error::{Error, Result};
use crate::metric::MetricKind;

/// Uniform point number `index` of the stream `seed`. Each point comes from
/// its own ChaCha stream, so points can be generated in any order.
pub fn sample_point(seed: u64, index: u64, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..dim).map(|_| rng.random::<f64>()).collect()
}

/// `e_star` at `n_samples` uniform points, sorted ascending.
pub fn sample_error(model: &EnvelopeModel, n_samples: usize, seed: u64) -> Vec<f64> {
    let dim = model.dim();
    let mut out: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| model.e_star(&sample_point(seed, i, dim)))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// `P(Binomial(n, q) >= k)`, summed from the upper tail in log space.
pub fn binomial_upper_tail(n: u64, q: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    upper_tails(n, q)[k as usize]
}

/// `tails[k] = P(Bin(n, q) >= k)` for `k = 0..=n+1`.
fn upper_tails(n: u64, q: f64) -> Vec<f64> {
    let nf = n as f64;
    let mut tails = vec![0.0; n as usize + 2];
    if q <= 0.0 {
        tails[0] = 1.0;
        return tails;
    }
    if q >= 1.0 {
        tails[..=n as usize].fill(1.0);
        return tails;
    }
    let (lq, lp) = (q.ln(), (-q).ln_1p());
    let ln_n_fact = ln_gamma(nf + 1.0);
    let mut acc = 0.0;
    for i in (0..=n).rev() {
        let fi = i as f64;
        let ln_pmf = ln_n_fact - ln_gamma(fi + 1.0) - ln_gamma(nf - fi + 1.0) + fi * lq + (nf - fi) * lp;
        acc += ln_pmf.exp();
        tails[i as usize] = acc.min(1.0);
    }
    tails[0] = 1.0;
    tails
}

/// Largest `k >= 1` with `P(Bin(n, q) >= k) >= confidence`, i.e. the order
/// statistic that is a one-sided lower confidence bound for the `q`-quantile.
pub fn quantile_lcb_rank(n: usize, q: f64, confidence: f64) -> Option<usize> {
    let tails = upper_tails(n as u64, q);
    (1..=n).rev().find(|&k| tails[k] >= confidence)
}

/// Lower confidence bound for the `q`-quantile from ascending `sorted`
/// values; `None` when no order statistic qualifies (no nontrivial bound).
pub fn quantile_lcb(sorted: &[f64], q: f64, confidence: f64) -> Option<f64> {
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]), "values must be sorted");
    quantile_lcb_rank(sorted.len(), q, confidence).map(|k| sorted[k - 1])
}

/// Standard normal quantile.
pub fn standard_normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// `mean - z * s / sqrt(N)` with the `N - 1` standard deviation, floored at 0.
/// Relies on the central limit theorem, so coverage is approximate.
pub fn mean_lcb(values: &[f64], confidence: f64) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "mean bound needs at least 2 samples, got {n}"
        )));
    }
    check_confidence(confidence)?;
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    let z = standard_normal_quantile(confidence);
    Ok((mean - z * var.sqrt() / nf.sqrt()).max(0.0))
}

fn check_confidence(confidence: f64) -> Result<()> {
    if confidence > 0.0 && confidence < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "--confidence must lie in (0, 1), got {confidence}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Units {
    #[serde(rename = "abs")]
    Absolute,
    /// Fractions of `khat / 2`.
    #[serde(rename = "khat2")]
    KhatOver2,
    /// Fractions of the sample mean of the observed values.
    #[serde(rename = "gammahat")]
    GammaHat,
}

impl Units {
    pub fn token(self) -> &'static str {
        match self {
            Units::Absolute => "abs",
            Units::KhatOver2 => "khat2",
            Units::GammaHat => "gammahat",
        }
    }

    /// Absolute values are divided by this to express them in these units.
    pub fn scale(self, model: &EnvelopeModel) -> Result<f64> {
        let s = match self {
            Units::Absolute => 1.0,
            Units::KhatOver2 => 0.5 * model.khat(),
            Units::GammaHat => model.gamma_hat(),
        };
        if s == 0.0 || !s.is_finite() {
            return Err(Error::Degenerate(format!(
                "units `{}` have a zero scale for this data",
                self.token()
            )));
        }
        Ok(s)
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "abs" | "absolute" => Ok(Units::Absolute),
            "khat2" | "khat-over-2" => Ok(Units::KhatOver2),
            "gammahat" => Ok(Units::GammaHat),
            other => Err(Error::InvalidArgument(format!(
                "--units `{other}` (expected khat2, gammahat or abs)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub confidence: f64,
    pub quantiles: Vec<f64>,
    pub units: Vec<Units>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_samples: 10_000,
            seed: 0,
            confidence: 0.95,
            quantiles: vec![0.25, 0.5, 0.75],
            units: vec![Units::KhatOver2],
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "--samples must be at least 2, got {}",
                self.n_samples
            )));
        }
        check_confidence(self.confidence)?;
        if let Some(q) = self.quantiles.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "--quantiles entries must lie in (0, 1), got {q}"
            )));
        }
        if self.units.is_empty() {
            return Err(Error::InvalidArgument("--units is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileLcb {
    pub q: f64,
    /// `None` when the sample is too small for a nontrivial bound.
    pub lcb: Option<f64>,
}

/// One row of the error-distribution table: a metric in one unit system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorDistributionReport {
    pub metric: MetricKind,
    pub units: Units,
    /// Absolute value of one unit.
    pub scale: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub confidence: f64,
    pub quantile_lcbs: Vec<QuantileLcb>,
    pub mean_lcb: f64,
    pub sample_mean: f64,
    pub max_observed: f64,
}

/// Monte Carlo sample of `e_star` summarized in every requested unit system.
pub fn build_report(model: &EnvelopeModel, config: &McConfig) -> Result<Vec<ErrorDistributionReport>> {
    config.validate()?;
    let scales = config
        .units
        .iter()
        .map(|u| u.scale(model))
        .collect::<Result<Vec<f64>>>()?;
    let sorted = sample_error(model, config.n_samples, config.seed);
    let n = sorted.len();
    let ranks: Vec<Option<usize>> = config
        .quantiles
        .iter()
        .map(|&q| quantile_lcb_rank(n, q, config.confidence))
        .collect();
    let mean_abs = mean_lcb(&sorted, config.confidence)?;
    let sample_mean = sorted.iter().sum::<f64>() / n as f64;
    let max_abs = sorted[n - 1];

    Ok(config
        .units
        .iter()
        .zip(scales)
        .map(|(&units, scale)| ErrorDistributionReport {
            metric: model.metric().kind,
            units,
            scale,
            n_samples: n,
            seed: config.seed,
            confidence: config.confidence,
            quantile_lcbs: config
                .quantiles
                .iter()
                .zip(&ranks)
                .map(|(&q, r)| QuantileLcb {
                    q,
                    lcb: r.map(|k| sorted[k - 1] / scale),
                })
                .collect(),
            mean_lcb: mean_abs / scale,
            sample_mean: sample_mean / scale,
            max_observed: max_abs / scale,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;

    #[test]
    fn binomial_ten_half() {
        assert!((binomial_upper_tail(10, 0.5, 2) - 1013.0 / 1024.0).abs() < 1e-14);
        assert!((binomial_upper_tail(10, 0.5, 3) - 968.0 / 1024.0).abs() < 1e-14);
        assert_eq!(quantile_lcb_rank(10, 0.5, 0.95), Some(2));
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(quantile_lcb(&v, 0.5, 0.95), Some(2.0));
    }

    #[test]
    fn extreme_quantile_has_no_bound() {
        assert_eq!(quantile_lcb(&[1.0, 2.0, 3.0], 0.01, 0.95), None);
        assert_eq!(quantile_lcb_rank(10, 1e-6, 0.95), None);
    }

    #[test]
    fn constant_sample() {
        let v = vec![2.5; 50];
        assert_eq!(quantile_lcb(&v, 0.5, 0.95), Some(2.5));
        assert_eq!(mean_lcb(&v, 0.95).unwrap(), 2.5);
    }

    #[test]
    fn mean_lcb_formula() {
        // 100 values with mean 1 and sample sd exactly 1
        let half = (99.0f64 / 100.0).sqrt();
        let v: Vec<f64> = (0..100)
            .map(|i| if i % 2 == 0 { 1.0 + half } else { 1.0 - half })
            .collect();
        let got = mean_lcb(&v, 0.95).unwrap();
        assert!((got - (1.0 - 1.6448536269514722 * 0.1)).abs() < 1e-12, "{got}");
        assert!((got - 0.8355).abs() < 1e-4);
        assert!(matches!(mean_lcb(&[1.0], 0.95), Err(Error::Degenerate(_))));
    }

    #[test]
    fn normal_quantile_table() {
        assert!((standard_normal_quantile(0.95) - 1.6448536269514722).abs() < 1e-9);
        assert!((standard_normal_quantile(0.975) - 1.959963984540054).abs() < 1e-9);
        assert!(standard_normal_quantile(0.5).abs() < 1e-12);
    }

    #[test]
    fn sample_points_are_stable() {
        assert_eq!(sample_point(3, 17, 4), sample_point(3, 17, 4));
        assert_ne!(sample_point(3, 17, 4), sample_point(3, 18, 4));
        assert!(sample_point(1, 0, 100).iter().all(|c| (0.0..1.0).contains(c)));
    }

    #[test]
    fn determined_function_has_zero_error_everywhere() {
        let ds = Dataset::new(1, vec![vec![0.0], vec![1.0]], vec![0.0, 1.0]).unwrap();
        let m = EnvelopeModel::new(ds, MetricKind::Supremum);
        let s = sample_error(&m, 1000, 4);
        assert!(s.iter().all(|e| e.abs() < 1e-15));
    }

    #[test]
    fn report_units_rescale() {
        let ds = Dataset::new(
            2,
            vec![vec![0.1, 0.1], vec![0.9, 0.6], vec![0.3, 0.8]],
            vec![1.0, 3.0, 2.0],
        )
        .unwrap();
        let m = EnvelopeModel::new(ds, MetricKind::Supremum);
        let cfg = McConfig {
            n_samples: 500,
            units: vec![Units::Absolute, Units::KhatOver2, Units::GammaHat],
            ..Default::default()
        };
        let rows = build_report(&m, &cfg).unwrap();
        assert_eq!(rows.len(), 3);
        let (abs, k2) = (&rows[0], &rows[1]);
        assert_eq!(k2.scale, m.khat() / 2.0);
        assert_eq!(rows[2].scale, 2.0);
        for (a, b) in abs.quantile_lcbs.iter().zip(&k2.quantile_lcbs) {
            let (a, b) = (a.lcb.unwrap(), b.lcb.unwrap());
            assert!((b * k2.scale - a).abs() <= 2.0 * f64::EPSILON * a.abs());
        }
        assert!(abs.quantile_lcbs.windows(2).all(|w| w[0].lcb <= w[1].lcb));
        assert!(abs.quantile_lcbs.iter().all(|q| q.lcb.unwrap() <= abs.max_observed));
    }

    #[test]
    fn config_validation() {
        let c = McConfig {
            confidence: 1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = McConfig {
            quantiles: vec![0.5, 1.2],
            ..Default::default()
        };
        assert!(c.validate().is_err());
        assert!("khat2".parse::<Units>().is_ok());
        assert!("furlong".parse::<Units>().is_err());
    }
}
