//! Global bounds: the burden lower bound, the covering upper bound, corner
//! brackets on the maximum potential error, the centroid verdict and global
//! bounds on the function itself.

use std::f64::consts::LN_10;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corners::{self, corner_string, Objective};
use crate::envelope::{EnvelopeModel, KAPPA_RELATIVE_SLACK};
use crate::error::{Error, Result};
use crate::metric::{corner_distance_linf, Metric, MetricKind};

/// Default cap on corner evaluations; `2^24`.
pub const DEFAULT_CORNER_BUDGET: u64 = 1 << 24;

/// Largest integer that an `f64` represents exactly.
const EXACT_F64_INT: f64 = 9_007_199_254_740_992.0;

/// A positive count that may be far beyond native range. `exact` is present
/// whenever the value fits in a `u64` without rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargeCount {
    pub exact: Option<u64>,
    pub log10: f64,
}

impl LargeCount {
    pub fn exact(v: u64) -> Self {
        Self {
            exact: Some(v),
            log10: (v as f64).log10(),
        }
    }

    pub fn from_log10(log10: f64) -> Self {
        Self { exact: None, log10 }
    }

    /// Value as a float; may be infinite.
    pub fn approx(&self) -> f64 {
        match self.exact {
            Some(v) => v as f64,
            None => 10f64.powf(self.log10),
        }
    }
}

impl fmt::Display for LargeCount {
    /// Integers up to 10^6 in full, anything larger in scientific notation
    /// built from the log so it never overflows.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(v) if v <= 1_000_000 => write!(f, "{v}"),
            _ => {
                let exp = self.log10.floor();
                let mantissa = 10f64.powf(self.log10 - exp);
                write!(f, "{mantissa:.2}e{exp}")
            }
        }
    }
}

/// Units in which a tolerance `epsilon` is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonSpec {
    Absolute(f64),
    /// Fraction of the empirical Lipschitz constant.
    FractionOfKhat(f64),
    /// Fraction of the sample mean of the observed values.
    FractionOfGammaHat(f64),
}

impl EpsilonSpec {
    pub fn resolve(&self, khat: f64, gamma_hat: f64) -> f64 {
        match *self {
            EpsilonSpec::Absolute(e) => e,
            EpsilonSpec::FractionOfKhat(a) => a * khat,
            EpsilonSpec::FractionOfGammaHat(a) => a * gamma_hat,
        }
    }
}

impl fmt::Display for EpsilonSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonSpec::Absolute(e) => write!(f, "{e}:abs"),
            EpsilonSpec::FractionOfKhat(a) => write!(f, "{a}:khat"),
            EpsilonSpec::FractionOfGammaHat(a) => write!(f, "{a}:gammahat"),
        }
    }
}

impl FromStr for EpsilonSpec {
    type Err = Error;

    /// `VALUE[:abs|khat|gammahat]`; a bare number is absolute.
    fn from_str(s: &str) -> Result<Self> {
        let (num, unit) = match s.trim().split_once(':') {
            Some((n, u)) => (n.trim(), u.trim()),
            None => (s.trim(), "abs"),
        };
        let v: f64 = num
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("--epsilon: `{num}` is not a number")))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidArgument(format!("--epsilon must be positive, got {v}")));
        }
        match unit {
            "abs" | "absolute" => Ok(EpsilonSpec::Absolute(v)),
            "khat" => Ok(EpsilonSpec::FractionOfKhat(v)),
            "gammahat" => Ok(EpsilonSpec::FractionOfGammaHat(v)),
            other => Err(Error::InvalidArgument(format!(
                "--epsilon unit `{other}` (expected abs, khat or gammahat)"
            ))),
        }
    }
}

impl Serialize for EpsilonSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Lower bound on the number of observations any design needs before the
/// minimax emulator is guaranteed to be within `epsilon` everywhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BurdenBound {
    pub epsilon: f64,
    pub epsilon_spec: EpsilonSpec,
    pub metric: MetricKind,
    pub dim: usize,
    /// `khat^p / C_q`, possibly infinite; see `log10_term_k`.
    pub term_k: f64,
    pub log10_term_k: f64,
    /// `sum |f(x) - gamma_bar|^p`, possibly infinite; see `log10_term_sum`.
    pub term_sum: f64,
    pub log10_term_sum: f64,
    /// `max(1, ceil(epsilon^-p (term_k - term_sum)))`.
    pub bound: LargeCount,
}

/// Evaluates the burden bound from its intermediate terms.
///
/// `log10_term_sum` is `log10 sum |f(x) - gamma_bar|^p` (`-inf` for an empty
/// sum). Plain double arithmetic is used while every power stays below
/// `1e300`; beyond that the difference is taken in log space.
pub fn burden_from_terms(
    metric: Metric,
    khat: f64,
    log10_term_sum: f64,
    epsilon: f64,
    epsilon_spec: EpsilonSpec,
) -> Result<BurdenBound> {
    if !(khat > 0.0 && khat.is_finite()) {
        return Err(Error::Degenerate(format!(
            "burden bound needs a positive empirical Lipschitz constant, got {khat}"
        )));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let p = metric.dim as f64;
    let log10_c = metric.ln_ball_volume_constant() / LN_10;
    let log10_term_k = p * khat.log10() - log10_c;
    let log10_eps_p = p * epsilon.log10();

    let plain = [log10_term_k, log10_term_sum, log10_eps_p]
        .iter()
        .all(|l| *l < 300.0 && *l > -300.0 || *l == f64::NEG_INFINITY);
    let bound = if plain {
        let term_k = khat.powf(p) / metric.ball_volume_constant();
        let term_sum = 10f64.powf(log10_term_sum);
        let raw = (term_k - term_sum) / epsilon.powf(p);
        count_from_raw(raw, (term_k - term_sum).log10() - log10_eps_p)
    } else if log10_term_sum >= log10_term_k {
        LargeCount::exact(1)
    } else {
        let gap = (-(10f64.powf(log10_term_sum - log10_term_k))).ln_1p() / LN_10;
        let log10_raw = log10_term_k + gap - log10_eps_p;
        count_from_raw(10f64.powf(log10_raw), log10_raw)
    };

    Ok(BurdenBound {
        epsilon,
        epsilon_spec,
        metric: metric.kind,
        dim: metric.dim,
        term_k: 10f64.powf(log10_term_k),
        log10_term_k,
        term_sum: 10f64.powf(log10_term_sum),
        log10_term_sum,
        bound,
    })
}

fn count_from_raw(raw: f64, log10_raw: f64) -> LargeCount {
    if raw.is_nan() || raw <= 1.0 {
        return LargeCount::exact(1);
    }
    if raw < EXACT_F64_INT {
        return LargeCount::exact(raw.ceil() as u64);
    }
    LargeCount::from_log10(log10_raw)
}

/// Burden lower bound for the model's data at tolerance `epsilon`.
pub fn burden_lower_bound(model: &EnvelopeModel, epsilon: EpsilonSpec) -> Result<BurdenBound> {
    model.ensure_nondegenerate()?;
    let eps = epsilon.resolve(model.khat(), model.gamma_hat());
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} resolves to {eps}; it must be positive"
        )));
    }
    let ln_sum = crate::envelope::ln_power_sum(model.dataset().values(), model.gamma_bar(), model.dim() as f64);
    burden_from_terms(*model.metric(), model.khat(), ln_sum / LN_10, eps, epsilon)
}

/// Number of supremum-metric balls of radius `epsilon / k_plus` that cover
/// the cube: `ceil(k_plus / (2 epsilon))^p`.
pub fn covering_upper_bound(k_plus: f64, epsilon: f64, dim: usize) -> Result<LargeCount> {
    if !(k_plus > 0.0 && k_plus.is_finite() && epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "covering bound needs positive k_plus and epsilon, got {k_plus} and {epsilon}"
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let ratio = k_plus / (2.0 * epsilon);
    // ratios that are integers up to rounding noise (34.68 / 0.6936) are not bumped up
    let nearest = ratio.round();
    let per_axis = if (ratio - nearest).abs() <= 1e-12 * ratio {
        nearest
    } else {
        ratio.ceil()
    }
    .max(1.0);
    let log10 = dim as f64 * per_axis.log10();
    if per_axis < EXACT_F64_INT {
        if let Some(v) = (per_axis as u64).checked_pow(dim as u32) {
            return Ok(LargeCount { exact: Some(v), log10 });
        }
    }
    Ok(LargeCount::from_log10(log10))
}

fn require_supremum(model: &EnvelopeModel, operation: &'static str) -> Result<()> {
    if model.metric().kind == MetricKind::Supremum {
        Ok(())
    } else {
        Err(Error::UnsupportedMetric { operation })
    }
}

/// Upper bound on `sup e_star` from the farthest-corner distance of each
/// observation:
/// `0.5 * (min_x [f(x) + kappa d~(x)] - max_x [f(x) - kappa d~(x)])`.
pub fn corner_upper_bound(model: &EnvelopeModel) -> Result<f64> {
    require_supremum(model, "corner_upper_bound")?;
    let (upper_plus, lower_minus) = farthest_corner_brackets(model);
    Ok(0.5 * (upper_plus - lower_minus))
}

/// `(min_x [f + kappa d~], max_x [f - kappa d~])`, both relative to the
/// model's reference value.
fn farthest_corner_brackets(model: &EnvelopeModel) -> (f64, f64) {
    let kappa = model.kappa();
    let values = model.shifted_values();
    model
        .dataset()
        .points()
        .zip(values)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(hi, lo), (x, f)| {
            let reach = kappa * corner_distance_linf(x);
            (hi.min(f + reach), lo.max(f - reach))
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CornerMode {
    Exhaustive,
    Heuristic,
    /// Exhaustive when `2^p` fits the budget, heuristic otherwise.
    Auto,
}

impl FromStr for CornerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exhaustive" => Ok(Self::Exhaustive),
            "heuristic" => Ok(Self::Heuristic),
            "auto" => Ok(Self::Auto),
            other => Err(Error::InvalidArgument(format!(
                "--mode `{other}` (expected exhaustive, heuristic or auto)"
            ))),
        }
    }
}

impl fmt::Display for CornerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exhaustive => "exhaustive",
            Self::Heuristic => "heuristic",
            Self::Auto => "auto",
        })
    }
}

/// Corner search settings. `budget` caps the number of corner evaluations:
/// exhaustive search needs `2^p <= budget`, and heuristic search restarts
/// local searches until the budget is spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerSearch {
    pub mode: CornerMode,
    pub budget: u64,
    pub seed: u64,
}

impl Default for CornerSearch {
    fn default() -> Self {
        Self {
            mode: CornerMode::Auto,
            budget: DEFAULT_CORNER_BUDGET,
            seed: 0,
        }
    }
}

impl CornerSearch {
    fn resolve(&self, dim: usize) -> Result<CornerMode> {
        let fits = dim < 64 && (1u64 << dim) <= self.budget;
        match self.mode {
            CornerMode::Exhaustive if !fits => Err(Error::BudgetExceeded {
                dim,
                budget: self.budget,
            }),
            CornerMode::Auto if fits => Ok(CornerMode::Exhaustive),
            CornerMode::Auto => Ok(CornerMode::Heuristic),
            m => Ok(m),
        }
    }

    fn run(&self, model: &EnvelopeModel, objective: Objective) -> Result<(CornerMode, corners::CornerHit)> {
        let mode = self.resolve(model.dim())?;
        let hit = match mode {
            CornerMode::Exhaustive => corners::exhaustive(model, objective),
            _ => corners::heuristic(model, objective, self.budget, self.seed),
        };
        Ok((mode, hit))
    }
}

/// Bracket on `sup e_star` from corners.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerBoundReport {
    /// Farthest-corner upper bound.
    pub upper: f64,
    /// Largest `e_star` among evaluated corners; a certified lower bound.
    pub lower: f64,
    /// Corner attaining `lower`; character `i` is coordinate `i`.
    pub argmax_corner: String,
    /// Mode actually run (never `auto`).
    pub mode: CornerMode,
    pub corners_evaluated: u64,
    /// True when every corner was evaluated, so `lower` is the maximum over corners.
    pub exhaustive: bool,
}

pub fn corner_lower_bound(model: &EnvelopeModel, search: &CornerSearch) -> Result<CornerBoundReport> {
    require_supremum(model, "corner_lower_bound")?;
    let upper = corner_upper_bound(model)?;
    let (mode, hit) = search.run(model, Objective::EStar)?;
    Ok(CornerBoundReport {
        upper,
        lower: hit.value,
        argmax_corner: corner_string(&hit.corner),
        mode,
        corners_evaluated: hit.evaluated,
        exhaustive: mode == CornerMode::Exhaustive,
    })
}

/// Lower bound on the maximum potential error of every emulator when the true
/// Lipschitz constant is `k_hypothetical`, given a certified lower bound on
/// `sup e_star` at `kappa = khat`.
pub fn scaled_error_bound(model: &EnvelopeModel, sup_estar_lower: f64, k_hypothetical: f64) -> Result<f64> {
    model.ensure_nondegenerate()?;
    let khat = model.khat();
    if k_hypothetical.is_nan() || k_hypothetical < khat * (1.0 - KAPPA_RELATIVE_SLACK) {
        return Err(Error::InvalidArgument(format!(
            "hypothetical Lipschitz constant {k_hypothetical} is below khat = {khat}"
        )));
    }
    Ok(sup_estar_lower * (k_hypothetical / khat))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub sup_estar_lower: f64,
    pub khat: f64,
    /// `khat / 2`.
    pub threshold: f64,
    pub triggered: bool,
    /// Set when `khat = 0` and the comparison is vacuous.
    pub degenerate: bool,
    pub statement: String,
}

/// Checks whether a certified lower bound on `sup e_star` reaches `khat / 2`.
/// When it does, no emulator trained on the data has a smaller maximum
/// potential error than the constant emulator built from one observation at
/// the centroid.
pub fn centroid_verdict(model: &EnvelopeModel, sup_estar_lower: f64) -> Result<Verdict> {
    require_supremum(model, "centroid_verdict")?;
    let khat = model.khat();
    let threshold = 0.5 * khat;
    if khat == 0.0 {
        return Ok(Verdict {
            sup_estar_lower,
            khat,
            threshold,
            triggered: false,
            degenerate: true,
            statement: "empirical Lipschitz constant is 0; the comparison with the centroid emulator is vacuous".into(),
        });
    }
    let triggered = sup_estar_lower >= threshold;
    let statement = if triggered {
        format!(
            "sup e* >= {sup_estar_lower} >= {threshold} = khat/2: every emulator trained on these observations \
             has maximum potential error >= K/2 (E_K(f^) >= K/2 for every emulator f^), no better than the \
             constant emulator from a single observation at the centroid"
        )
    } else {
        format!("certified sup e* lower bound {sup_estar_lower} is below khat/2 = {threshold}; no conclusion")
    };
    Ok(Verdict {
        sup_estar_lower,
        khat,
        threshold,
        triggered,
        degenerate: false,
        statement,
    })
}

/// Brackets on the global extrema of the envelopes, which bound the function
/// itself when it is no rougher than `kappa`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalFBounds {
    /// Upper bound on `max e_plus`, hence on `max f`.
    pub max_upper: f64,
    /// Best `e_plus` found at a corner.
    pub max_lower: f64,
    /// Lower bound on `min e_minus`, hence on `min f`.
    pub min_lower: f64,
    /// Smallest `e_minus` found at a corner.
    pub min_upper: f64,
    pub max_certified: bool,
    pub min_certified: bool,
}

pub fn global_f_bounds(model: &EnvelopeModel, search: &CornerSearch) -> Result<GlobalFBounds> {
    require_supremum(model, "global_f_bounds")?;
    model.ensure_admissible()?;
    let (max_upper, min_lower) = farthest_corner_brackets(model);
    let (max_upper, min_lower) = (model.reference() + max_upper, model.reference() + min_lower);
    let (_, top) = search.run(model, Objective::EPlus)?;
    let (_, bottom) = search.run(model, Objective::NegEMinus)?;
    let (max_lower, min_upper) = (top.value, -bottom.value);
    Ok(GlobalFBounds {
        max_upper,
        max_lower,
        min_lower,
        min_upper,
        max_certified: (max_upper - max_lower).abs() <= 1e-9,
        min_certified: (min_upper - min_lower).abs() <= 1e-9,
    })
}
