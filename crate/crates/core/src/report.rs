//! Full analysis of one dataset under one metric, assembled into a single
//! serializable report. Analyses whose preconditions fail are skipped and
//! the reason is recorded in `notes`.

use serde::Serialize;

use crate::bounds::{
    burden_lower_bound, centroid_verdict, corner_lower_bound, global_f_bounds, scaled_error_bound, BurdenBound,
    CornerMode, CornerSearch, EpsilonSpec, GlobalFBounds, Verdict,
};
use crate::envelope::{Centering, EnvelopeModel};
use crate::error::Result;
use crate::metric::MetricKind;
use crate::montecarlo::{build_report, ErrorDistributionReport, McConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportConfig {
    pub epsilons: Vec<EpsilonSpec>,
    pub search: CornerSearch,
    pub mc: McConfig,
    /// Optional hypothetical Lipschitz constant for the scaled error bound.
    pub k_hypothetical: Option<f64>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![EpsilonSpec::FractionOfKhat(0.01), EpsilonSpec::FractionOfKhat(0.5)],
            search: CornerSearch::default(),
            mc: McConfig::default(),
            k_hypothetical: None,
        }
    }
}

/// One burden row; `bound` is null when the count exceeds `u64`, in which
/// case `log10_bound` carries it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BurdenEntry {
    pub epsilon: f64,
    pub epsilon_spec: EpsilonSpec,
    pub bound: Option<u64>,
    pub log10_bound: f64,
    pub term_k: f64,
    pub log10_term_k: f64,
    pub term_sum: f64,
    pub log10_term_sum: f64,
}

impl From<&BurdenBound> for BurdenEntry {
    fn from(b: &BurdenBound) -> Self {
        Self {
            epsilon: b.epsilon,
            epsilon_spec: b.epsilon_spec,
            bound: b.bound.exact,
            log10_bound: b.bound.log10,
            term_k: b.term_k,
            log10_term_k: b.log10_term_k,
            term_sum: b.term_sum,
            log10_term_sum: b.log10_term_sum,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub khat: f64,
    pub gamma_bar: f64,
    pub gamma_hat: f64,
    pub sup_estar_lower: Option<f64>,
    pub sup_estar_upper: Option<f64>,
    pub verdict: Option<Verdict>,
    pub burden: Vec<BurdenEntry>,
    pub global_f: Option<GlobalFBounds>,
    /// Corner search mode actually run.
    pub mode: Option<CornerMode>,
    pub seed: u64,
    pub metric: MetricKind,
    pub dim: usize,
    pub n_observations: usize,
    pub kappa: f64,
    pub centering: Centering,
    /// True when every corner was evaluated; otherwise `sup_estar_lower` is a
    /// lower bound only, not the maximum over corners.
    pub certified_max_over_corners: Option<bool>,
    pub corners_evaluated: Option<u64>,
    pub argmax_corner: Option<String>,
    pub k_hypothetical: Option<f64>,
    pub scaled_error_bound: Option<f64>,
    pub error_distribution: Vec<ErrorDistributionReport>,
    pub notes: Vec<String>,
}

/// Runs every analysis whose preconditions hold. Only invalid configuration
/// is an error; data-dependent failures become notes.
pub fn analyze(model: &EnvelopeModel, config: &ReportConfig) -> Result<AnalysisReport> {
    config.mc.validate()?;
    let mut notes = Vec::new();

    let mut burden = Vec::new();
    for eps in &config.epsilons {
        match burden_lower_bound(model, *eps) {
            Ok(b) => burden.push(BurdenEntry::from(&b)),
            Err(e) => {
                skip(&mut notes, &format!("burden at epsilon {eps}"), e);
                break;
            }
        }
    }

    let mut corners = None;
    let mut verdict = None;
    let mut global_f = None;
    if model.metric().kind == MetricKind::Supremum {
        match corner_lower_bound(model, &config.search) {
            Ok(c) => corners = Some(c),
            Err(e) => skip(&mut notes, "corner bounds", e),
        }
        if let Some(c) = &corners {
            match centroid_verdict(model, c.lower) {
                Ok(v) => verdict = Some(v),
                Err(e) => skip(&mut notes, "verdict", e),
            }
        }
        match global_f_bounds(model, &config.search) {
            Ok(g) => global_f = Some(g),
            Err(e) => skip(&mut notes, "global bounds on f", e),
        }
    } else {
        notes.push("corner bounds, verdict and global bounds on f skipped: they require the supremum metric".into());
    }

    let scaled = match (config.k_hypothetical, &corners) {
        (Some(k), Some(c)) => match scaled_error_bound(model, c.lower, k) {
            Ok(v) => Some(v),
            Err(e) => {
                skip(&mut notes, "scaled error bound", e);
                None
            }
        },
        _ => None,
    };

    let error_distribution = match build_report(model, &config.mc) {
        Ok(rows) => rows,
        Err(e) => {
            skip(&mut notes, "error distribution", e);
            Vec::new()
        }
    };
    if !error_distribution.is_empty() {
        notes.push("mean lower confidence bounds use a z-test and have approximate coverage".into());
    }

    Ok(AnalysisReport {
        khat: model.khat(),
        gamma_bar: model.gamma_bar(),
        gamma_hat: model.gamma_hat(),
        sup_estar_lower: corners.as_ref().map(|c| c.lower),
        sup_estar_upper: corners.as_ref().map(|c| c.upper),
        verdict,
        burden,
        global_f,
        mode: corners.as_ref().map(|c| c.mode),
        seed: config.search.seed,
        metric: model.metric().kind,
        dim: model.dim(),
        n_observations: model.dataset().len(),
        kappa: model.kappa(),
        centering: model.centering(),
        certified_max_over_corners: corners.as_ref().map(|c| c.exhaustive),
        corners_evaluated: corners.as_ref().map(|c| c.corners_evaluated),
        argmax_corner: corners.map(|c| c.argmax_corner),
        k_hypothetical: config.k_hypothetical,
        scaled_error_bound: scaled,
        error_distribution,
        notes,
    })
}

fn skip(notes: &mut Vec<String>, what: &str, e: crate::error::Error) {
    notes.push(format!("{what} skipped: {e}"));
}
