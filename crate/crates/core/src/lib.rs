//! Worst-case error bounds for Lipschitz emulators of expensive black-box
//! functions on the unit cube.
//!
//! Given observations `(x, f(x))` and a Lipschitz budget `kappa`, the upper and
//! lower envelopes of all admissible functions determine the pointwise
//! minimax error `e_star`. From them this crate derives the empirical
//! Lipschitz constant, the minimax emulator, a lower bound on the number of
//! observations any design needs for a target accuracy, corner brackets on
//! the maximum potential error and Monte Carlo summaries of its distribution.

pub mod bounds;
pub mod corners;
pub mod dataset;
pub mod envelope;
pub mod error;
pub mod metric;
pub mod montecarlo;
pub mod report;

pub use bounds::{
    burden_from_terms, burden_lower_bound, centroid_verdict, corner_lower_bound, corner_upper_bound,
    covering_upper_bound, global_f_bounds, scaled_error_bound, BurdenBound, CornerBoundReport, CornerMode,
    CornerSearch, EpsilonSpec, GlobalFBounds, LargeCount, Verdict,
};
pub use dataset::{synthesize, Dataset, SyntheticKind, ValueColumn};
pub use envelope::{empirical_lipschitz, gamma_bar, Centering, Envelope, EnvelopeModel, Region};
pub use error::{Error, Result};
pub use metric::{Metric, MetricKind};
pub use montecarlo::{build_report, mean_lcb, quantile_lcb, sample_error, ErrorDistributionReport, McConfig, Units};
pub use report::{analyze, AnalysisReport, ReportConfig};
