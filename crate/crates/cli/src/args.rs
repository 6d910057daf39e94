use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use emucheck::{CornerMode, EpsilonSpec, MetricKind, SyntheticKind, Units, ValueColumn};

#[derive(Debug, Parser)]
#[command(
    name = "emucheck",
    version,
    about = "Worst-case error bounds for Lipschitz emulators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "EMUCHECK_THREADS")]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Require an explicit --seed wherever randomness is involved.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Empirical Lipschitz constant and centering constants.
    Lipschitz(DataArgs),
    /// Envelopes and the minimax emulator at query points.
    Envelope {
        #[command(flatten)]
        data: DataArgs,
        /// CSV of query points with one column per coordinate.
        #[arg(long)]
        points: PathBuf,
    },
    /// Lower bound on the number of observations for a target accuracy.
    Burden {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        eps: EpsilonArgs,
    },
    /// Corner brackets on the maximum potential error (supremum metric).
    Corners {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        corners: CornerArgs,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Monte Carlo distribution of the pointwise error.
    Mc {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Whether the data rule out beating a single centroid observation.
    Verdict {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        corners: CornerArgs,
        #[command(flatten)]
        seed: SeedArgs,
        /// Hypothetical true Lipschitz constant for the scaled error bound.
        #[arg(long)]
        k_hypothetical: Option<f64>,
    },
    /// Covering upper bound on the observations needed.
    Cover {
        /// Upper bound on the true Lipschitz constant.
        #[arg(long)]
        kplus: f64,
        /// Target accuracy in absolute units.
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        dim: usize,
    },
    /// Every analysis whose preconditions hold.
    Report {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        eps: EpsilonArgs,
        #[command(flatten)]
        corners: CornerArgs,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long)]
        k_hypothetical: Option<f64>,
    },
    /// Writes a synthetic dataset as CSV.
    Synth {
        /// linear, constant, product-sine or random-lipschitz.
        #[arg(long, value_parser = SyntheticKind::from_str)]
        kind: SyntheticKind,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Observations as CSV: one column per coordinate plus a value column.
    #[arg(long)]
    pub data: PathBuf,

    /// Value column by name or 0-based index; defaults to the last column.
    #[arg(long, value_parser = ValueColumn::from_str)]
    pub value_column: Option<ValueColumn>,

    /// l2, linf or both.
    #[arg(long, default_value = "linf", value_parser = MetricChoice::from_str)]
    pub metric: MetricChoice,

    /// Lipschitz budget: `auto` for the empirical constant, or a number.
    #[arg(long, default_value = "auto", value_parser = Kappa::from_str)]
    pub kappa: Kappa,

    #[arg(long, value_enum, default_value_t = CenteringArg::Argmin)]
    pub centering: CenteringArg,
}

#[derive(Debug, Clone, Args)]
pub struct EpsilonArgs {
    /// Comma-separated tolerances, each `VALUE[:abs|khat|gammahat]`.
    #[arg(long, value_delimiter = ',', value_parser = EpsilonSpec::from_str, default_value = "0.01:khat,0.5:khat")]
    pub epsilon: Vec<EpsilonSpec>,
}

#[derive(Debug, Clone, Args)]
pub struct CornerArgs {
    #[arg(long, default_value = "auto", value_parser = CornerMode::from_str)]
    pub mode: CornerMode,

    /// Maximum number of corner evaluations.
    #[arg(long, default_value_t = emucheck::bounds::DEFAULT_CORNER_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,

    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,

    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
    pub quantiles: Vec<f64>,

    /// Comma-separated: khat2, gammahat, abs.
    #[arg(long, value_delimiter = ',', value_parser = Units::from_str, default_value = "khat2")]
    pub units: Vec<Units>,
}

#[derive(Debug, Clone, Args)]
pub struct SeedArgs {
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricChoice {
    One(MetricKind),
    Both,
}

impl MetricChoice {
    pub fn kinds(self) -> Vec<MetricKind> {
        match self {
            MetricChoice::One(k) => vec![k],
            MetricChoice::Both => vec![MetricKind::Euclidean, MetricKind::Supremum],
        }
    }
}

impl FromStr for MetricChoice {
    type Err = emucheck::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "both" => Ok(MetricChoice::Both),
            other => other.parse().map(MetricChoice::One),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Auto,
    Value(f64),
}

impl FromStr for Kappa {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "auto" => Ok(Kappa::Auto),
            other => match other.parse::<f64>() {
                Ok(v) if v.is_finite() && v >= 0.0 => Ok(Kappa::Value(v)),
                _ => Err(format!("expected `auto` or a finite number >= 0, got `{other}`")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CenteringArg {
    /// Minimizer of the sum of p-th power deviations.
    Argmin,
    /// Sample mean.
    Mean,
}
