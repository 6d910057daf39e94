use std::fs::File;

use emucheck::bounds::CornerSearch;
use emucheck::dataset::read_points_csv;
use emucheck::report::BurdenEntry;
use emucheck::{
    analyze, build_report, burden_lower_bound, centroid_verdict, corner_lower_bound, covering_upper_bound,
    scaled_error_bound, synthesize, Centering, Dataset, EnvelopeModel, Error, McConfig, MetricKind, ReportConfig,
};
use serde_json::{json, Value};

use crate::args::{CenteringArg, Command, CornerArgs, DataArgs, Kappa, McArgs, SeedArgs};
use crate::render::{Outcome, Table};

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn from_core(context: &str, e: Error) -> Self {
        let code = if e.is_degenerate() { 3 } else { 2 };
        let message = if context.is_empty() {
            e.to_string()
        } else {
            format!("{context}: {e}")
        };
        Self { code, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from_core("", e)
    }
}

pub enum Output {
    Structured(Outcome),
    Raw(String),
}

fn seed(args: &SeedArgs, strict: bool) -> Result<u64, Failure> {
    match args.seed {
        Some(s) => Ok(s),
        None if strict => Err(Failure::usage("--seed is required with --strict")),
        None => Ok(0),
    }
}

fn search(corners: &CornerArgs, seed: u64) -> Result<CornerSearch, Failure> {
    if corners.budget == 0 {
        return Err(Failure::usage("--budget must be at least 1"));
    }
    Ok(CornerSearch {
        mode: corners.mode,
        budget: corners.budget,
        seed,
    })
}

fn mc_config(mc: &McArgs, seed: u64) -> Result<McConfig, Failure> {
    let config = McConfig {
        n_samples: mc.samples,
        seed,
        confidence: mc.confidence,
        quantiles: mc.quantiles.clone(),
        units: mc.units.clone(),
    };
    config.validate()?;
    Ok(config)
}

fn load(data: &DataArgs) -> Result<Dataset, Failure> {
    let column = data.value_column.clone().unwrap_or_default();
    Dataset::load_csv(&data.data, &column)
        .map_err(|e| Failure::from_core(&format!("--data {}", data.data.display()), e))
}

fn models(data: &DataArgs) -> Result<Vec<EnvelopeModel>, Failure> {
    let ds = load(data)?;
    let centering = match data.centering {
        CenteringArg::Argmin => Centering::ArgminPower,
        CenteringArg::Mean => Centering::Mean,
    };
    data.metric
        .kinds()
        .into_iter()
        .map(|kind| {
            let model = EnvelopeModel::new(ds.clone(), kind).with_centering(centering);
            match data.kappa {
                Kappa::Auto => Ok(model),
                Kappa::Value(k) => model.with_kappa(k).map_err(|e| Failure::from_core("--kappa", e)),
            }
        })
        .collect()
}

/// One JSON object per metric, or an array when several metrics were requested.
fn per_metric(values: Vec<Value>) -> Value {
    if values.len() == 1 {
        values.into_iter().next().expect("one value")
    } else {
        Value::Array(values)
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn run(command: &Command, strict: bool) -> Result<Output, Failure> {
    let outcome = match command {
        Command::Lipschitz(data) => {
            let values = models(data)?
                .iter()
                .map(|m| {
                    json!({
                        "metric": m.metric().kind,
                        "dim": m.dim(),
                        "n_observations": m.dataset().len(),
                        "khat": m.khat(),
                        "gamma_bar": m.gamma_bar(),
                        "gamma_hat": m.gamma_hat(),
                        "centering": m.centering(),
                    })
                })
                .collect();
            Outcome::new(per_metric(values))
        }
        Command::Envelope { data, points } => envelope(data, points)?,
        Command::Burden { data, eps } => {
            let mut values = Vec::new();
            let mut rows = Vec::new();
            for m in models(data)? {
                let entries = eps
                    .epsilon
                    .iter()
                    .map(|e| burden_lower_bound(&m, *e).map(|b| BurdenEntry::from(&b)))
                    .collect::<Result<Vec<_>, _>>()?;
                for b in &entries {
                    rows.push(vec![
                        json!(m.metric().kind),
                        json!(b.epsilon_spec),
                        json!(b.epsilon),
                        json!(b.bound),
                        json!(b.log10_bound),
                    ]);
                }
                values.push(json!({
                    "metric": m.metric().kind,
                    "dim": m.dim(),
                    "khat": m.khat(),
                    "gamma_bar": m.gamma_bar(),
                    "gamma_hat": m.gamma_hat(),
                    "burden": entries,
                }));
            }
            Outcome {
                value: per_metric(values),
                table: Some(Table {
                    headers: strings(&["metric", "epsilon_spec", "epsilon", "bound", "log10_bound"]),
                    rows,
                }),
            }
        }
        Command::Corners { data, corners, seed: s } => {
            let search = search(corners, seed(s, strict)?)?;
            let values = supremum_models(data)?
                .iter()
                .map(|m| {
                    let r = corner_lower_bound(m, &search)?;
                    let mut v = to_value(&r);
                    let o = v.as_object_mut().expect("object");
                    o.insert("khat".into(), json!(m.khat()));
                    o.insert("kappa".into(), json!(m.kappa()));
                    o.insert("seed".into(), json!(search.seed));
                    Ok(v)
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            Outcome::new(per_metric(values))
        }
        Command::Mc { data, mc, seed: s } => {
            let config = mc_config(mc, seed(s, strict)?)?;
            let mut rows = Vec::new();
            for m in models(data)? {
                rows.extend(build_report(&m, &config)?);
            }
            let table = mc_table(&rows, &config);
            Outcome {
                value: to_value(&rows),
                table: Some(table),
            }
        }
        Command::Verdict {
            data,
            corners,
            seed: s,
            k_hypothetical,
        } => {
            let search = search(corners, seed(s, strict)?)?;
            let values = supremum_models(data)?
                .iter()
                .map(|m| {
                    let c = corner_lower_bound(m, &search)?;
                    let v = centroid_verdict(m, c.lower)?;
                    let scaled = k_hypothetical
                        .map(|k| {
                            scaled_error_bound(m, c.lower, k).map_err(|e| Failure::from_core("--k-hypothetical", e))
                        })
                        .transpose()?;
                    Ok(json!({
                        "khat": m.khat(),
                        "verdict": v,
                        "corners": c,
                        "k_hypothetical": k_hypothetical,
                        "scaled_error_bound": scaled,
                    }))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            Outcome::new(per_metric(values))
        }
        Command::Cover { kplus, epsilon, dim } => {
            let count = covering_upper_bound(*kplus, *epsilon, *dim)
                .map_err(|e| Failure::from_core("--kplus/--epsilon/--dim", e))?;
            Outcome::new(json!({
                "k_plus": kplus,
                "epsilon": epsilon,
                "dim": dim,
                "bound": count.exact,
                "log10_bound": count.log10,
            }))
        }
        Command::Report {
            data,
            eps,
            corners,
            mc,
            seed: s,
            k_hypothetical,
        } => {
            let seed = seed(s, strict)?;
            let config = ReportConfig {
                epsilons: eps.epsilon.clone(),
                search: search(corners, seed)?,
                mc: mc_config(mc, seed)?,
                k_hypothetical: *k_hypothetical,
            };
            let values = models(data)?
                .iter()
                .map(|m| analyze(m, &config).map(|r| to_value(&r)))
                .collect::<Result<Vec<_>, _>>()?;
            Outcome::new(per_metric(values))
        }
        Command::Synth { kind, dim, n, seed } => {
            let (ds, _) = synthesize(*kind, *dim, *n, *seed, MetricKind::Supremum)?;
            let mut buf = Vec::new();
            ds.write_csv(&mut buf)?;
            return Ok(Output::Raw(String::from_utf8(buf).expect("csv is utf8")));
        }
    };
    Ok(Output::Structured(outcome))
}

fn supremum_models(data: &DataArgs) -> Result<Vec<EnvelopeModel>, Failure> {
    let ms = models(data)?;
    if ms.iter().any(|m| m.metric().kind != MetricKind::Supremum) {
        return Err(Failure::usage("--metric: corner bounds and the verdict require linf"));
    }
    Ok(ms)
}

fn strings(s: &[&str]) -> Vec<String> {
    s.iter().map(|x| (*x).to_owned()).collect()
}

fn envelope(data: &DataArgs, points: &std::path::Path) -> Result<Outcome, Failure> {
    let ms = models(data)?;
    let dim = ms[0].dim();
    let file = File::open(points).map_err(|e| Failure::usage(format!("--points {}: {e}", points.display())))?;
    let query =
        read_points_csv(file, dim).map_err(|e| Failure::from_core(&format!("--points {}", points.display()), e))?;
    let mut headers: Vec<String> = vec!["metric".into()];
    headers.extend((1..=dim).map(|j| format!("w{j}")));
    headers.extend(strings(&["e_plus", "e_minus", "e_star", "f_star"]));
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for m in &ms {
        let admissible = m.kappa_admissible();
        let mut records = Vec::new();
        for w in &query {
            let e = m.envelope_at(w)?;
            let f_star = admissible.then(|| e.midpoint());
            let mut row = vec![json!(m.metric().kind)];
            row.extend(w.iter().map(|c| json!(c)));
            row.extend([json!(e.e_plus), json!(e.e_minus), json!(e.e_star), json!(f_star)]);
            rows.push(row);
            records.push(json!({
                "w": w,
                "e_plus": e.e_plus,
                "e_minus": e.e_minus,
                "e_star": e.e_star,
                "f_star": f_star,
            }));
        }
        values.push(json!({
            "metric": m.metric().kind,
            "kappa": m.kappa(),
            "khat": m.khat(),
            "kappa_admissible": admissible,
            "points": records,
        }));
    }
    Ok(Outcome {
        value: per_metric(values),
        table: Some(Table { headers, rows }),
    })
}

fn mc_table(rows: &[emucheck::ErrorDistributionReport], config: &McConfig) -> Table {
    let mut headers = strings(&["metric", "units", "scale", "n_samples", "seed", "confidence"]);
    headers.extend(config.quantiles.iter().map(|q| format!("lcb_q{q}")));
    headers.extend(strings(&["mean_lcb", "sample_mean", "max_observed"]));
    let rows = rows
        .iter()
        .map(|r| {
            let mut row = vec![
                json!(r.metric),
                json!(r.units),
                json!(r.scale),
                json!(r.n_samples),
                json!(r.seed),
                json!(r.confidence),
            ];
            row.extend(r.quantile_lcbs.iter().map(|q| json!(q.lcb)));
            row.extend([json!(r.mean_lcb), json!(r.sample_mean), json!(r.max_observed)]);
            row
        })
        .collect();
    Table { headers, rows }
}
