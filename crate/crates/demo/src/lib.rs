//! Browser bindings: envelope curves in one dimension, an error heatmap in
//! two dimensions with corner brackets, and a burden sweep.
//!
//! Points are passed flat and row-major; results come back as flat arrays.

use emucheck::{
    burden_lower_bound, corner_lower_bound, CornerMode, CornerSearch, Dataset, EnvelopeModel, EpsilonSpec, MetricKind,
};
use wasm_bindgen::prelude::*;

fn metric(name: &str) -> Result<MetricKind, String> {
    name.parse::<MetricKind>().map_err(|e| e.to_string())
}

fn model(dim: usize, points: &[f64], values: &[f64], kind: MetricKind, kappa: f64) -> Result<EnvelopeModel, String> {
    let ds = Dataset::from_flat(dim, points.to_vec(), values.to_vec()).map_err(|e| e.to_string())?;
    let m = EnvelopeModel::new(ds, kind);
    if kappa > 0.0 {
        m.with_kappa(kappa).map_err(|e| e.to_string())
    } else {
        Ok(m)
    }
}

/// Rows `e_plus`, `e_minus`, `f_star`, `fbar`, each of length `samples`, on an
/// even grid over `[0, 1]`. `kappa <= 0` selects the empirical constant.
/// `f_star` and `fbar` are NaN where they are undefined.
pub fn curves(xs: &[f64], fs: &[f64], kappa: f64, samples: usize) -> Result<Vec<f64>, String> {
    if samples < 2 {
        return Err("need at least 2 samples".into());
    }
    let m = model(1, xs, fs, MetricKind::Supremum, kappa)?;
    let mut out = vec![f64::NAN; 4 * samples];
    for k in 0..samples {
        let w = [k as f64 / (samples - 1) as f64];
        let e = m.envelope_at(&w).map_err(|e| e.to_string())?;
        out[k] = e.e_plus;
        out[samples + k] = e.e_minus;
        if let Ok(v) = m.minimax_emulator_at(&w) {
            out[2 * samples + k] = v;
        }
        if let Ok(v) = m.fbar_at(&w) {
            out[3 * samples + k] = v;
        }
    }
    Ok(out)
}

/// `e_star` on a `resolution x resolution` grid over the unit square, row by row
/// from `y = 0`.
pub fn heatmap(
    points: &[f64],
    values: &[f64],
    metric_name: &str,
    kappa: f64,
    resolution: usize,
) -> Result<Vec<f64>, String> {
    if resolution < 2 {
        return Err("resolution must be at least 2".into());
    }
    let m = model(2, points, values, metric(metric_name)?, kappa)?;
    let step = 1.0 / (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        for col in 0..resolution {
            out.push(m.e_star(&[col as f64 * step, row as f64 * step]));
        }
    }
    Ok(out)
}

/// `[lower, upper, khat]`: exhaustive corner bracket on `sup e_star` under the
/// supremum metric.
pub fn corners(dim: usize, points: &[f64], values: &[f64], kappa: f64) -> Result<Vec<f64>, String> {
    let m = model(dim, points, values, MetricKind::Supremum, kappa)?;
    let search = CornerSearch {
        mode: CornerMode::Auto,
        budget: 1 << 20,
        seed: 0,
    };
    let r = corner_lower_bound(&m, &search).map_err(|e| e.to_string())?;
    Ok(vec![r.lower, r.upper, m.khat()])
}

/// `log10` of the burden bound at each tolerance, given as fractions of khat.
pub fn burden(
    dim: usize,
    points: &[f64],
    values: &[f64],
    metric_name: &str,
    fractions: &[f64],
) -> Result<Vec<f64>, String> {
    let m = model(dim, points, values, metric(metric_name)?, 0.0)?;
    fractions
        .iter()
        .map(|&a| {
            burden_lower_bound(&m, EpsilonSpec::FractionOfKhat(a))
                .map(|b| b.bound.log10)
                .map_err(|e| e.to_string())
        })
        .collect()
}

#[wasm_bindgen(js_name = envelopeCurves)]
pub fn envelope_curves(xs: &[f64], fs: &[f64], kappa: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    curves(xs, fs, kappa, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = errorHeatmap)]
pub fn error_heatmap(
    points: &[f64],
    values: &[f64],
    metric: &str,
    kappa: f64,
    resolution: usize,
) -> Result<Vec<f64>, JsError> {
    heatmap(points, values, metric, kappa, resolution).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = cornerBracket)]
pub fn corner_bracket(dim: usize, points: &[f64], values: &[f64], kappa: f64) -> Result<Vec<f64>, JsError> {
    corners(dim, points, values, kappa).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = burdenSweep)]
pub fn burden_sweep(
    dim: usize,
    points: &[f64],
    values: &[f64],
    metric: &str,
    fractions: &[f64],
) -> Result<Vec<f64>, JsError> {
    burden(dim, points, values, metric, fractions).map_err(|e| JsError::new(&e))
}
