//! Pinned Monte Carlo report, checked byte-for-byte and against a plain
//! reimplementation of the formulas.

use std::path::PathBuf;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const SEED: u64 = 2017;
const SAMPLES: usize = 2000;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run() -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_emucheck"))
        .args([
            "mc",
            "--data",
            fixture("golden_data.csv").to_str().unwrap(),
            "--metric",
            "both",
        ])
        .args([
            "--units",
            "khat2,gammahat",
            "--samples",
            &SAMPLES.to_string(),
            "--seed",
            &SEED.to_string(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    out.stdout
}

#[test]
fn report_bytes_are_pinned() {
    let expected = std::fs::read(fixture("golden_mc.json")).unwrap();
    assert_eq!(String::from_utf8(run()).unwrap(), String::from_utf8(expected).unwrap());
}

fn load() -> (Vec<Vec<f64>>, Vec<f64>) {
    let text = std::fs::read_to_string(fixture("golden_data.csv")).unwrap();
    let mut pts = Vec::new();
    let mut vals = Vec::new();
    for line in text.lines().skip(1) {
        let mut row: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        vals.push(row.pop().unwrap());
        pts.push(row);
    }
    (pts, vals)
}

fn dist(sup: bool, a: &[f64], b: &[f64]) -> f64 {
    let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    if sup {
        diffs.fold(0.0, f64::max)
    } else {
        diffs.map(|d| d * d).sum::<f64>().sqrt()
    }
}

/// Largest k with P(Bin(n, q) >= k) >= conf, from the pmf ratio recursion
/// started at the mode and normalized at the end.
fn rank(n: usize, q: f64, conf: f64) -> Option<usize> {
    let mode = ((n + 1) as f64 * q).floor() as usize;
    let mut pmf = vec![0.0; n + 1];
    pmf[mode] = 1.0;
    for i in mode + 1..=n {
        pmf[i] = pmf[i - 1] * (n - i + 1) as f64 / i as f64 * q / (1.0 - q);
    }
    for i in (0..mode).rev() {
        pmf[i] = pmf[i + 1] * (i + 1) as f64 / (n - i) as f64 * (1.0 - q) / q;
    }
    let total: f64 = pmf.iter().sum();
    pmf.iter_mut().for_each(|p| *p /= total);
    let mut tail = 0.0;
    let mut best = None;
    for k in (1..=n).rev() {
        tail += pmf[k];
        if tail >= conf {
            best = Some(k);
            break;
        }
    }
    best
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + b.abs())
}

#[test]
fn report_matches_plain_reimplementation() {
    let (pts, vals) = load();
    let golden: Value = serde_json::from_slice(&std::fs::read(fixture("golden_mc.json")).unwrap()).unwrap();
    let rows = golden.as_array().unwrap();
    let gamma_hat = vals.iter().sum::<f64>() / vals.len() as f64;
    for (m, sup) in [false, true].into_iter().enumerate() {
        let mut khat: f64 = 0.0;
        for i in 0..pts.len() {
            for j in 0..i {
                khat = khat.max((vals[i] - vals[j]).abs() / dist(sup, &pts[i], &pts[j]));
            }
        }
        let mut errs: Vec<f64> = (0..SAMPLES as u64)
            .map(|i| {
                let mut r = ChaCha8Rng::seed_from_u64(SEED);
                r.set_stream(i);
                let w: Vec<f64> = (0..4).map(|_| r.random::<f64>()).collect();
                let up = pts
                    .iter()
                    .zip(&vals)
                    .map(|(x, f)| f + khat * dist(sup, x, &w))
                    .fold(f64::INFINITY, f64::min);
                let lo = pts
                    .iter()
                    .zip(&vals)
                    .map(|(x, f)| f - khat * dist(sup, x, &w))
                    .fold(f64::NEG_INFINITY, f64::max);
                0.5 * (up - lo)
            })
            .collect();
        errs.sort_by(f64::total_cmp);
        let n = errs.len() as f64;
        let mean = errs.iter().sum::<f64>() / n;
        let sd = (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let mean_lcb = (mean - 1.6448536269514722 * sd / n.sqrt()).max(0.0);
        for (u, scale) in [khat / 2.0, gamma_hat].into_iter().enumerate() {
            let row = &rows[2 * m + u];
            assert!(close(row["scale"].as_f64().unwrap(), scale));
            for q in row["quantile_lcbs"].as_array().unwrap() {
                let k = rank(SAMPLES, q["q"].as_f64().unwrap(), 0.95).unwrap();
                assert!(
                    close(q["lcb"].as_f64().unwrap(), errs[k - 1] / scale),
                    "metric {m} units {u}"
                );
            }
            assert!(close(row["mean_lcb"].as_f64().unwrap(), mean_lcb / scale));
            assert!(close(row["max_observed"].as_f64().unwrap(), errs[SAMPLES - 1] / scale));
        }
    }
}
