//! Search over the corners `{0,1}^p` of the cube under the supremum metric.
//!
//! For a corner `c` and observation `x`, `d(x, c) = max_i t_i` where
//! `t_i = x_i` if `c_i = 0` and `1 - x_i` otherwise. Keeping the two largest
//! terms per observation lets a single-bit flip be scored in O(n) and
//! committed in amortized O(n), which makes both Gray-code enumeration and
//! bit-flip local search linear in the number of observations per corner.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::envelope::EnvelopeModel;

/// Quantity maximized over corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Objective {
    EStar,
    EPlus,
    /// `-e_minus`, so that maximizing it minimizes the lower envelope.
    NegEMinus,
}

/// Best corner found by a search.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CornerHit {
    pub value: f64,
    pub corner: Vec<bool>,
    pub evaluated: u64,
}

const NO_COORD: usize = usize::MAX;

struct CornerState<'a> {
    model: &'a EnvelopeModel,
    objective: Objective,
    bits: Vec<bool>,
    max1: Vec<f64>,
    arg1: Vec<usize>,
    max2: Vec<f64>,
    arg2: Vec<usize>,
}

#[inline]
fn term(x: f64, bit: bool) -> f64 {
    if bit {
        1.0 - x
    } else {
        x
    }
}

impl<'a> CornerState<'a> {
    fn new(model: &'a EnvelopeModel, objective: Objective, bits: Vec<bool>) -> Self {
        let n = model.dataset().len();
        let mut s = Self {
            model,
            objective,
            bits,
            max1: vec![0.0; n],
            arg1: vec![NO_COORD; n],
            max2: vec![0.0; n],
            arg2: vec![NO_COORD; n],
        };
        for i in 0..n {
            s.rebuild(i);
        }
        s
    }

    fn rebuild(&mut self, i: usize) {
        let x = self.model.dataset().point(i);
        let (mut m1, mut a1, mut m2, mut a2) = (f64::NEG_INFINITY, NO_COORD, f64::NEG_INFINITY, NO_COORD);
        for (j, (&xj, &b)) in x.iter().zip(&self.bits).enumerate() {
            let t = term(xj, b);
            if t > m1 {
                (m2, a2) = (m1, a1);
                (m1, a1) = (t, j);
            } else if t > m2 {
                (m2, a2) = (t, j);
            }
        }
        self.max1[i] = m1;
        self.arg1[i] = a1;
        self.max2[i] = m2;
        self.arg2[i] = a2;
    }

    #[inline]
    fn score(&self, distance: impl Fn(usize) -> f64) -> f64 {
        let kappa = self.model.kappa();
        let values = self.model.shifted_values();
        let mut e_plus = f64::INFINITY;
        let mut e_minus = f64::NEG_INFINITY;
        for (i, &f) in values.iter().enumerate() {
            let reach = kappa * distance(i);
            e_plus = e_plus.min(f + reach);
            e_minus = e_minus.max(f - reach);
        }
        match self.objective {
            Objective::EStar => 0.5 * (e_plus - e_minus),
            Objective::EPlus => self.model.reference() + e_plus,
            Objective::NegEMinus => -(self.model.reference() + e_minus),
        }
    }

    fn current(&self) -> f64 {
        self.score(|i| self.max1[i])
    }

    /// Objective at the corner with bit `j` flipped, without committing.
    fn with_flip(&self, j: usize) -> f64 {
        let points = self.model.dataset();
        let flipped = !self.bits[j];
        self.score(|i| {
            let other = if self.arg1[i] == j { self.max2[i] } else { self.max1[i] };
            other.max(term(points.point(i)[j], flipped))
        })
    }

    fn flip(&mut self, j: usize) {
        self.bits[j] = !self.bits[j];
        let b = self.bits[j];
        for i in 0..self.max1.len() {
            if self.arg1[i] == j || self.arg2[i] == j {
                self.rebuild(i);
                continue;
            }
            let t = term(self.model.dataset().point(i)[j], b);
            if t > self.max1[i] {
                (self.max2[i], self.arg2[i]) = (self.max1[i], self.arg1[i]);
                (self.max1[i], self.arg1[i]) = (t, j);
            } else if t > self.max2[i] {
                (self.max2[i], self.arg2[i]) = (t, j);
            }
        }
    }
}

pub(crate) fn gray(rank: u64) -> u64 {
    rank ^ (rank >> 1)
}

pub(crate) fn bits_of(mask: u64, dim: usize) -> Vec<bool> {
    (0..dim).map(|j| (mask >> j) & 1 == 1).collect()
}

/// The corner as a point of the cube.
pub fn corner_point(bits: &[bool]) -> Vec<f64> {
    bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
}

pub fn corner_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

const GRAY_CHUNK: u64 = 1 << 12;

/// Maximum of the objective over all `2^dim` corners, visited in Gray-code
/// order. Ties keep the corner with the lowest Gray rank. Requires dim < 64.
pub(crate) fn exhaustive(model: &EnvelopeModel, objective: Objective) -> CornerHit {
    let dim = model.dim();
    assert!(dim < 64, "exhaustive corner search limited to dim < 64");
    let total: u64 = 1 << dim;
    let chunks = total.div_ceil(GRAY_CHUNK);
    let (value, rank) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * GRAY_CHUNK;
            let end = (start + GRAY_CHUNK).min(total);
            let mut state = CornerState::new(model, objective, bits_of(gray(start), dim));
            let mut best = (state.current(), start);
            for rank in (start + 1)..end {
                state.flip(rank.trailing_zeros() as usize);
                let v = state.current();
                if v > best.0 {
                    best = (v, rank);
                }
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, u64::MAX), pick_best);
    CornerHit {
        value,
        corner: bits_of(gray(rank), dim),
        evaluated: total,
    }
}

fn pick_best(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Starting corner number `k`: `0`, then `1`, then uniform random corners,
/// each drawn from its own counter-addressed stream.
fn start_corner(k: u64, dim: usize, seed: u64) -> Vec<bool> {
    match k {
        0 => vec![false; dim],
        1 => vec![true; dim],
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            (0..dim).map(|_| rng.random::<bool>()).collect()
        }
    }
}

/// Steepest-ascent single-bit local search from one corner.
fn climb(model: &EnvelopeModel, objective: Objective, bits: Vec<bool>) -> CornerHit {
    let dim = bits.len();
    let mut state = CornerState::new(model, objective, bits);
    let mut current = state.current();
    let mut evaluated = 1;
    loop {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..dim {
            let v = state.with_flip(j);
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((j, v));
            }
        }
        evaluated += dim as u64;
        match best {
            Some((j, v)) if v > current => {
                state.flip(j);
                current = v;
            }
            _ => break,
        }
    }
    CornerHit {
        value: current,
        corner: state.bits,
        evaluated,
    }
}

const RESTART_BATCH: u64 = 32;

/// Local search from the corners `0`, `1` and then random corners until
/// `budget` corner evaluations have been spent. Restarts run in parallel
/// batches but are accounted in index order, so the result depends only on
/// `(budget, seed)`.
pub(crate) fn heuristic(model: &EnvelopeModel, objective: Objective, budget: u64, seed: u64) -> CornerHit {
    let dim = model.dim();
    let mut best: Option<CornerHit> = None;
    let mut used = 0u64;
    let mut next = 0u64;
    'outer: loop {
        let batch: Vec<CornerHit> = (next..next + RESTART_BATCH)
            .into_par_iter()
            .map(|k| climb(model, objective, start_corner(k, dim, seed)))
            .collect();
        next += RESTART_BATCH;
        for hit in batch {
            if used >= budget && best.is_some() {
                break 'outer;
            }
            used += hit.evaluated;
            if best.as_ref().is_none_or(|b| hit.value > b.value) {
                best = Some(hit);
            }
        }
    }
    let mut hit = best.expect("at least one restart runs");
    hit.evaluated = used;
    hit
}
