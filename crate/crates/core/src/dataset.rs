//! Observation sets: design points in `[0,1]^p` with their scalar outputs.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::MetricKind;

/// Coordinates within this distance of the cube are clamped onto it.
pub const COORDINATE_TOLERANCE: f64 = 1e-12;

/// An immutable, validated set of noise-free observations.
///
/// Points are stored row-major in one flat buffer. Construction clamps
/// near-boundary coordinates, rejects coordinates outside the cube, and merges
/// repeated design points that carry the same value.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    points: Vec<f64>,
    values: Vec<f64>,
    labels: Option<Vec<String>>,
    value_label: Option<String>,
}

impl Dataset {
    /// Builds a dataset from per-row points. Row indices in errors are 0-based.
    pub fn new(dim: usize, points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        let mut flat = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            flat.extend_from_slice(p);
        }
        Self::from_flat(dim, flat, values)
    }

    /// Builds a dataset from a row-major coordinate buffer of length `n * dim`.
    pub fn from_flat(dim: usize, mut points: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if points.len() != values.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: values.len() * dim,
                got: points.len(),
            });
        }
        if values.is_empty() {
            return Err(Error::Empty);
        }
        for (i, c) in points.iter_mut().enumerate() {
            *c = clamp_coordinate(*c).ok_or(Error::Domain {
                row: i / dim,
                column: i % dim,
                value: *c,
            })?;
        }
        if let Some(row) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "row {row}: value {} is not finite",
                values[row]
            )));
        }
        let (points, values) = merge_duplicates(dim, points, values)?;
        Ok(Self {
            dim,
            points,
            values,
            labels: None,
            value_label: None,
        })
    }

    /// Attaches coordinate column names (used when writing CSV).
    pub fn with_labels(mut self, labels: Vec<String>, value_label: Option<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        self.value_label = value_label;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row-major coordinates, `len() * dim()` entries.
    pub fn points_flat(&self) -> &[f64] {
        &self.points
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.dim)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn value_label(&self) -> Option<&str> {
        self.value_label.as_deref()
    }

    pub fn load_csv(path: impl AsRef<Path>, value_column: &ValueColumn) -> Result<Self> {
        let file = File::open(path.as_ref())?;
        Self::read_csv(file, value_column)
    }

    /// Reads a header row followed by numeric rows. Row numbers in errors are
    /// 1-based file line numbers (the header is line 1).
    pub fn read_csv<R: Read>(reader: R, value_column: &ValueColumn) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| csv_error(e, 1))?
            .iter()
            .map(str::to_owned)
            .collect();
        if headers.len() < 2 {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "need at least one coordinate column and one value column".into(),
            });
        }
        let value_idx = value_column.resolve(&headers)?;
        let dim = headers.len() - 1;

        let mut points = Vec::new();
        let mut values = Vec::new();
        for (k, record) in rdr.records().enumerate() {
            let line = k + 2;
            let record = record.map_err(|e| csv_error(e, line))?;
            if record.len() != headers.len() {
                return Err(Error::Parse {
                    line,
                    column: record.len().min(headers.len()) + 1,
                    message: format!("expected {} cells, found {}", headers.len(), record.len()),
                });
            }
            let mut coord = 0;
            for (col, cell) in record.iter().enumerate() {
                let parsed = parse_cell(cell, line, col + 1)?;
                if col == value_idx {
                    values.push(parsed);
                } else {
                    let clamped = clamp_coordinate(parsed).ok_or(Error::Domain {
                        row: line,
                        column: col + 1,
                        value: parsed,
                    })?;
                    points.push(clamped);
                    coord += 1;
                }
            }
            debug_assert_eq!(coord, dim);
        }
        if values.is_empty() {
            return Err(Error::Empty);
        }
        let labels: Vec<String> = headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != value_idx)
            .map(|(_, h)| h.clone())
            .collect();
        let value_label = headers[value_idx].clone();
        let ds = Self::from_flat(dim, points, values).map_err(|e| match e {
            // observation index -> file line
            Error::Duplicate {
                first,
                second,
                first_value,
                second_value,
            } => Error::Duplicate {
                first: first + 2,
                second: second + 2,
                first_value,
                second_value,
            },
            other => other,
        })?;
        ds.with_labels(labels, Some(value_label))
    }

    /// Writes coordinates followed by the value column. Floats use the
    /// shortest representation that parses back to the same bits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = match &self.labels {
            Some(l) => l.clone(),
            None => (1..=self.dim).map(|i| format!("x{i}")).collect(),
        };
        header.push(self.value_label.clone().unwrap_or_else(|| "y".into()));
        wtr.write_record(&header).map_err(|e| csv_error(e, 1))?;
        for (i, p) in self.points().enumerate() {
            let row = p
                .iter()
                .chain(std::iter::once(&self.values[i]))
                .map(|v| format!("{v:?}"));
            wtr.write_record(row).map_err(|e| csv_error(e, i + 2))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(File::create(path.as_ref())?)
    }
}

/// Reads query points (coordinates only, with a header row).
pub fn read_points_csv<R: Read>(reader: R, dim: usize) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let width = rdr.headers().map_err(|e| csv_error(e, 1))?.len();
    if width != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: width,
        });
    }
    let mut out = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| csv_error(e, line))?;
        let mut row = Vec::with_capacity(dim);
        for (col, cell) in record.iter().enumerate() {
            let v = parse_cell(cell, line, col + 1)?;
            row.push(clamp_coordinate(v).ok_or(Error::Domain {
                row: line,
                column: col + 1,
                value: v,
            })?);
        }
        out.push(row);
    }
    Ok(out)
}

/// Which CSV column holds the observed value.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ValueColumn {
    #[default]
    Last,
    Name(String),
    /// 0-based column index.
    Index(usize),
}

impl ValueColumn {
    fn resolve(&self, headers: &[String]) -> Result<usize> {
        match self {
            ValueColumn::Last => Ok(headers.len() - 1),
            ValueColumn::Index(i) if *i < headers.len() => Ok(*i),
            ValueColumn::Index(i) => Err(Error::InvalidArgument(format!(
                "--value-column {i} is out of range for {} columns",
                headers.len()
            ))),
            ValueColumn::Name(name) => headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::InvalidArgument(format!("--value-column `{name}` not found in header"))),
        }
    }
}

impl FromStr for ValueColumn {
    type Err = Error;

    /// Integers select a 0-based index; anything else is a column name.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty --value-column".into()));
        }
        Ok(match s.parse::<usize>() {
            Ok(i) => ValueColumn::Index(i),
            Err(_) => ValueColumn::Name(s.to_owned()),
        })
    }
}

fn clamp_coordinate(c: f64) -> Option<f64> {
    if !(-COORDINATE_TOLERANCE..=1.0 + COORDINATE_TOLERANCE).contains(&c) {
        // also catches NaN
        return None;
    }
    // + 0.0 folds -0.0 into 0.0 so duplicate detection sees one key
    Some(c.clamp(0.0, 1.0) + 0.0)
}

fn parse_cell(cell: &str, line: usize, column: usize) -> Result<f64> {
    if cell.is_empty() {
        return Err(Error::Parse {
            line,
            column,
            message: "missing cell".into(),
        });
    }
    cell.parse::<f64>().map_err(|_| Error::Parse {
        line,
        column,
        message: format!("`{cell}` is not a number"),
    })
}

fn csv_error(e: csv::Error, line: usize) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(line);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}

fn merge_duplicates(dim: usize, points: Vec<f64>, values: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = values.len();
    let row = |i: usize| &points[i * dim..(i + 1) * dim];
    let key = |i: usize| row(i).iter().map(|c| c.to_bits()).collect::<Vec<u64>>();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_cached_key(|&i| (key(i), i));

    let mut keep = vec![true; n];
    let mut any = false;
    // sorted by (key, index), so each run starts at its lowest index
    let mut run_start = order[0];
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if row(a) != row(b) {
            run_start = b;
            continue;
        }
        if values[run_start] != values[b] {
            return Err(Error::Duplicate {
                first: run_start,
                second: b,
                first_value: values[run_start],
                second_value: values[b],
            });
        }
        keep[b] = false;
        any = true;
    }
    if !any {
        return Ok((points, values));
    }
    let mut new_points = Vec::with_capacity(points.len());
    let mut new_values = Vec::with_capacity(n);
    for i in (0..n).filter(|&i| keep[i]) {
        new_points.extend_from_slice(row(i));
        new_values.push(values[i]);
    }
    Ok((new_points, new_values))
}

/// Generating functions for test fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    /// Mean of the coordinates.
    Linear,
    /// The constant 1.
    Constant,
    /// Product of `sin(pi x_i)`.
    ProductSine,
    /// Lower envelope of five random cones with a shared random slope.
    RandomLipschitz,
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" => Ok(Self::Linear),
            "constant" => Ok(Self::Constant),
            "product-sine" => Ok(Self::ProductSine),
            "random-lipschitz" => Ok(Self::RandomLipschitz),
            other => Err(Error::UnsupportedKind(other.to_owned())),
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::Constant => "constant",
            Self::ProductSine => "product-sine",
            Self::RandomLipschitz => "random-lipschitz",
        })
    }
}

/// Generates a deterministic fixture and returns it with the exact Lipschitz
/// constant of the generating function under `metric`.
///
/// The design starts with the corners `0` and `1` (when `n >= 2`); remaining
/// points are uniform on the cube.
pub fn synthesize(kind: SyntheticKind, dim: usize, n: usize, seed: u64, metric: MetricKind) -> Result<(Dataset, f64)> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = dim as f64;

    // generator parameters are drawn before the design so they do not depend on n
    let cones: Vec<(Vec<f64>, f64)> = (0..5)
        .map(|_| ((0..dim).map(|_| rng.random::<f64>()).collect(), rng.random::<f64>()))
        .collect();
    let slope = rng.random_range(0.5..2.0);

    let mut points = Vec::with_capacity(n * dim);
    for i in 0..n {
        match i {
            0 => points.extend(std::iter::repeat_n(0.0, dim)),
            1 => points.extend(std::iter::repeat_n(1.0, dim)),
            _ => points.extend((0..dim).map(|_| rng.random::<f64>())),
        }
    }

    let m = crate::metric::Metric { kind: metric, dim };
    let eval = |x: &[f64]| -> f64 {
        match kind {
            SyntheticKind::Linear => x.iter().sum::<f64>() / p,
            SyntheticKind::Constant => 1.0,
            SyntheticKind::ProductSine => x.iter().map(|c| (std::f64::consts::PI * c).sin()).product(),
            SyntheticKind::RandomLipschitz => cones
                .iter()
                .map(|(c, b)| b + slope * m.dist(x, c))
                .fold(f64::INFINITY, f64::min),
        }
    };
    let values: Vec<f64> = points.chunks_exact(dim).map(eval).collect();

    let known_k = match (kind, metric) {
        (SyntheticKind::Constant, _) => 0.0,
        // |sum a_i| / p <= max |a_i|, equality along the diagonal
        (SyntheticKind::Linear, MetricKind::Supremum) => 1.0,
        // |sum a_i| / p <= |a|_2 / sqrt(p), equality along the diagonal
        (SyntheticKind::Linear, MetricKind::Euclidean) => 1.0 / p.sqrt(),
        // sup of |grad|_2: the "exactly one factor differs" sum is at most 1
        (SyntheticKind::ProductSine, MetricKind::Euclidean) => std::f64::consts::PI,
        // sup of |grad|_1, attained at sin^2(pi x_i) = (p-1)/p for all i
        (SyntheticKind::ProductSine, MetricKind::Supremum) => {
            std::f64::consts::PI * p.sqrt() * ((p - 1.0) / p).powf((p - 1.0) / 2.0)
        }
        // the cone with the smallest offset is active around its apex
        (SyntheticKind::RandomLipschitz, _) => slope,
    };
    Ok((Dataset::from_flat(dim, points, values)?, known_k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_small_csv() {
        let csv = "x1,x2,y\n0,0,1\n0.5,1,2\n1,0.25,3\n";
        let ds = Dataset::read_csv(csv.as_bytes(), &ValueColumn::Last).unwrap();
        assert_eq!((ds.dim(), ds.len()), (2, 3));
        assert_eq!(ds.point(1), &[0.5, 1.0]);
        assert_eq!(ds.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(ds.labels().unwrap(), &["x1".to_string(), "x2".to_string()]);
    }

    #[test]
    fn value_column_override() {
        let csv = "y,a,b\n7,0.1,0.2\n";
        let ds = Dataset::read_csv(csv.as_bytes(), &"y".parse().unwrap()).unwrap();
        assert_eq!(ds.point(0), &[0.1, 0.2]);
        assert_eq!(ds.value(0), 7.0);
        let ds = Dataset::read_csv(csv.as_bytes(), &ValueColumn::Index(0)).unwrap();
        assert_eq!(ds.value(0), 7.0);
        assert!(Dataset::read_csv(csv.as_bytes(), &"z".parse().unwrap()).is_err());
    }

    #[test]
    fn rejects_out_of_range_coordinate() {
        let csv = "x1,x2,y\n0.2,0.3,1\n1.3,0.5,2\n";
        let err = Dataset::read_csv(csv.as_bytes(), &ValueColumn::Last).unwrap_err();
        assert!(matches!(err, Error::Domain { row: 3, column: 1, .. }), "{err}");
    }

    #[test]
    fn clamps_within_tolerance() {
        let csv = "x,y\n-1e-13,1\n1.0000000000001,2\n";
        let ds = Dataset::read_csv(csv.as_bytes(), &ValueColumn::Last).unwrap();
        assert_eq!(ds.point(0), &[0.0]);
        assert_eq!(ds.point(1), &[1.0]);
        let csv = "x,y\n-1e-9,1\n";
        assert!(Dataset::read_csv(csv.as_bytes(), &ValueColumn::Last).is_err());
    }

    #[test]
    fn duplicate_points_with_different_values() {
        let csv = "x1,x2,y\n0.5,0.5,5\n0.1,0.1,0\n0.5,0.5,6\n";
        let err = Dataset::read_csv(csv.as_bytes(), &ValueColumn::Last).unwrap_err();
        assert!(
            matches!(
                err,
                Error::Duplicate {
                    first: 2,
                    second: 4,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn duplicate_points_with_equal_values_merge() {
        let ds = Dataset::new(
            1,
            vec![vec![0.5], vec![0.1], vec![0.5], vec![0.5]],
            vec![3.0, 1.0, 3.0, 3.0],
        )
        .unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.points_flat(), &[0.5, 0.1]);
        assert_eq!(ds.values(), &[3.0, 1.0]);
    }

    #[test]
    fn malformed_and_missing_cells() {
        let err = Dataset::read_csv("x,y\n0.1,abc\n".as_bytes(), &ValueColumn::Last).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 2, .. }), "{err}");
        let err = Dataset::read_csv("x,y\n0.1,\n".as_bytes(), &ValueColumn::Last).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = Dataset::read_csv("x,y\n".as_bytes(), &ValueColumn::Last).unwrap_err();
        assert!(matches!(err, Error::Empty));
    }

    #[test]
    fn synthesize_linear_two_corners() {
        let (ds, k) = synthesize(SyntheticKind::Linear, 1, 2, 0, MetricKind::Supremum).unwrap();
        assert_eq!(ds.points_flat(), &[0.0, 1.0]);
        assert_eq!(ds.values(), &[0.0, 1.0]);
        assert_eq!(k, 1.0);
    }

    #[test]
    fn synthesize_constant_has_zero_constant() {
        for dim in [1, 4] {
            let (ds, k) = synthesize(SyntheticKind::Constant, dim, 17, 3, MetricKind::Euclidean).unwrap();
            assert_eq!(k, 0.0);
            assert!(ds.values().iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn synthesize_is_deterministic() {
        let a = synthesize(SyntheticKind::RandomLipschitz, 3, 50, 7, MetricKind::Supremum).unwrap();
        let b = synthesize(SyntheticKind::RandomLipschitz, 3, 50, 7, MetricKind::Supremum).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        let c = synthesize(SyntheticKind::RandomLipschitz, 3, 50, 8, MetricKind::Supremum).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn unknown_kind() {
        assert!(matches!(
            "wavelet".parse::<SyntheticKind>(),
            Err(Error::UnsupportedKind(_))
        ));
    }
}
