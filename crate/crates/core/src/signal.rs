//! Observations, change-point sets and piecewise-constant mean functions.
//!
//! All positions exposed here are 1-based on the design grid: a change-point
//! `tau` separates observation `tau` from observation `tau + 1`, and the
//! `k`-th segment covers the indices `tau_k < i <= tau_{k+1}` with the
//! implicit boundaries `tau_0 = 0` and `tau_{K+1} = n`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted interior change-points of a series of length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChangePointSet {
    n: usize,
    taus: Vec<usize>,
}

impl ChangePointSet {
    pub fn new(n: usize, taus: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadChangePoints("series length must be positive".into()));
        }
        let mut prev = 0;
        for &tau in &taus {
            if tau <= prev || tau >= n {
                return Err(Error::BadChangePoints(format!(
                    "{taus:?} is not strictly increasing inside (0, {n})"
                )));
            }
            prev = tau;
        }
        Ok(Self { n, taus })
    }

    /// The set without any change-point.
    pub fn empty(n: usize) -> Self {
        assert!(n > 0, "series length must be positive");
        Self { n, taus: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn taus(&self) -> &[usize] {
        &self.taus
    }

    /// Number of interior change-points.
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// `0, tau_1, ..., tau_L, n`.
    pub fn boundaries(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.taus.len() + 2);
        out.push(0);
        out.extend_from_slice(&self.taus);
        out.push(self.n);
        out
    }

    /// Segments as `(tau_k, tau_{k+1})` pairs. Read as 0-based half-open
    /// ranges they index the storage of the segment's observations.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let starts = std::iter::once(0).chain(self.taus.iter().copied());
        let ends = self.taus.iter().copied().chain(std::iter::once(self.n));
        starts.zip(ends)
    }

    /// Index of the segment containing the 1-based position `i`.
    pub fn segment_of(&self, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.n);
        self.taus.partition_point(|&tau| tau < i)
    }
}

/// Piecewise-constant mean: change-points plus one level vector per segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseSignal {
    cps: ChangePointSet,
    levels: Vec<Vec<f64>>,
}

impl PiecewiseSignal {
    /// Builds a signal whose every change-point is a genuine jump.
    pub fn new(cps: ChangePointSet, levels: Vec<Vec<f64>>) -> Result<Self> {
        let signal = Self::fitted(cps, levels)?;
        if let Some(index) = signal.levels.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::AdjacentLevelsEqual { index });
        }
        Ok(signal)
    }

    /// Univariate convenience constructor.
    pub fn univariate(cps: ChangePointSet, levels: &[f64]) -> Result<Self> {
        Self::new(cps, levels.iter().map(|&v| vec![v]).collect())
    }

    /// Builds a step function from estimated segment means. Adjacent levels
    /// may coincide here: a fit with more segments than jumps can produce
    /// equal means on noise-free data.
    pub fn fitted(cps: ChangePointSet, levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.len() != cps.len() + 1 {
            return Err(Error::LevelCountMismatch { expected: cps.len() + 1, got: levels.len() });
        }
        let d = levels[0].len();
        if d == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if let Some(bad) = levels.iter().find(|l| l.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
        }
        if levels.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::BadParams("signal levels must be finite".into()));
        }
        Ok(Self { cps, levels })
    }

    pub fn cps(&self) -> &ChangePointSet {
        &self.cps
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn n(&self) -> usize {
        self.cps.n()
    }

    pub fn dim(&self) -> usize {
        self.levels[0].len()
    }

    /// Number of change-points K.
    pub fn num_changes(&self) -> usize {
        self.cps.len()
    }

    /// Mean vector at the 1-based position `i`.
    pub fn evaluate_mean(&self, i: usize) -> Result<&[f64]> {
        if i == 0 || i > self.n() {
            return Err(Error::IndexOutOfRange { index: i, n: self.n() });
        }
        Ok(&self.levels[self.cps.segment_of(i)])
    }

    /// Euclidean jump sizes `|beta_k - beta_{k-1}|`, k = 1..K.
    pub fn jump_sizes(&self) -> Vec<f64> {
        self.levels
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .collect()
    }

    /// The mean evaluated on the whole design grid, as a noise-free series.
    pub fn to_series(&self) -> Series {
        let d = self.dim();
        let mut data = Vec::with_capacity(self.n() * d);
        for ((start, end), level) in self.cps.segments().zip(&self.levels) {
            for _ in start..end {
                data.extend_from_slice(level);
            }
        }
        Series { n: self.n(), d, data }
    }
}

/// An `n x d` matrix of finite observations, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl Series {
    /// Wraps row-major data with `d` columns.
    pub fn from_flat(data: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::BadSeries("dimension must be at least 1".into()));
        }
        if !data.len().is_multiple_of(d) {
            return Err(Error::BadSeries(format!(
                "{} values cannot be split into rows of {d}",
                data.len()
            )));
        }
        let n = data.len() / d;
        if n < 2 {
            return Err(Error::BadSeries(format!("need at least 2 observations, got {n}")));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::BadSeries(format!("non-finite value in row {}", pos / d + 1)));
        }
        Ok(Self { n, d, data })
    }

    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Self::from_flat(values, 1)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(1, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::BadSeries(format!(
                "row {} has {} columns, expected {d}",
                i + 1,
                row.len()
            )));
        }
        Self::from_flat(rows.concat(), d)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Row-major storage.
    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Observation at the 0-based storage index `idx` (design point `idx + 1`).
    pub fn row(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.d..(idx + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.d)
    }

    /// Sub-series made of the given 1-based design points, in the given order.
    pub fn select(&self, positions: &[usize]) -> Series {
        let mut data = Vec::with_capacity(positions.len() * self.d);
        for &i in positions {
            data.extend_from_slice(self.row(i - 1));
        }
        Series { n: positions.len(), d: self.d, data }
    }

    /// Drops trailing observations, keeping the first `len`.
    pub fn truncated(&self, len: usize) -> Series {
        assert!(len >= 1 && len <= self.n);
        Series { n: len, d: self.d, data: self.data[..len * self.d].to_vec() }
    }

    /// Applies `y -> scale * y + shift` coordinate-wise.
    pub fn affine(&self, scale: f64, shift: &[f64]) -> Series {
        assert_eq!(shift.len(), self.d);
        let data = self
            .data
            .chunks_exact(self.d)
            .flat_map(|row| row.iter().zip(shift).map(|(y, c)| scale * y + c))
            .collect();
        Series { n: self.n, d: self.d, data }
    }

    /// Mean of the observations at 0-based storage indices `start..end`.
    pub fn segment_mean(&self, start: usize, end: usize) -> Vec<f64> {
        debug_assert!(start < end && end <= self.n);
        let mut acc = vec![0.0; self.d];
        for row in self.data[start * self.d..end * self.d].chunks_exact(self.d) {
            for (a, y) in acc.iter_mut().zip(row) {
                *a += y;
            }
        }
        let len = (end - start) as f64;
        acc.iter_mut().for_each(|a| *a /= len);
        acc
    }

    /// Reads comma-separated rows of `d` numeric columns.
    pub fn read_csv<R: Read>(reader: R, header: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(header)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut rows = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let row = record
                .iter()
                .map(|field| {
                    field.parse::<f64>().map_err(|_| {
                        Error::BadSeries(format!("row {}: cannot parse {field:?}", line + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P, header: bool) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::read_csv(std::io::BufReader::new(file), header)
    }

    /// Writes one row per design point, no header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for row in self.rows() {
            wtr.write_record(row.iter().map(|v| format!("{v}")))?;
        }
        wtr.flush()?;
        Ok(())
    }
}
