//! Exact least-squares segmentation with a prescribed number of change-points.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::signal::{ChangePointSet, Series};

/// Largest series the exhaustive search accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Relative tolerance for cost ties; the earliest placement wins a tie.
pub const COST_TIE_RTOL: f64 = 1e-11;

/// Prefix sums of `Y` and `|Y|^2` for O(d) segment residual sums of squares.
///
/// The data are shifted by their integer-rounded column means before
/// accumulation. The shift leaves every segment cost unchanged, keeps the
/// accumulated magnitudes small and is exact for integer-valued data.
#[derive(Debug, Clone)]
pub struct SegmentCostTable {
    n: usize,
    d: usize,
    prefix_sum: Vec<f64>,
    prefix_sumsq: Vec<f64>,
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl SegmentCostTable {
    pub fn new(series: &Series) -> Self {
        let (n, d) = (series.len(), series.dim());
        let shift: Vec<f64> = (0..d)
            .map(|j| (series.rows().map(|r| r[j]).sum::<f64>() / n as f64).round())
            .collect();
        let mut prefix_sum = vec![0.0; (n + 1) * d];
        let mut prefix_sumsq = vec![0.0; n + 1];
        let mut sums = vec![CompensatedSum::default(); d];
        let mut sumsq = CompensatedSum::default();
        for (i, row) in series.rows().enumerate() {
            let mut sq = 0.0;
            for j in 0..d {
                let y = row[j] - shift[j];
                sums[j].add(y);
                prefix_sum[(i + 1) * d + j] = sums[j].value();
                sq += y * y;
            }
            sumsq.add(sq);
            prefix_sumsq[i + 1] = sumsq.value();
        }
        Self { n, d, prefix_sum, prefix_sumsq }
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

    pub fn prefix_sum(&self, i: usize) -> &[f64] {
        &self.prefix_sum[i * self.d..(i + 1) * self.d]
    }

    pub fn prefix_sumsq(&self, i: usize) -> f64 {
        self.prefix_sumsq[i]
    }

    /// Residual sum of squares of observations `a+1..=b` around their mean.
    #[inline]
    pub fn cost(&self, a: usize, b: usize) -> f64 {
        debug_assert!(a < b && b <= self.n);
        let sq = self.prefix_sumsq[b] - self.prefix_sumsq[a];
        let mut norm = 0.0;
        for j in 0..self.d {
            let s = self.prefix_sum[b * self.d + j] - self.prefix_sum[a * self.d + j];
            norm += s * s;
        }
        (sq - norm / (b - a) as f64).max(0.0)
    }

    /// Absolute gap below which two candidate costs are treated as tied:
    /// [`COST_TIE_RTOL`] times the total sum of squares of the centred data, the
    /// scale of the rounding error in any table cost.
    pub fn tie_tolerance(&self) -> f64 {
        COST_TIE_RTOL * self.prefix_sumsq[self.n]
    }

    /// Total cost of the segmentation induced by `cps`.
    pub fn total_cost(&self, cps: &ChangePointSet) -> f64 {
        cps.segments().map(|(a, b)| self.cost(a, b)).sum()
    }
}

pub fn build_cost_table(series: &Series) -> SegmentCostTable {
    SegmentCostTable::new(series)
}

/// Optimal segmentations for every number of change-points `0..=l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationResult {
    per_l: Vec<(ChangePointSet, f64)>,
}

impl SegmentationResult {
    pub fn l_max(&self) -> usize {
        self.per_l.len() - 1
    }

    pub fn change_points(&self, l: usize) -> &ChangePointSet {
        &self.per_l[l].0
    }

    pub fn cost(&self, l: usize) -> f64 {
        self.per_l[l].1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ChangePointSet, f64)> + '_ {
        self.per_l.iter().map(|(c, s)| (c, *s))
    }

    pub fn into_vec(self) -> Vec<(ChangePointSet, f64)> {
        self.per_l
    }
}

/// Minimises the residual sum of squares over all segmentations with exactly
/// `L` interior change-points, for every `L` in `0..=l_max`.
///
/// Among equal-cost optima the lexicographically smallest change-point vector
/// is returned.
pub fn optimal_partition(series: &Series, l_max: usize) -> Result<SegmentationResult> {
    if l_max >= series.len() {
        return Err(Error::LMaxTooLarge { l_max, n: series.len() });
    }
    Ok(partition_with_table(&SegmentCostTable::new(series), l_max))
}

/// Same as [`optimal_partition`] on a prebuilt table.
pub fn partition_with_table(table: &SegmentCostTable, l_max: usize) -> SegmentationResult {
    let n = table.len();
    assert!(l_max < n, "l_max must be below the series length");

    // best[a]: minimal cost of segmenting observations a+1..=n with the
    // current number of change-points. Working on suffixes lets the scan pick
    // the smallest first change-point on ties, which yields the
    // lexicographically smallest optimum.
    let mut prev: Vec<f64> = (0..n).map(|a| table.cost(a, n)).collect();
    prev.push(f64::INFINITY);
    let mut per_l = vec![(ChangePointSet::empty(n), prev[0])];
    let mut first_cp: Vec<Vec<u32>> = Vec::with_capacity(l_max);
    let mut cur = vec![f64::INFINITY; n + 1];

    for l in 1..=l_max {
        let last_start = if l == l_max { 0 } else { n - l - 1 };
        let mut arg = vec![0u32; n - l];
        cur.iter_mut().for_each(|v| *v = f64::INFINITY);
        for a in 0..=last_start {
            let (best, b) = best_split(table, &prev, a, n - l);
            cur[a] = best;
            arg[a] = b as u32;
        }
        first_cp.push(arg);

        let mut taus = Vec::with_capacity(l);
        let mut a = 0;
        for j in (1..=l).rev() {
            a = first_cp[j - 1][a] as usize;
            taus.push(a);
        }
        let cps = ChangePointSet::new(n, taus).expect("dynamic program yields ordered change-points");
        per_l.push((cps, cur[0]));
        std::mem::swap(&mut prev, &mut cur);
    }
    SegmentationResult { per_l }
}

/// `min_{b in a+1..=b_max} cost(a, b) + tail[b]`, first minimiser on ties
/// (up to [`SegmentCostTable::tie_tolerance`]).
#[inline]
fn best_split(table: &SegmentCostTable, tail: &[f64], a: usize, b_max: usize) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut arg = a + 1;
    let tol = table.tie_tolerance();
    if table.d == 1 {
        let s = &table.prefix_sum;
        let sq = &table.prefix_sumsq;
        let (sa, sqa) = (s[a], sq[a]);
        for b in a + 1..=b_max {
            let seg_sq = sq[b] - sqa;
            let seg_s = s[b] - sa;
            let cost = (seg_sq - seg_s * seg_s / (b - a) as f64).max(0.0);
            let v = cost + tail[b];
            if v < best - tol {
                best = v;
                arg = b;
            }
        }
    } else {
        for b in a + 1..=b_max {
            let v = table.cost(a, b) + tail[b];
            if v < best - tol {
                best = v;
                arg = b;
            }
        }
    }
    (best, arg)
}

/// Exhaustive search over all placements of `l` change-points. Segment costs
/// are computed directly with a two-pass mean/residual sweep, independent of
/// the prefix-sum table.
pub fn brute_force_partition(series: &Series, l: usize) -> Result<(ChangePointSet, f64)> {
    let n = series.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLargeForOracle { n, limit: BRUTE_FORCE_LIMIT });
    }
    if l >= n {
        return Err(Error::LMaxTooLarge { l_max: l, n });
    }
    let tol = COST_TIE_RTOL * direct_rss(series, 0, n);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for taus in (1..n).combinations(l) {
        let cps = ChangePointSet::new(n, taus).expect("combinations are increasing");
        let cost: f64 = cps.segments().map(|(a, b)| direct_rss(series, a, b)).sum();
        if best.as_ref().is_none_or(|(_, c)| cost < *c - tol) {
            best = Some((cps.taus().to_vec(), cost));
        }
    }
    let (taus, cost) = best.expect("at least one placement exists");
    Ok((ChangePointSet::new(n, taus)?, cost))
}

/// Two-pass residual sum of squares of rows `start..end` (0-based).
pub fn direct_rss(series: &Series, start: usize, end: usize) -> f64 {
    let mean = series.segment_mean(start, end);
    (start..end)
        .map(|i| series.row(i).iter().zip(&mean).map(|(y, m)| (y - m) * (y - m)).sum::<f64>())
        .sum()
}

/// Per-segment means of `series` over the segments of `cps`.
pub fn segment_means(series: &Series, cps: &ChangePointSet) -> Vec<Vec<f64>> {
    cps.segments().map(|(a, b)| series.segment_mean(a, b)).collect()
}
