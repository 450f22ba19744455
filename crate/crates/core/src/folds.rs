//! Interleaved cross-validation folds.
//!
//! Fold `v` holds out the design points `v, v + V, v + 2V, ...`; training
//! on the complement keeps the original order, so change-points estimated on
//! the training subsequence can be mapped back onto the full design grid.

use crate::error::{Error, Result};
use crate::signal::{ChangePointSet, Series};

/// Assignment of the design points `1..=n` to `V` interleaved holdout folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    n: usize,
    folds: Vec<Vec<usize>>,
    complements: Vec<Vec<usize>>,
}

impl FoldPlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_folds(&self) -> usize {
        self.folds.len()
    }

    /// Holdout positions of fold `v` (0-based fold index, 1-based positions).
    pub fn fold(&self, v: usize) -> &[usize] {
        &self.folds[v]
    }

    /// Training positions for fold `v`, sorted.
    pub fn complement(&self, v: usize) -> &[usize] {
        &self.complements[v]
    }

    pub fn folds(&self) -> &[Vec<usize>] {
        &self.folds
    }
}

pub fn make_fold_plan(n: usize, v: usize) -> Result<FoldPlan> {
    if v < 2 || v > n / 2 {
        return Err(Error::BadFoldCount { n, v });
    }
    let folds: Vec<Vec<usize>> = (1..=v).map(|start| (start..=n).step_by(v).collect()).collect();
    let complements = (1..=v)
        .map(|start| (1..=n).filter(|&i| i < start || (i - start) % v != 0).collect())
        .collect();
    Ok(FoldPlan { n, folds, complements })
}

/// Maps change-points estimated on the training subsequence back to the
/// full grid: the reduced change-point `t` becomes `complement[t]` (1-based).
pub fn remap_changepoints(
    train_cps: &ChangePointSet,
    complement: &[usize],
    n: usize,
) -> Result<ChangePointSet> {
    if train_cps.n() != complement.len() {
        return Err(Error::InconsistentScales {
            cps_n: train_cps.n(),
            complement_len: complement.len(),
        });
    }
    let taus = train_cps.taus().iter().map(|&t| complement[t - 1]).collect();
    ChangePointSet::new(n, taus)
}

/// Removes the last observation when the length is odd.
pub fn drop_to_even(series: &Series) -> Series {
    if series.len().is_multiple_of(2) {
        series.clone()
    } else {
        series.truncated(series.len() - 1)
    }
}

/// Odd- and even-indexed subsequences `(Y^O, Y^E)` of an even-length series.
pub fn odd_even_split(series: &Series) -> (Series, Series) {
    let n = series.len();
    let odd: Vec<usize> = (1..=n).step_by(2).collect();
    let even: Vec<usize> = (2..=n).step_by(2).collect();
    (series.select(&odd), series.select(&even))
}
