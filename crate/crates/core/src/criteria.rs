//! Cross-validation criteria for choosing the number of change-points.
//!
//! The two-fold criteria fit optimal partitioning separately to the odd- and
//! even-indexed observations and predict each half from the other half's
//! segment means, position by position on the half scale. The V-fold
//! criteria fit on the complement of each interleaved fold, map the
//! estimated change-points back to the full grid and predict the held-out
//! points of the segment they fall in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::folds::{odd_even_split, remap_changepoints, FoldPlan};
use crate::segmentation::{optimal_partition, segment_means};
use crate::signal::{ChangePointSet, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Two-fold squared error (COPPS).
    Cv2,
    /// Two-fold absolute error.
    Cv1,
    /// Two-fold squared error without the extrapolated boundary points.
    CvMod,
    Cv1Vfold,
    CvModVfold,
}

/// Criterion values over a grid of tuning parameters (numbers of
/// change-points for optimal partitioning). `+inf` marks infeasible entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionCurve {
    method: Method,
    grid: Vec<usize>,
    values: Vec<f64>,
}

impl CriterionCurve {
    pub fn new(method: Method, grid: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::BadGrid);
        }
        if grid.len() != values.len() {
            return Err(Error::BadParams(format!(
                "{} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { method, grid, values })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn grid(&self) -> &[usize] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest candidate in the grid.
    pub fn k_max(&self) -> usize {
        self.grid.iter().copied().max().unwrap_or(0)
    }

    pub fn value(&self, psi: usize) -> Option<f64> {
        self.grid.iter().position(|&g| g == psi).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.grid.iter().copied().zip(self.values.iter().copied())
    }
}

/// Loss used by the odd/even two-fold criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoFoldLoss {
    Squared,
    Absolute,
    ModifiedSquared,
}

impl TwoFoldLoss {
    pub fn method(self) -> Method {
        match self {
            TwoFoldLoss::Squared => Method::Cv2,
            TwoFoldLoss::Absolute => Method::Cv1,
            TwoFoldLoss::ModifiedSquared => Method::CvMod,
        }
    }
}

/// Squared-error two-fold criterion at `l` change-points.
pub fn cv2(series: &Series, l: usize) -> Result<f64> {
    Ok(two_fold_values(series, l, TwoFoldLoss::Squared)?[l])
}

/// Absolute-error two-fold criterion at `l` change-points.
pub fn cv1(series: &Series, l: usize) -> Result<f64> {
    Ok(two_fold_values(series, l, TwoFoldLoss::Absolute)?[l])
}

/// Modified squared-error two-fold criterion at `l` change-points; `+inf`
/// when a fitted segment on either half is shorter than two points.
pub fn cvmod(series: &Series, l: usize) -> Result<f64> {
    Ok(two_fold_values(series, l, TwoFoldLoss::ModifiedSquared)?[l])
}

/// Two-fold criterion for every `L` in `0..=k_max`. Each half is segmented
/// once for all `L`.
pub fn two_fold_curve(series: &Series, k_max: usize, loss: TwoFoldLoss) -> Result<CriterionCurve> {
    let values = two_fold_values(series, k_max, loss)?;
    CriterionCurve::new(loss.method(), (0..=k_max).collect(), values)
}

fn two_fold_values(series: &Series, k_max: usize, loss: TwoFoldLoss) -> Result<Vec<f64>> {
    let n = series.len();
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength { n });
    }
    let half = n / 2;
    if k_max >= half {
        return Err(Error::LInfeasible { l: k_max, half });
    }
    let (odd, even) = odd_even_split(series);
    let odd_fit = optimal_partition(&odd, k_max)?;
    let even_fit = optimal_partition(&even, k_max)?;
    Ok((0..=k_max)
        .map(|l| {
            holdout_loss(&odd, &even, odd_fit.change_points(l), loss, Pass::Odd)
                + holdout_loss(&even, &odd, even_fit.change_points(l), loss, Pass::Even)
        })
        .collect())
}

/// Which half supplied the fit. The modified criterion drops the last
/// in-segment holdout point on the odd pass and the first on the even pass.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Pass {
    Odd,
    Even,
}

fn holdout_loss(train: &Series, test: &Series, cps: &ChangePointSet, loss: TwoFoldLoss, pass: Pass) -> f64 {
    let mut total = 0.0;
    for (a, b) in cps.segments() {
        let mean = train.segment_mean(a, b);
        match loss {
            TwoFoldLoss::Squared => {
                total += (a..b).map(|i| squared_distance(test.row(i), &mean)).sum::<f64>();
            }
            TwoFoldLoss::Absolute => {
                total += (a..b).map(|i| squared_distance(test.row(i), &mean).sqrt()).sum::<f64>();
            }
            TwoFoldLoss::ModifiedSquared => {
                let len = b - a;
                if len < 2 {
                    return f64::INFINITY;
                }
                let kept = match pass {
                    Pass::Odd => a..b - 1,
                    Pass::Even => a + 1..b,
                };
                let sum: f64 = kept.map(|i| squared_distance(test.row(i), &mean)).sum();
                total += sum * len as f64 / (len - 1) as f64;
            }
        }
    }
    total
}

#[inline]
fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Change-points and segment levels returned by a fitting procedure on its
/// own (training) scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingFit {
    pub cps: ChangePointSet,
    pub levels: Vec<Vec<f64>>,
}

/// A change-point estimator indexed by a tuning parameter.
pub trait Fitter {
    /// Fits `train` once per grid value, in grid order.
    fn fit(&self, train: &Series, grid: &[usize]) -> Result<Vec<TrainingFit>>;
}

/// Optimal partitioning with the tuning parameter read as the number of
/// change-points; levels are segment means.
#[derive(Debug, Clone, Copy, Default)]
pub struct OptimalPartitionFitter;

impl Fitter for OptimalPartitionFitter {
    fn fit(&self, train: &Series, grid: &[usize]) -> Result<Vec<TrainingFit>> {
        let l_max = grid.iter().copied().max().ok_or(Error::BadGrid)?;
        let result = optimal_partition(train, l_max)?;
        Ok(grid
            .iter()
            .map(|&l| {
                let cps = result.change_points(l).clone();
                let levels = segment_means(train, &cps);
                TrainingFit { cps, levels }
            })
            .collect())
    }
}

/// A training fit mapped back onto the full design grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldFit {
    /// 0-based fold index.
    pub fold: usize,
    pub psi: usize,
    pub cps: ChangePointSet,
    pub levels: Vec<Vec<f64>>,
}

/// Fits every fold complement for every grid value, indexed `[fold][grid]`.
pub fn fold_fits<F: Fitter + ?Sized>(
    series: &Series,
    plan: &FoldPlan,
    grid: &[usize],
    fitter: &F,
) -> Result<Vec<Vec<FoldFit>>> {
    if grid.is_empty() {
        return Err(Error::BadGrid);
    }
    if plan.n() != series.len() {
        return Err(Error::LengthMismatch { left: plan.n(), right: series.len() });
    }
    (0..plan.num_folds())
        .map(|v| {
            let complement = plan.complement(v);
            let train = series.select(complement);
            let fits = fitter.fit(&train, grid)?;
            fits.into_iter()
                .zip(grid)
                .map(|(fit, &psi)| {
                    if fit.levels.len() != fit.cps.len() + 1 {
                        return Err(Error::LevelCountMismatch {
                            expected: fit.cps.len() + 1,
                            got: fit.levels.len(),
                        });
                    }
                    let cps = remap_changepoints(&fit.cps, complement, series.len())?;
                    Ok(FoldFit { fold: v, psi, cps, levels: fit.levels })
                })
                .collect()
        })
        .collect()
}

/// Loss of the generalised V-fold criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VfoldLoss {
    /// Euclidean norm of the prediction error.
    Absolute,
    /// Squared error skipping the first held-out point after each estimated
    /// change, rescaled by `len / (len - 1)`. Requires every estimated
    /// segment to span at least `2 (V - 1)` design points.
    ModifiedSquared,
}

pub fn vfold_criterion<F: Fitter + ?Sized>(
    series: &Series,
    plan: &FoldPlan,
    grid: &[usize],
    fitter: &F,
    loss: VfoldLoss,
) -> Result<CriterionCurve> {
    let fits = fold_fits(series, plan, grid, fitter)?;
    let min_len = 2 * (plan.num_folds() - 1);
    let mut values = vec![0.0; grid.len()];
    for (v, per_psi) in fits.iter().enumerate() {
        let held_out = plan.fold(v);
        for (value, fit) in values.iter_mut().zip(per_psi) {
            *value += match loss {
                VfoldLoss::Absolute => held_out
                    .iter()
                    .map(|&i| {
                        let k = fit.cps.segment_of(i);
                        squared_distance(series.row(i - 1), &fit.levels[k]).sqrt()
                    })
                    .sum::<f64>(),
                VfoldLoss::ModifiedSquared => modified_vfold_loss(series, held_out, fit, min_len),
            };
        }
    }
    let method = match loss {
        VfoldLoss::Absolute => Method::Cv1Vfold,
        VfoldLoss::ModifiedSquared => Method::CvModVfold,
    };
    CriterionCurve::new(method, grid.to_vec(), values)
}

fn modified_vfold_loss(series: &Series, held_out: &[usize], fit: &FoldFit, min_len: usize) -> f64 {
    let bounds = fit.cps.boundaries();
    if bounds.windows(2).any(|w| w[1] - w[0] < min_len) {
        return f64::INFINITY;
    }
    held_out
        .iter()
        .filter_map(|&i| {
            let k = fit.cps.segment_of(i);
            let (start, end) = (bounds[k], bounds[k + 1]);
            if i <= start + 1 {
                return None;
            }
            let len = (end - start) as f64;
            Some(len / (len - 1.0) * squared_distance(series.row(i - 1), &fit.levels[k]))
        })
        .sum()
}

/// Relative gap below which two criterion values count as tied.
pub const TIE_RTOL: f64 = 1e-10;

/// Smallest-criterion candidate; ties go to the smallest tuning parameter.
/// Values within [`TIE_RTOL`] of the minimum are ties, so curves that agree
/// up to rounding select the same candidate.
pub fn select_k(curve: &CriterionCurve) -> Result<usize> {
    let best = curve
        .values()
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .min_by(f64::total_cmp)
        .ok_or(Error::AllInfeasible)?;
    let cutoff = best + TIE_RTOL * best.abs();
    Ok(curve
        .iter()
        .filter(|&(_, v)| v.is_finite() && v <= cutoff)
        .map(|(psi, _)| psi)
        .min()
        .expect("the minimum is within the cutoff"))
}
