//! End-to-end estimation: pick the number of change-points by a
//! cross-validation criterion, refit on the whole series and report the
//! fitted step function.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::criteria::{
    select_k, two_fold_curve, vfold_criterion, CriterionCurve, OptimalPartitionFitter, TwoFoldLoss,
    VfoldLoss,
};
use crate::error::{Error, Result};
use crate::folds::{drop_to_even, make_fold_plan};
use crate::segmentation::{optimal_partition, segment_means};
use crate::signal::{ChangePointSet, PiecewiseSignal, Series};

/// Model-selection procedure used by [`run_estimator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Estimator {
    /// Odd/even split with squared error.
    Copps,
    Cv1TwoFold,
    CvModTwoFold,
    /// V-fold absolute error.
    Cv1Vfold(usize),
    /// V-fold modified squared error.
    CvModVfold(usize),
}

impl Estimator {
    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            Estimator::Copps => "COPPS".into(),
            Estimator::Cv1TwoFold => "CV1".into(),
            Estimator::CvModTwoFold => "CVmod".into(),
            Estimator::Cv1Vfold(v) => format!("{v}-fold CV1"),
            Estimator::CvModVfold(v) => format!("{v}-fold CVmod"),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses `copps`, `cv1`, `cvmod`, `cv1-vfold` (5 folds), `cv1-vfold:V`
/// and `cvmod-vfold[:V]`.
impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let (name, folds) = match lower.split_once(':') {
            Some((name, v)) => {
                let v = v
                    .parse::<usize>()
                    .map_err(|_| Error::BadParams(format!("bad fold count in {s:?}")))?;
                (name.to_string(), Some(v))
            }
            None => (lower, None),
        };
        match (name.as_str(), folds) {
            ("copps" | "cv2", None) => Ok(Estimator::Copps),
            ("cv1", None) => Ok(Estimator::Cv1TwoFold),
            ("cvmod", None) => Ok(Estimator::CvModTwoFold),
            ("cv1-vfold", v) => Ok(Estimator::Cv1Vfold(v.unwrap_or(DEFAULT_FOLDS))),
            ("cvmod-vfold", v) => Ok(Estimator::CvModVfold(v.unwrap_or(DEFAULT_FOLDS))),
            _ => Err(Error::BadParams(format!("unknown method {s:?}"))),
        }
    }
}

/// Fold count of the V-fold procedures when none is given.
pub const DEFAULT_FOLDS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub k_hat: usize,
    pub final_cps: ChangePointSet,
    /// Step function with full-sample segment means as levels.
    pub f_hat: PiecewiseSignal,
    pub curve: CriterionCurve,
}

/// Criterion curve over `L = 0..=k_max` for the chosen procedure.
///
/// Two-fold procedures work on the series with its last observation dropped
/// when the length is odd.
pub fn criterion_curve(series: &Series, method: Estimator, k_max: usize) -> Result<CriterionCurve> {
    let grid: Vec<usize> = (0..=k_max).collect();
    match method {
        Estimator::Copps => two_fold_curve(&drop_to_even(series), k_max, TwoFoldLoss::Squared),
        Estimator::Cv1TwoFold => two_fold_curve(&drop_to_even(series), k_max, TwoFoldLoss::Absolute),
        Estimator::CvModTwoFold => {
            two_fold_curve(&drop_to_even(series), k_max, TwoFoldLoss::ModifiedSquared)
        }
        Estimator::Cv1Vfold(v) => {
            let plan = make_fold_plan(series.len(), v)?;
            vfold_criterion(series, &plan, &grid, &OptimalPartitionFitter, VfoldLoss::Absolute)
        }
        Estimator::CvModVfold(v) => {
            let plan = make_fold_plan(series.len(), v)?;
            vfold_criterion(series, &plan, &grid, &OptimalPartitionFitter, VfoldLoss::ModifiedSquared)
        }
    }
}

/// Selects `K` with `method` over `0..=k_max`, then refits optimal
/// partitioning with `K` change-points on the whole series.
pub fn run_estimator(series: &Series, method: Estimator, k_max: usize) -> Result<FitResult> {
    let needed = 2 * (k_max + 1);
    let usable = drop_to_even(series).len();
    if k_max < 1 || usable < needed {
        return Err(Error::SeriesTooShort { n: series.len(), k_max, needed: needed.max(4) });
    }
    let curve = criterion_curve(series, method, k_max)?;
    fit_from_curve(series, curve)
}

/// Selects `K` from an already computed curve and refits the whole series.
pub fn fit_from_curve(series: &Series, curve: CriterionCurve) -> Result<FitResult> {
    let k_hat = select_k(&curve)?;
    let final_cps = optimal_partition(series, k_hat)?.change_points(k_hat).clone();
    let levels = segment_means(series, &final_cps);
    let f_hat = PiecewiseSignal::fitted(final_cps.clone(), levels)?;
    Ok(FitResult { k_hat, final_cps, f_hat, curve })
}

/// Integrated squared distance between two step functions on `[0, 1]`, each
/// constant on the cells `((i - 1) / n, i / n]`. Computed over the merged
/// breakpoints of both signals.
pub fn mise(f_hat: &PiecewiseSignal, f_true: &PiecewiseSignal) -> Result<f64> {
    let n = f_hat.n();
    if n != f_true.n() {
        return Err(Error::LengthMismatch { left: n, right: f_true.n() });
    }
    if f_hat.dim() != f_true.dim() {
        return Err(Error::DimensionMismatch { expected: f_true.dim(), got: f_hat.dim() });
    }
    let (a, b) = (f_hat.cps().taus(), f_true.cps().taus());
    let (mut ia, mut ib) = (0, 0);
    let mut start = 0;
    let mut total = 0.0;
    while start < n {
        let next_a = a.get(ia).copied().unwrap_or(n);
        let next_b = b.get(ib).copied().unwrap_or(n);
        let end = next_a.min(next_b);
        let diff: f64 = f_hat.levels()[ia]
            .iter()
            .zip(&f_true.levels()[ib])
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        total += diff * (end - start) as f64;
        if end == next_a {
            ia += 1;
        }
        if end == next_b {
            ib += 1;
        }
        start = end;
    }
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(n: usize, taus: Vec<usize>, levels: &[f64]) -> PiecewiseSignal {
        PiecewiseSignal::univariate(ChangePointSet::new(n, taus).unwrap(), levels).unwrap()
    }

    #[test]
    fn mise_examples() {
        let f = step(6, vec![3], &[0.0, 1.0]);
        assert_eq!(mise(&f, &f), Ok(0.0));
        let g = step(6, vec![2], &[0.0, 1.0]);
        assert!((mise(&g, &f).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let shifted = step(6, vec![3], &[0.5, 1.5]);
        assert!((mise(&shifted, &f).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn mise_matches_gridwise_sum() {
        let f = step(20, vec![3, 11, 12], &[0.0, 2.0, -1.0, 4.0]);
        let g = step(20, vec![5, 11, 17], &[0.5, 1.0, 3.0, 4.5]);
        let (sf, sg) = (f.to_series(), g.to_series());
        let direct: f64 = sf.as_flat().iter().zip(sg.as_flat()).map(|(a, b)| (a - b).powi(2)).sum();
        assert!((mise(&g, &f).unwrap() - direct / 20.0).abs() < 1e-12);
    }

    #[test]
    fn mise_length_mismatch() {
        let f = step(6, vec![3], &[0.0, 1.0]);
        let g = step(8, vec![3], &[0.0, 1.0]);
        assert_eq!(mise(&f, &g), Err(Error::LengthMismatch { left: 6, right: 8 }));
    }

    #[test]
    fn noiseless_step_recovered_by_every_method() {
        let mut values = vec![0.0; 10];
        values.extend(vec![5.0; 10]);
        let series = Series::univariate(values).unwrap();
        for method in [
            Estimator::Copps,
            Estimator::Cv1TwoFold,
            Estimator::CvModTwoFold,
            Estimator::Cv1Vfold(5),
        ] {
            let fit = run_estimator(&series, method, 3).unwrap();
            assert_eq!(fit.k_hat, 1, "{method}");
            assert_eq!(fit.final_cps.taus(), &[10]);
            assert_eq!(fit.f_hat.levels(), &[vec![0.0], vec![5.0]]);
        }
    }

    #[test]
    fn series_too_short() {
        let series = Series::univariate(vec![0.0; 7]).unwrap();
        assert!(matches!(
            run_estimator(&series, Estimator::Copps, 3),
            Err(Error::SeriesTooShort { .. })
        ));
        assert!(matches!(
            run_estimator(&series, Estimator::Copps, 0),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn parses_method_names() {
        assert_eq!("copps".parse::<Estimator>(), Ok(Estimator::Copps));
        assert_eq!("CV1".parse::<Estimator>(), Ok(Estimator::Cv1TwoFold));
        assert_eq!("cvmod".parse::<Estimator>(), Ok(Estimator::CvModTwoFold));
        assert_eq!("cv1-vfold".parse::<Estimator>(), Ok(Estimator::Cv1Vfold(5)));
        assert_eq!("cv1-vfold:10".parse::<Estimator>(), Ok(Estimator::Cv1Vfold(10)));
        assert!("pelt".parse::<Estimator>().is_err());
    }
}
