//! Change-point detection for piecewise-constant signals.
//!
//! Segmentations come from exact optimal partitioning; the number of
//! change-points is chosen by cross-validation over interleaved folds with
//! squared error, absolute error or a modified squared error that drops the
//! holdout points next to each estimated change. A seeded Monte-Carlo runner
//! compares the selectors on built-in scenarios.
//!
//! ```
//! use cpcv::{run_estimator, Estimator, Series};
//!
//! let mut values = vec![0.0; 30];
//! values.extend(vec![4.0; 30]);
//! let series = Series::univariate(values).unwrap();
//! let fit = run_estimator(&series, Estimator::Cv1Vfold(5), 4).unwrap();
//! assert_eq!(fit.final_cps.taus(), &[30]);
//! ```

pub mod cli;
pub mod criteria;
pub mod error;
pub mod folds;
pub mod pipeline;
pub mod segmentation;
pub mod signal;
pub mod simulate;

pub use criteria::{
    cv1, cv2, cvmod, fold_fits, select_k, two_fold_curve, vfold_criterion, CriterionCurve, FoldFit,
    TIE_RTOL,
    Fitter, Method, OptimalPartitionFitter, TrainingFit, TwoFoldLoss, VfoldLoss,
};
pub use error::{Error, Result};
pub use folds::{drop_to_even, make_fold_plan, odd_even_split, remap_changepoints, FoldPlan};
pub use pipeline::{criterion_curve, fit_from_curve, mise, run_estimator, Estimator, FitResult};
pub use segmentation::{
    brute_force_partition, build_cost_table, optimal_partition, SegmentCostTable, SegmentationResult,
};
pub use signal::{ChangePointSet, PiecewiseSignal, Series};
pub use simulate::{
    generate, run_simulation, scenario_catalog, NoiseKind, NoiseModel, Scenario, SimulationReport,
};
