//! Generalised V-fold cross-validation with a user-supplied fitting
//! procedure. The tuning parameter here is a penalty index rather than a
//! change-point count: each grid value picks the segmentation minimising
//! RSS + penalty * L.

use cpcv::{
    make_fold_plan, optimal_partition, segmentation::segment_means, select_k, vfold_criterion, Fitter,
    OptimalPartitionFitter, Series, TrainingFit, VfoldLoss,
};

const PENALTIES: [f64; 6] = [1.0, 5.0, 10.0, 20.0, 40.0, 80.0];

struct PenalisedFitter;

impl Fitter for PenalisedFitter {
    fn fit(&self, train: &Series, grid: &[usize]) -> cpcv::Result<Vec<TrainingFit>> {
        let l_max = 10.min(train.len() - 1);
        let path = optimal_partition(train, l_max)?;
        Ok(grid
            .iter()
            .map(|&psi| {
                let pen = PENALTIES[psi];
                let l = (0..=l_max)
                    .min_by(|&a, &b| {
                        (path.cost(a) + pen * a as f64).total_cmp(&(path.cost(b) + pen * b as f64))
                    })
                    .unwrap();
                let cps = path.change_points(l).clone();
                let levels = segment_means(train, &cps);
                TrainingFit { cps, levels }
            })
            .collect())
    }
}

fn main() -> cpcv::Result<()> {
    let scenario = cpcv::simulate::find_scenario("bump-lambda20-delta2").unwrap().with_seed(3);
    let series = cpcv::generate(&scenario, 0);
    let plan = make_fold_plan(series.len(), 5)?;

    let grid: Vec<usize> = (0..=6).collect();
    let counts = vfold_criterion(&series, &plan, &grid, &OptimalPartitionFitter, VfoldLoss::Absolute)?;
    println!("5-fold absolute loss by number of change-points:");
    for (l, v) in counts.iter() {
        println!("  L = {l}: {v:.3}");
    }
    println!("  selected L = {}", select_k(&counts)?);

    let psi: Vec<usize> = (0..PENALTIES.len()).collect();
    let penalised = vfold_criterion(&series, &plan, &psi, &PenalisedFitter, VfoldLoss::ModifiedSquared)?;
    println!("\n5-fold modified squared loss by penalty:");
    for (p, v) in penalised.iter() {
        println!("  penalty {:>5}: {v:.3}", PENALTIES[p]);
    }
    println!("  selected penalty = {}", PENALTIES[select_k(&penalised)?]);
    Ok(())
}
