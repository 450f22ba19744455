//! Optimal partitioning of a noisy three-level signal: the best segmentation
//! for every number of change-points, checked against exhaustive search on a
//! short prefix.

use cpcv::{brute_force_partition, optimal_partition, ChangePointSet, NoiseKind, PiecewiseSignal, Scenario};

fn main() -> cpcv::Result<()> {
    let cps = ChangePointSet::new(120, vec![40, 85])?;
    let signal = PiecewiseSignal::univariate(cps, &[0.0, 3.0, -1.5])?;
    let scenario = Scenario::new("three-levels", signal, NoiseKind::Gaussian { sigma: 1.0 })?.with_seed(7);
    let series = cpcv::generate(&scenario, 0);

    let result = optimal_partition(&series, 5)?;
    println!("{:>3}  {:>10}  change-points", "L", "RSS");
    for (l, (cps, cost)) in result.iter().enumerate() {
        println!("{l:>3}  {cost:>10.3}  {:?}", cps.taus());
    }

    let prefix = series.truncated(14);
    let (exhaustive, cost) = brute_force_partition(&prefix, 2)?;
    let dp = optimal_partition(&prefix, 2)?;
    println!(
        "\nfirst 14 points, L = 2: exhaustive {:?} ({cost:.4}), dynamic program {:?} ({:.4})",
        exhaustive.taus(),
        dp.change_points(2).taus(),
        dp.cost(2)
    );
    Ok(())
}
