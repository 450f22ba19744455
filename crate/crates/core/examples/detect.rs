//! Estimate change-points in a CSV file (one row per observation, one column
//! per dimension). Without an argument a simulated series is used.
//!
//!     cargo run --example detect -- data.csv

use cpcv::{run_estimator, Estimator, Series};

fn main() -> cpcv::Result<()> {
    let series = match std::env::args().nth(1) {
        Some(path) => Series::read_csv_path(path, false)?,
        None => {
            let scenario = cpcv::simulate::find_scenario("blocks").unwrap().with_seed(42);
            cpcv::generate(&scenario, 0)
        }
    };

    let fit = run_estimator(&series, Estimator::Cv1Vfold(5), 15)?;
    println!("{} observations, {} change-points selected", series.len(), fit.k_hat);
    for ((a, b), level) in fit.final_cps.segments().zip(fit.f_hat.levels()) {
        println!("  {:>5} .. {:<5} {:?}", a + 1, b, level);
    }
    Ok(())
}
