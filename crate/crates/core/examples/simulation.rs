//! Monte-Carlo comparison of the selectors on a catalog scenario, printed
//! as a report table. Pass a scenario name and replication count to change
//! the defaults.
//!
//!     cargo run --release --example simulation -- underestimation-D3 500

use cpcv::simulate::{find_scenario, suggested_k_max, write_report_csv};
use cpcv::{run_simulation, Estimator};

fn main() -> cpcv::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "underestimation-D3".into());
    let reps = args.next().and_then(|m| m.parse().ok()).unwrap_or(200);
    let scenario = find_scenario(&name)
        .ok_or_else(|| cpcv::Error::BadParams(format!("unknown scenario {name}")))?
        .with_seed(2024);

    let methods = [Estimator::Copps, Estimator::Cv1TwoFold, Estimator::CvModTwoFold, Estimator::Cv1Vfold(5)];
    let reports = run_simulation(&scenario, &methods, reps, suggested_k_max(&scenario), 0)?;
    println!("{} (true K = {}), {reps} replications\n", scenario.name, scenario.true_k());
    write_report_csv(&reports, std::io::stdout())
}
