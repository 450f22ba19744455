//! Lists the built-in scenarios and writes one realisation of a scenario to
//! standard output as CSV.
//!
//!     cargo run --example scenarios -- blocks-t5 > blocks_t5.csv

use cpcv::simulate::find_scenario;
use cpcv::{generate, scenario_catalog};

fn main() -> cpcv::Result<()> {
    match std::env::args().nth(1) {
        Some(name) => {
            let scenario = find_scenario(&name)
                .ok_or_else(|| cpcv::Error::BadParams(format!("unknown scenario {name}")))?;
            generate(&scenario, 0).write_csv(std::io::stdout())
        }
        None => {
            for s in scenario_catalog() {
                let jumps: Vec<String> = s.signal.jump_sizes().iter().map(|j| format!("{j:.2}")).collect();
                println!("{:<32} n = {:<5} K = {:<3} jumps [{}]", s.name, s.signal.n(), s.true_k(), jumps.join(", "));
            }
            Ok(())
        }
    }
}
