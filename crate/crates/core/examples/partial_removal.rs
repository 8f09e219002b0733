//! Removing only part of a debt can beat removing all of it.
//!
//!     cargo run --example partial_removal -- 0.25

use finclear::games::partial_removal_system;
use finclear::{optimize_partial_removal, Objective, SolverConfig};

fn main() -> finclear::Result<()> {
    let gamma0: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.5);
    let sys = partial_removal_system(gamma0)?;
    let scan = optimize_partial_removal(&sys, "debt_u_v", "v", 20, Objective::WorstCase, &SolverConfig::default())?;
    for p in &scan.curve {
        println!("{:.2}\t{:.4}", p.fraction, p.payoff);
    }
    println!("best fraction {:.2}, payoff {:.4}", scan.best_fraction, scan.best_payoff);
    Ok(())
}
