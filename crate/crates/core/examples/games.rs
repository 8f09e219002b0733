//! Payoff matrices and pure equilibria of the bundled two-player games.
//!
//!     cargo run --example games -- volunteer

use finclear::games::SCENARIOS;
use finclear::{build_scenario, game_report, ScenarioParams, SolverConfig};

fn main() -> finclear::Result<()> {
    let only = std::env::args().nth(1);
    let cfg = SolverConfig::default();
    for &name in SCENARIOS {
        if only.as_deref().is_some_and(|o| o != name) {
            continue;
        }
        let scenario = build_scenario(name, &ScenarioParams::default())?;
        if scenario.players.len() < 2 || name == "dollar_auction" {
            continue;
        }
        let report = game_report(&scenario, &cfg)?;
        println!("{name}");
        for cell in &report.matrix.cells {
            let pay: Vec<String> = cell.payoffs.iter().map(|p| format!("{p:.3}")).collect();
            println!("  {:<24} ({})", cell.labels.join("/"), pay.join(", "));
        }
        println!("  nash: {:?}", report.nash);
        println!("  dominant: {:?}", report.dominant);
    }
    Ok(())
}
