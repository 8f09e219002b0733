//! Writes every named scenario's base system as a JSON document.
//!
//!     cargo run --example export_scenarios -- scenarios/

use std::path::PathBuf;

use finclear::games::SCENARIOS;
use finclear::{build_scenario, ScenarioParams, SystemDocument};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "scenarios".into()));
    std::fs::create_dir_all(&dir)?;

    let mut jobs: Vec<(String, &str, ScenarioParams)> = SCENARIOS
        .iter()
        .map(|&n| (n.to_owned(), n, ScenarioParams::default()))
        .collect();
    jobs.push(("reprioritize_half".into(), "reprioritize", ScenarioParams::delta(0.5)));

    for (file, name, params) in jobs {
        let scenario = build_scenario(name, &params)?;
        let path = dir.join(format!("{file}.json"));
        std::fs::write(&path, SystemDocument::from_system(&scenario.system).to_json() + "\n")?;
        println!("{}", path.display());
    }
    Ok(())
}
