//! Reads a system document, reports problems with their field path, and
//! prints the solver report as JSON.
//!
//!     cargo run --example documents -- scenarios/triangle.json

use finclear::{find_solutions, parse_system, SolveReport, SolverConfig};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "scenarios/triangle.json".into());
    let text = std::fs::read_to_string(&path).expect("readable document");
    let sys = match parse_system(&text).and_then(|s| s.validate().into_result().map(|_| s)) {
        Ok(sys) => sys,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(2);
        }
    };
    let set = find_solutions(&sys, &SolverConfig::default()).expect("solvable");
    let report = SolveReport::new(&sys, set, true);
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
