//! A network with two clearing solutions, and the injection that removes the
//! bad one. Plain iteration from full solvency only ever finds one of them.

use finclear::games::inject_system;
use finclear::{assess, find_solutions, iterate, Action, RecoveryVector, SolverConfig};

fn main() -> finclear::Result<()> {
    let sys = inject_system();
    let cfg = SolverConfig::default();

    let set = find_solutions(&sys, &cfg)?;
    for s in &set.solutions {
        println!("r_u={:.3} r_v={:.3} q_v={:.3}", s.rate("u"), s.rate("v"), s.payoff("v"));
    }

    let from_top = iterate(&sys, &RecoveryVector::uniform(&sys, 1.0), &cfg)?;
    if let Some(s) = from_top.converged() {
        println!("iteration from r=1 stops at q_v={:.3}", s.payoff("v"));
    }

    let report = assess(&sys, &Action::inject("v", 1.0), "v", &cfg)?;
    println!(
        "inject 1: q_v {:?} -> {:?}, worst-case gain {:.3}",
        report.payoffs_before, report.payoffs_after, report.worst_case_gain
    );
    Ok(())
}
