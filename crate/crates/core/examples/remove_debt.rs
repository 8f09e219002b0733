//! A creditor gains by forgiving a debt owed to it, and again by donating.

use finclear::games::remove_debt_system;
use finclear::{assess, Action, SolverConfig};

fn main() -> finclear::Result<()> {
    let sys = remove_debt_system();
    let cfg = SolverConfig::default();
    for action in [Action::remove_debt("debt_u_v"), Action::donate("v", "u", 1.0)] {
        let r = assess(&sys, &action, "v", &cfg)?;
        println!(
            "{action:?}\n  q_v {:?} -> {:?} (cost {:.3}, gain {:.3})",
            r.payoffs_before, r.payoffs_after, r.cost, r.worst_case_gain
        );
    }
    Ok(())
}
