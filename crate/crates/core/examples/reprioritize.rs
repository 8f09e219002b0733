//! Paying one creditor first can change whether a bank itself defaults.

use finclear::games::reprioritize_system;
use finclear::{assess, Action, SolverConfig};

fn main() -> finclear::Result<()> {
    let cfg = SolverConfig::default();
    let raise = Action::reprioritize("v", [("debt_v_u", 1)]);
    for delta in [0.5, 100.0] {
        let sys = reprioritize_system(delta)?;
        let r = assess(&sys, &raise, "v", &cfg)?;
        println!(
            "delta={delta}: r_v {:?} -> {:?}, q_v {:?} -> {:?}",
            r.rates_before, r.rates_after, r.payoffs_before, r.payoffs_after
        );
    }
    Ok(())
}
