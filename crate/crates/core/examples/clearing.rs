//! Builds a three-bank network by hand, solves it and prints the flows.
//!
//! u owes 2 to v and 2 to w; w has sold v protection of 2 on u's default.

use finclear::{find_solutions, FinancialSystem, SolverConfig};

fn main() -> finclear::Result<()> {
    let mut sys = FinancialSystem::new(1);
    sys.add_bank("u", 2.0).add_bank("v", 1.0).add_bank("w", 0.0);
    sys.add_debt("u", "v", 2.0);
    sys.add_debt("u", "w", 2.0);
    sys.add_cds("w", "v", "u", 2.0);
    sys.validate().into_result()?;

    let set = find_solutions(&sys, &SolverConfig::default())?;
    println!("{:?}: {} solution(s)", set.multiplicity, set.len());
    for s in &set.solutions {
        for (bank, r) in s.recovery.iter() {
            println!(
                "{bank}: r={r:.3} assets={:.3} liabilities={:.3} payoff={:.3}",
                s.assets_of(bank.as_str()),
                s.liability_of(bank.as_str()),
                s.payoff(bank.as_str())
            );
        }
        for c in &s.contracts {
            println!("  {} {} -> {}: owes {:.3}, pays {:.3}", c.id, c.debtor, c.creditor, c.liability, c.payment);
        }
    }
    Ok(())
}
