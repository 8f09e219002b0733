//! The same network with u's debt to w senior to everything else.

use finclear::games::triangle;
use finclear::{find_solutions, SolverConfig};

fn main() -> finclear::Result<()> {
    let cfg = SolverConfig::default();
    for priorities in [false, true] {
        let sys = triangle(priorities);
        let set = find_solutions(&sys, &cfg)?;
        let s = &set.solutions[0];
        println!(
            "levels={} r_u={:.3} r_w={:.3} q_v={:.3}",
            sys.priority_levels(),
            s.rate("u"),
            s.rate("w"),
            s.payoff("v")
        );
    }
    Ok(())
}
