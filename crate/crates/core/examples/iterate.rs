//! Damped iteration from a few starting points, and where each one ends.

use finclear::games::inject_system;
use finclear::{iterate, IterationResult, RecoveryVector, SolverConfig};

fn main() -> finclear::Result<()> {
    let sys = inject_system();
    let cfg = SolverConfig::default();
    for (u, v) in [(1.0, 1.0), (0.0, 0.0), (0.5, 0.5), (0.0, 1.0)] {
        let r0 = RecoveryVector::solvent_except(&sys, [("u", u), ("v", v)]);
        match iterate(&sys, &r0, &cfg)? {
            IterationResult::Converged { state, iterations } => println!(
                "from ({u}, {v}): r_u={:.3} r_v={:.3} after {iterations} steps",
                state.rate("u"),
                state.rate("v")
            ),
            IterationResult::NotConverged { best_residual, reason, .. } => {
                println!("from ({u}, {v}): {reason:?}, best residual {best_residual:.2e}")
            }
        }
    }
    Ok(())
}
