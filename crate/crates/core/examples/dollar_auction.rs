//! Two outsiders bid for which bank defaults; both end up paying.

use finclear::games::{auction_solutions, AuctionPlayer};
use finclear::{auction_run, AuctionState, SolverConfig};

fn main() -> finclear::Result<()> {
    let cfg = SolverConfig::default();
    let start = AuctionState::new(0.05)?;

    let tie = auction_solutions(0.0, 0.0, start.delta, &cfg)?;
    println!("no donations: {:?}, {} solutions", tie.case, tie.solutions.len());

    let end = auction_run(&start, 100, &cfg)?;
    for m in &end.history {
        println!(
            "{:?}: {} unit(s), e_u={:.2} e_v={:.2}, payoff {:.3} -> {:.3}",
            m.player, m.units, m.e_u, m.e_v, m.payoff_before, m.payoff_after
        );
    }
    println!(
        "spent u'={:.2} v'={:.2}",
        end.spent(AuctionPlayer::UPrime),
        end.spent(AuctionPlayer::VPrime)
    );
    Ok(())
}
