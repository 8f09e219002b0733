//! Escalating donations between two CDS holders betting on opposite defaults.
//!
//! `u_prime` profits when `u` defaults and therefore funds `v`; `v_prime`
//! mirrors it. Whoever's target holds more external assets survives.

use serde::{Deserialize, Serialize};

use super::scenarios::{auction_system, check_epsilon};
use crate::error::{Error, Result};
use crate::solver::{find_solutions, Multiplicity, SolutionSet, SolverConfig};

/// Total each player may donate.
pub const BUDGET: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuctionPlayer {
    UPrime,
    VPrime,
}

impl AuctionPlayer {
    pub fn bank(self) -> &'static str {
        match self {
            AuctionPlayer::UPrime => "u_prime",
            AuctionPlayer::VPrime => "v_prime",
        }
    }

    pub fn rival(self) -> Self {
        match self {
            AuctionPlayer::UPrime => AuctionPlayer::VPrime,
            AuctionPlayer::VPrime => AuctionPlayer::UPrime,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuctionMove {
    pub player: AuctionPlayer,
    /// Donation in units of epsilon; zero for a pass.
    pub units: u64,
    pub cost: f64,
    pub payoff_before: f64,
    pub payoff_after: f64,
    pub e_u: f64,
    pub e_v: f64,
}

impl AuctionMove {
    pub fn passed(&self) -> bool {
        self.units == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuctionState {
    pub epsilon: f64,
    pub delta: f64,
    /// Cumulative donations in units of epsilon; `u_prime` funds `v`.
    pub spent_u_prime: u64,
    pub spent_v_prime: u64,
    pub history: Vec<AuctionMove>,
}

impl AuctionState {
    pub fn new(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self {
            epsilon,
            delta: 6.0 * epsilon,
            spent_u_prime: 0,
            spent_v_prime: 0,
            history: Vec::new(),
        })
    }

    pub fn e_u(&self) -> f64 {
        self.spent_v_prime as f64 * self.epsilon
    }

    pub fn e_v(&self) -> f64 {
        self.spent_u_prime as f64 * self.epsilon
    }

    pub fn spent(&self, player: AuctionPlayer) -> f64 {
        self.units(player) as f64 * self.epsilon
    }

    fn units(&self, player: AuctionPlayer) -> u64 {
        match player {
            AuctionPlayer::UPrime => self.spent_u_prime,
            AuctionPlayer::VPrime => self.spent_v_prime,
        }
    }

    fn units_mut(&mut self, player: AuctionPlayer) -> &mut u64 {
        match player {
            AuctionPlayer::UPrime => &mut self.spent_u_prime,
            AuctionPlayer::VPrime => &mut self.spent_v_prime,
        }
    }

    /// Whose turn it is: the rival of the last mover, `u_prime` first.
    pub fn next_player(&self) -> AuctionPlayer {
        self.history
            .last()
            .map_or(AuctionPlayer::UPrime, |m| m.player.rival())
    }

    pub fn halted(&self) -> bool {
        self.history.last().is_some_and(AuctionMove::passed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuctionCase {
    /// `e_u < e_v`: only `r_u = e_u, r_v = 1`.
    UDefaults,
    /// `e_u > e_v`: only `r_u = 1, r_v = e_v`.
    VDefaults,
    /// `e_u = e_v`: every `r_u + r_v = 1 + e_u` with both rates in `[e_u, 1]`.
    Family,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuctionOutcome {
    pub e_u: f64,
    pub e_v: f64,
    pub case: AuctionCase,
    pub solutions: SolutionSet,
    /// Worst case over the solutions found.
    pub payoff_u_prime: f64,
    pub payoff_v_prime: f64,
}

impl AuctionOutcome {
    pub fn payoff(&self, player: AuctionPlayer) -> f64 {
        match player {
            AuctionPlayer::UPrime => self.payoff_u_prime,
            AuctionPlayer::VPrime => self.payoff_v_prime,
        }
    }
}

/// Solves the auction network at the given donations and classifies the
/// solution structure from what the solver found.
pub fn auction_solutions(
    e_u: f64,
    e_v: f64,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<AuctionOutcome> {
    for e in [e_u, e_v] {
        if !(0.0..1.0).contains(&e) {
            return Err(Error::InvalidParams(format!(
                "external assets {e} outside [0, 1)"
            )));
        }
    }
    let solutions = find_solutions(&auction_system(e_u, e_v, delta), cfg)?;
    let tol = cfg.tolerance.max(1e-9) * 10.0;
    let case = match solutions.multiplicity {
        Multiplicity::Unique => {
            let s = &solutions.solutions[0];
            if (s.rate("v") - 1.0).abs() <= tol && s.rate("u") < 1.0 {
                AuctionCase::UDefaults
            } else if (s.rate("u") - 1.0).abs() <= tol && s.rate("v") < 1.0 {
                AuctionCase::VDefaults
            } else {
                return Err(Error::InvalidParams(format!(
                    "unexpected unique solution at e_u={e_u}, e_v={e_v}"
                )));
            }
        }
        Multiplicity::None => {
            return Err(Error::InvalidParams("no solution found".into()));
        }
        Multiplicity::Multiple | Multiplicity::FamilySuspected => AuctionCase::Family,
    };
    Ok(AuctionOutcome {
        e_u,
        e_v,
        case,
        payoff_u_prime: solutions.min_payoff("u_prime").unwrap_or(f64::NAN),
        payoff_v_prime: solutions.min_payoff("v_prime").unwrap_or(f64::NAN),
        solutions,
    })
}

/// `player` donates the least multiple of epsilon that lifts its target
/// strictly above the rival's target, provided that raises its worst-case
/// payoff by more than the donation and stays within budget; otherwise it
/// passes.
pub fn auction_step(
    state: &AuctionState,
    player: AuctionPlayer,
    cfg: &SolverConfig,
) -> Result<AuctionState> {
    let eps = state.epsilon;
    let before = auction_solutions(state.e_u(), state.e_v(), state.delta, cfg)?;
    let payoff_before = before.payoff(player);

    let own = state.units(player);
    let rival = state.units(player.rival());
    let units = (rival + 1).saturating_sub(own);
    let mut next = state.clone();

    let mut pass = || {
        next.history.push(AuctionMove {
            player,
            units: 0,
            cost: 0.0,
            payoff_before,
            payoff_after: payoff_before,
            e_u: state.e_u(),
            e_v: state.e_v(),
        });
    };
    let total = (own + units) as f64 * eps;
    if units == 0 || total > BUDGET + 1e-12 {
        pass();
        return Ok(next);
    }

    let mut trial = state.clone();
    *trial.units_mut(player) += units;
    let after = auction_solutions(trial.e_u(), trial.e_v(), state.delta, cfg)?;
    let cost = units as f64 * eps;
    let payoff_after = after.payoff(player);
    if payoff_after - payoff_before > cost {
        *next.units_mut(player) += units;
        next.history.push(AuctionMove {
            player,
            units,
            cost,
            payoff_before,
            payoff_after,
            e_u: next.e_u(),
            e_v: next.e_v(),
        });
    } else {
        pass();
    }
    Ok(next)
}

/// Alternates moves for up to `rounds` steps, stopping after the first pass.
pub fn auction_run(state: &AuctionState, rounds: usize, cfg: &SolverConfig) -> Result<AuctionState> {
    let mut s = state.clone();
    for _ in 0..rounds {
        if s.halted() {
            break;
        }
        s = auction_step(&s, s.next_player(), cfg)?;
    }
    Ok(s)
}
