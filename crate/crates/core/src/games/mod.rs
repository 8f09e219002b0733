//! Normal-form games between acting banks, and the donation auction.

mod auction;
mod scenarios;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

pub use auction::{
    auction_run, auction_solutions, auction_step, AuctionCase, AuctionMove, AuctionOutcome,
    AuctionPlayer, AuctionState,
};
pub use scenarios::{
    auction_system, build_scenario, triangle, inject_system, partial_removal_system,
    prisoners_system, remove_debt_system, reprioritize_system, stag_hunt_system,
    volunteer_system, ScenarioParams, DEFAULT_DELTA, DEFAULT_EPSILON, DEFAULT_GAMMA0,
    DEFAULT_VOLUNTEERS, SCENARIOS,
};

use crate::error::{Error, Result};
use crate::interventions::{apply_action, Action};
use crate::model::{BankId, ContractId, FinancialSystem};
use crate::solver::{find_solutions, Multiplicity, SolutionSet, SolverConfig};

/// Payoff comparisons treat differences below this as ties.
pub const PAYOFF_TOLERANCE: f64 = 1e-9;

/// A labelled bundle of actions; an empty bundle is the no-op.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Strategy {
    pub label: String,
    pub actions: Vec<Action>,
}

impl Strategy {
    pub fn cost_to(&self, bank: &str) -> f64 {
        self.actions.iter().map(|a| a.cost_to(bank)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameScenario {
    pub name: String,
    pub system: FinancialSystem,
    pub players: Vec<BankId>,
    /// `strategies[i]` is the menu of `players[i]`.
    pub strategies: Vec<Vec<Strategy>>,
    pub params: ScenarioParams,
}

impl GameScenario {
    /// Checks that every strategy can be applied to `system` by its player
    /// and that no two players rewrite the same contract.
    pub fn new(
        name: &str,
        system: FinancialSystem,
        players: Vec<String>,
        strategies: Vec<Vec<Strategy>>,
        params: ScenarioParams,
    ) -> Result<Self> {
        if players.len() != strategies.len() {
            return Err(Error::InvalidParams(format!(
                "{} players but {} strategy menus",
                players.len(),
                strategies.len()
            )));
        }
        let mut claimed: BTreeSet<ContractId> = BTreeSet::new();
        for (player, menu) in players.iter().zip(&strategies) {
            if !system.has_bank(player) {
                return Err(Error::UnknownBank(player.as_str().into()));
            }
            if menu.is_empty() {
                return Err(Error::InvalidParams(format!("player `{player}` has no strategies")));
            }
            let mut mine = BTreeSet::new();
            for s in menu {
                let mut sys = system.clone();
                for a in &s.actions {
                    a.check_actor(&system, player)?;
                    sys = apply_action(&sys, a)?;
                    mine.extend(a.touched_contracts());
                }
            }
            if let Some(c) = mine.iter().find(|c| claimed.contains(*c)) {
                return Err(Error::InvalidParams(format!(
                    "contract `{c}` is rewritten by more than one player"
                )));
            }
            claimed.extend(mine);
        }
        Ok(Self {
            name: name.to_owned(),
            system,
            players: players.into_iter().map(BankId::from).collect(),
            strategies,
            params,
        })
    }

    pub fn profile_count(&self) -> usize {
        self.strategies.iter().map(Vec::len).product()
    }

    /// Mixed-radix decoding with player 0 most significant.
    pub fn profile(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.strategies.len()];
        for (slot, menu) in out.iter_mut().zip(&self.strategies).rev() {
            *slot = index % menu.len();
            index /= menu.len();
        }
        out
    }

    pub fn profile_index(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(&self.strategies)
            .fold(0, |acc, (&s, menu)| acc * menu.len() + s)
    }

    /// The base system with every chosen action applied.
    pub fn system_under(&self, profile: &[usize]) -> Result<FinancialSystem> {
        let mut sys = self.system.clone();
        for (menu, &s) in self.strategies.iter().zip(profile) {
            for a in &menu[s].actions {
                sys = apply_action(&sys, a)?;
            }
        }
        Ok(sys)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PayoffCell {
    pub profile: Vec<usize>,
    pub labels: Vec<String>,
    /// Worst-case payoff over all solutions, net of cost, per player.
    pub payoffs: Vec<f64>,
    pub costs: Vec<f64>,
    pub multiplicity: Multiplicity,
    pub solutions: SolutionSet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PayoffMatrix {
    pub scenario: String,
    pub players: Vec<BankId>,
    pub strategy_labels: Vec<Vec<String>>,
    /// Indexed by [`GameScenario::profile_index`].
    pub cells: Vec<PayoffCell>,
}

impl PayoffMatrix {
    fn radices(&self) -> Vec<usize> {
        self.strategy_labels.iter().map(Vec::len).collect()
    }

    pub fn index(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(self.radices())
            .fold(0, |acc, (&s, n)| acc * n + s)
    }

    pub fn cell(&self, profile: &[usize]) -> &PayoffCell {
        &self.cells[self.index(profile)]
    }

    /// Profile given by strategy labels, e.g. `["defect", "defect"]`.
    pub fn cell_by_labels(&self, labels: &[&str]) -> Option<&PayoffCell> {
        self.cells
            .iter()
            .find(|c| c.labels.iter().map(String::as_str).eq(labels.iter().copied()))
    }
}

pub fn payoff_matrix(scenario: &GameScenario, cfg: &SolverConfig) -> Result<PayoffMatrix> {
    if scenario.players.is_empty() {
        return Err(Error::InvalidParams(format!(
            "scenario `{}` has no players",
            scenario.name
        )));
    }
    let cells = (0..scenario.profile_count())
        .into_par_iter()
        .map(|i| {
            let profile = scenario.profile(i);
            let solutions = find_solutions(&scenario.system_under(&profile)?, cfg)?;
            let mut payoffs = Vec::new();
            let mut costs = Vec::new();
            for player in &scenario.players {
                let cost: f64 = scenario
                    .strategies
                    .iter()
                    .zip(&profile)
                    .map(|(menu, &s)| menu[s].cost_to(player.as_str()))
                    .sum();
                let q = solutions.min_payoff(player.as_str()).unwrap_or(f64::NAN);
                payoffs.push(q - cost);
                costs.push(cost);
            }
            Ok(PayoffCell {
                labels: profile
                    .iter()
                    .zip(&scenario.strategies)
                    .map(|(&s, menu)| menu[s].label.clone())
                    .collect(),
                profile,
                payoffs,
                costs,
                multiplicity: solutions.multiplicity,
                solutions,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PayoffMatrix {
        scenario: scenario.name.clone(),
        players: scenario.players.clone(),
        strategy_labels: scenario
            .strategies
            .iter()
            .map(|m| m.iter().map(|s| s.label.clone()).collect())
            .collect(),
        cells,
    })
}

fn deviations<'a>(
    m: &'a PayoffMatrix,
    profile: &[usize],
    player: usize,
) -> impl Iterator<Item = f64> + 'a {
    let base = profile.to_vec();
    (0..m.strategy_labels[player].len()).map(move |s| {
        let mut p = base.clone();
        p[player] = s;
        m.cell(&p).payoffs[player]
    })
}

/// Profiles in which no player gains more than [`PAYOFF_TOLERANCE`] by
/// deviating alone.
pub fn find_pure_nash(m: &PayoffMatrix) -> Vec<Vec<usize>> {
    m.cells
        .iter()
        .filter(|c| {
            (0..m.players.len()).all(|p| {
                let own = c.payoffs[p];
                deviations(m, &c.profile, p).all(|alt| alt <= own + PAYOFF_TOLERANCE)
            })
        })
        .map(|c| c.profile.clone())
        .collect()
}

/// A strategy that does at least as well as every alternative against every
/// choice of the other players (the first one, if several tie everywhere).
pub fn find_dominant(m: &PayoffMatrix, player: usize) -> Option<usize> {
    let n = m.strategy_labels.get(player)?.len();
    (0..n).find(|&s| {
        m.cells.iter().all(|c| {
            let mut p = c.profile.clone();
            p[player] = s;
            let mine = m.cell(&p).payoffs[player];
            mine + PAYOFF_TOLERANCE >= c.payoffs[player]
        })
    })
}

/// A matrix with its pure equilibria and dominant strategies, by label.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameReport {
    pub matrix: PayoffMatrix,
    pub nash: Vec<Vec<String>>,
    /// Per player, a weakly dominant strategy if there is one.
    pub dominant: Vec<Option<String>>,
}

pub fn game_report(scenario: &GameScenario, cfg: &SolverConfig) -> Result<GameReport> {
    let matrix = payoff_matrix(scenario, cfg)?;
    let nash = find_pure_nash(&matrix)
        .iter()
        .map(|p| matrix.cell(p).labels.clone())
        .collect();
    let dominant = (0..matrix.players.len())
        .map(|i| find_dominant(&matrix, i).map(|s| matrix.strategy_labels[i][s].clone()))
        .collect();
    Ok(GameReport {
        matrix,
        nash,
        dominant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(name: &str, params: ScenarioParams) -> PayoffMatrix {
        let s = build_scenario(name, &params).unwrap();
        payoff_matrix(&s, &SolverConfig::default()).unwrap()
    }

    fn assert_cell(m: &PayoffMatrix, labels: &[&str], want: &[f64]) {
        let c = m.cell_by_labels(labels).unwrap();
        for (got, want) in c.payoffs.iter().zip(want) {
            assert!((got - want).abs() < 1e-9, "{labels:?}: {:?} vs {want:?}", c.payoffs);
        }
    }

    #[test]
    fn prisoners_dilemma() {
        let m = matrix("prisoners", ScenarioParams::default());
        assert_cell(&m, &["cooperate", "cooperate"], &[3.0, 3.0]);
        assert_cell(&m, &["cooperate", "defect"], &[1.5, 4.0]);
        assert_cell(&m, &["defect", "cooperate"], &[4.0, 1.5]);
        assert_cell(&m, &["defect", "defect"], &[8.0 / 3.0, 8.0 / 3.0]);
        assert_eq!(find_pure_nash(&m), vec![vec![1, 1]]);
        assert_eq!(find_dominant(&m, 0), Some(1));
        assert_eq!(find_dominant(&m, 1), Some(1));
    }

    #[test]
    fn chicken_nets_out_donations() {
        let m = matrix("chicken", ScenarioParams::default());
        assert_cell(&m, &["defect", "defect"], &[0.0, 0.0]);
        assert_cell(&m, &["cooperate", "cooperate"], &[2.0, 2.0]);
        assert_cell(&m, &["cooperate", "defect"], &[2.0, 3.0]);
        assert_eq!(find_pure_nash(&m), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(find_dominant(&m, 0), None);
    }

    #[test]
    fn profile_round_trip() {
        let s = build_scenario("volunteer", &ScenarioParams::k(3)).unwrap();
        for i in 0..s.profile_count() {
            assert_eq!(s.profile_index(&s.profile(i)), i);
        }
        assert_eq!(s.profile(1), vec![0, 0, 1]);
    }

    #[test]
    fn shared_contract_rejected() {
        let base = build_scenario("prisoners", &ScenarioParams::default()).unwrap();
        let same = vec![Strategy {
            label: "x".into(),
            actions: vec![Action::remove_debt("debt_u_v1")],
        }];
        let err = GameScenario::new(
            "bad",
            base.system.clone(),
            vec!["v1".into(), "v1".into()],
            vec![same.clone(), same],
            ScenarioParams::default(),
        );
        assert!(matches!(err, Err(Error::InvalidParams(_))));
    }

    #[test]
    fn bad_params() {
        for (name, p) in [
            ("partial_removal", ScenarioParams::gamma0(0.0)),
            ("partial_removal", ScenarioParams::gamma0(1.5)),
            ("volunteer", ScenarioParams::k(1)),
            ("dollar_auction", ScenarioParams::epsilon(0.0)),
        ] {
            assert!(matches!(build_scenario(name, &p), Err(Error::InvalidParams(_))));
        }
        assert!(matches!(
            build_scenario("nope", &ScenarioParams::default()),
            Err(Error::UnknownScenario(_))
        ));
    }
}
