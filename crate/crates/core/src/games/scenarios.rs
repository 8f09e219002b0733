//! Reconstructed example networks and their acting banks' strategy menus.
//!
//! Unlabeled helper banks follow two conventions: `x*` banks only write CDSs
//! and hold exactly the largest amount they can ever owe, so they never
//! default; `s` is a sink that receives debts and owes nothing.

use serde::{Deserialize, Serialize};

use super::{GameScenario, Strategy};
use crate::error::{Error, Result};
use crate::interventions::Action;
use crate::model::{Contract, ContractId, ContractKind, FinancialSystem};

/// Names accepted by [`build_scenario`].
pub const SCENARIOS: &[&str] = &[
    "triangle",
    "triangle_senior",
    "remove_debt",
    "partial_removal",
    "inject",
    "reprioritize",
    "prisoners",
    "stag_hunt",
    "chicken",
    "volunteer",
    "dollar_auction",
];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Fraction of the incoming debt it is optimal to remove (`partial_removal`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,
    /// Weight of the acting bank's CDS (`reprioritize`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Minimum donation step (`dollar_auction`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Number of volunteers (`volunteer`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl ScenarioParams {
    pub fn gamma0(g: f64) -> Self {
        Self {
            gamma0: Some(g),
            ..Self::default()
        }
    }

    pub fn delta(d: f64) -> Self {
        Self {
            delta: Some(d),
            ..Self::default()
        }
    }

    pub fn epsilon(e: f64) -> Self {
        Self {
            epsilon: Some(e),
            ..Self::default()
        }
    }

    pub fn k(k: usize) -> Self {
        Self {
            k: Some(k),
            ..Self::default()
        }
    }
}

pub const DEFAULT_GAMMA0: f64 = 0.5;
pub const DEFAULT_DELTA: f64 = 100.0;
pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_VOLUNTEERS: usize = 3;

fn debt(sys: &mut FinancialSystem, id: &str, debtor: &str, creditor: &str, notional: f64) {
    debt_at(sys, id, debtor, creditor, notional, 1);
}

fn debt_at(sys: &mut FinancialSystem, id: &str, debtor: &str, creditor: &str, notional: f64, priority: u32) {
    sys.add_contract(Contract {
        id: ContractId::from(id),
        debtor: debtor.into(),
        creditor: creditor.into(),
        notional,
        kind: ContractKind::Debt,
        priority,
    });
}

fn cds(sys: &mut FinancialSystem, id: &str, debtor: &str, creditor: &str, reference: &str, notional: f64) {
    cds_at(sys, id, debtor, creditor, reference, notional, 1);
}

fn cds_at(
    sys: &mut FinancialSystem,
    id: &str,
    debtor: &str,
    creditor: &str,
    reference: &str,
    notional: f64,
    priority: u32,
) {
    sys.add_contract(Contract {
        id: ContractId::from(id),
        debtor: debtor.into(),
        creditor: creditor.into(),
        notional,
        kind: ContractKind::Cds {
            reference: reference.into(),
        },
        priority,
    });
}

/// Three banks; `u` cannot pay either debt in full and `w` insures `v`
/// against `u`. With `priorities`, `u`'s debt to `w` is paid first.
pub fn triangle(priorities: bool) -> FinancialSystem {
    let (levels, low) = if priorities { (2, 2) } else { (1, 1) };
    let mut sys = FinancialSystem::new(levels);
    sys.add_bank("u", 2.0).add_bank("v", 1.0).add_bank("w", 0.0);
    debt_at(&mut sys, "debt_u_v", "u", "v", 2.0, low);
    debt_at(&mut sys, "debt_u_w", "u", "w", 2.0, 1);
    cds_at(&mut sys, "cds_w_v", "w", "v", "u", 2.0, low);
    sys
}

/// `v` is owed by `u` and holds a CDS on `w`, which is solvent only while
/// `u` defaults. `e_u` is the funding of `u` (`2 - gamma0` in the partial
/// variant), `insurance` the weight of the CDS on `u` held by `w`.
fn removal_network(e_u: f64, insurance: f64) -> FinancialSystem {
    let mut sys = FinancialSystem::new(1);
    sys.add_bank("u", e_u)
        .add_bank("v", 0.0)
        .add_bank("w", 0.0)
        .add_bank("x1", insurance)
        .add_bank("x2", 2.0)
        .add_bank("s", 0.0);
    debt(&mut sys, "debt_u_v", "u", "v", 1.0);
    debt(&mut sys, "debt_u_s", "u", "s", 1.0);
    cds(&mut sys, "cds_x1_w", "x1", "w", "u", insurance);
    debt(&mut sys, "debt_w_s", "w", "s", 1.0);
    cds(&mut sys, "cds_x2_v", "x2", "v", "w", 2.0);
    sys
}

/// Removing (or donating around) an incoming debt.
pub fn remove_debt_system() -> FinancialSystem {
    removal_network(1.0, 2.0)
}

/// Partial removal where removing exactly `gamma0` of the debt is optimal.
pub fn partial_removal_system(gamma0: f64) -> Result<FinancialSystem> {
    if !(gamma0 > 0.0 && gamma0 <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "gamma0 = {gamma0} must lie in (0, 1]"
        )));
    }
    Ok(removal_network(2.0 - gamma0, 2.0 / gamma0))
}

/// Two solutions: `v` solvent with payoff 99, or `v`, `u` at rate 0.
pub fn inject_system() -> FinancialSystem {
    let mut sys = FinancialSystem::new(1);
    sys.add_bank("u", 0.0)
        .add_bank("v", 0.0)
        .add_bank("w", 0.0)
        .add_bank("x1", 1.0)
        .add_bank("x2", 100.0)
        .add_bank("s", 0.0);
    debt(&mut sys, "debt_v_u", "v", "u", 1.0);
    debt(&mut sys, "debt_u_s", "u", "s", 1.0);
    cds(&mut sys, "cds_x1_w", "x1", "w", "u", 1.0);
    debt(&mut sys, "debt_w_s", "w", "s", 1.0);
    cds(&mut sys, "cds_x2_v", "x2", "v", "w", 100.0);
    sys
}

/// Every contract on the lower of two levels; raising `debt_v_u` makes `u`
/// solvent, which zeroes `w` and triggers `v`'s CDS of weight `delta`.
pub fn reprioritize_system(delta: f64) -> Result<FinancialSystem> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParams(format!("delta = {delta} must be positive")));
    }
    let mut sys = FinancialSystem::new(2);
    sys.add_bank("u", 0.0)
        .add_bank("v", 2.0)
        .add_bank("w", 0.0)
        .add_bank("x1", 2.0)
        .add_bank("x2", delta)
        .add_bank("s", 0.0);
    debt_at(&mut sys, "debt_v_u", "v", "u", 2.0, 2);
    debt_at(&mut sys, "debt_v_s", "v", "s", 4.0, 2);
    debt_at(&mut sys, "debt_u_v", "u", "v", 2.0, 2);
    cds_at(&mut sys, "cds_x1_w", "x1", "w", "u", 2.0, 2);
    debt_at(&mut sys, "debt_w_s", "w", "s", 1.0, 2);
    cds_at(&mut sys, "cds_x2_v", "x2", "v", "w", delta, 2);
    Ok(sys)
}

pub fn prisoners_system() -> FinancialSystem {
    let mut sys = FinancialSystem::new(1);
    sys.add_bank("u", 5.0)
        .add_bank("v1", 0.0)
        .add_bank("v2", 0.0)
        .add_bank("w", 0.0)
        .add_bank("x1", 1.0)
        .add_bank("x2", 6.0)
        .add_bank("s", 0.0);
    debt(&mut sys, "debt_u_v1", "u", "v1", 5.0);
    debt(&mut sys, "debt_u_v2", "u", "v2", 5.0);
    debt(&mut sys, "debt_u_s", "u", "s", 5.0);
    cds(&mut sys, "cds_x1_w", "x1", "w", "u", 1.0);
    debt(&mut sys, "debt_w_s", "w", "s", 1.0);
    cds(&mut sys, "cds_x2_v1", "x2", "v1", "w", 3.0);
    cds(&mut sys, "cds_x2_v2", "x2", "v2", "w", 3.0);
    sys
}

pub fn stag_hunt_system() -> FinancialSystem {
    let mut sys = FinancialSystem::new(1);
    sys.add_bank("u1", 2.0)
        .add_bank("u2", 2.0)
        .add_bank("v1", 0.0)
        .add_bank("v2", 0.0)
        .add_bank("w", 0.0)
        .add_bank("x1", 4.0)
        .add_bank("x2", 6.0)
        .add_bank("s", 0.0);
    for i in ["1", "2"] {
        let (u, v) = (format!("u{i}"), format!("v{i}"));
        debt(&mut sys, &format!("debt_u{i}_v{i}"), &u, &v, 2.0);
        debt(&mut sys, &format!("debt_u{i}_s"), &u, "s", 2.0);
        cds(&mut sys, &format!("cds_x1_w_u{i}"), "x1", "w", &u, 2.0);
        cds(&mut sys, &format!("cds_x2_v{i}"), "x2", &v, "w", 3.0);
    }
    debt(&mut sys, "debt_w_s", "w", "s", 1.0);
    sys
}

/// `k` banks each holding a CDS of weight 3 on `w`; `w` is solvent exactly
/// while `u` defaults, and `u` has nothing until someone donates.
pub fn volunteer_system(k: usize) -> FinancialSystem {
    let mut sys = FinancialSystem::new(1);
    sys.add_bank("u", 0.0)
        .add_bank("w", 0.0)
        .add_bank("x1", 1.0)
        .add_bank("x2", 3.0 * k as f64)
        .add_bank("s", 0.0);
    for i in 1..=k {
        sys.add_bank(format!("v{i}"), 0.0);
    }
    debt(&mut sys, "debt_u_s", "u", "s", 1.0);
    cds(&mut sys, "cds_x1_w", "x1", "w", "u", 1.0);
    debt(&mut sys, "debt_w_s", "w", "s", 1.0);
    for i in 1..=k {
        cds(&mut sys, &format!("cds_x2_v{i}"), "x2", &format!("v{i}"), "w", 3.0);
    }
    sys
}

/// `u` and `v` insure each other with weight-1 CDSs and each owe 1;
/// `u_prime` and `v_prime` hold CDSs of weight `delta` on `u` and `v`.
pub fn auction_system(e_u: f64, e_v: f64, delta: f64) -> FinancialSystem {
    let mut sys = FinancialSystem::new(1);
    sys.add_bank("u", e_u)
        .add_bank("v", e_v)
        .add_bank("u_prime", 0.0)
        .add_bank("v_prime", 0.0)
        .add_bank("x1", 1.0)
        .add_bank("x2", 1.0)
        .add_bank("x3", delta)
        .add_bank("x4", delta)
        .add_bank("s", 0.0);
    debt(&mut sys, "debt_u_s", "u", "s", 1.0);
    debt(&mut sys, "debt_v_s", "v", "s", 1.0);
    cds(&mut sys, "cds_x1_u", "x1", "u", "v", 1.0);
    cds(&mut sys, "cds_x2_v", "x2", "v", "u", 1.0);
    cds(&mut sys, "cds_x3_u_prime", "x3", "u_prime", "u", delta);
    cds(&mut sys, "cds_x4_v_prime", "x4", "v_prime", "v", delta);
    sys
}

fn strategy(label: &str, actions: Vec<Action>) -> Strategy {
    Strategy {
        label: label.to_owned(),
        actions,
    }
}

fn noop(label: &str) -> Strategy {
    strategy(label, Vec::new())
}

fn validate_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("epsilon = {eps} must lie in (0, 1/2)")))
    }
}

/// Builds a named scenario. Missing parameters take the `DEFAULT_*` values.
pub fn build_scenario(name: &str, params: &ScenarioParams) -> Result<GameScenario> {
    let mut used = ScenarioParams::default();
    let (system, players, strategies) = match name {
        "triangle" => (triangle(false), vec![], vec![]),
        "triangle_senior" => (triangle(true), vec![], vec![]),
        "remove_debt" => (
            remove_debt_system(),
            vec!["v"],
            vec![vec![
                noop("keep"),
                strategy("remove", vec![Action::remove_debt("debt_u_v")]),
                strategy("donate", vec![Action::donate("v", "u", 1.0)]),
            ]],
        ),
        "partial_removal" => {
            let g = params.gamma0.unwrap_or(DEFAULT_GAMMA0);
            used.gamma0 = Some(g);
            (
                partial_removal_system(g)?,
                vec!["v"],
                vec![vec![
                    noop("keep"),
                    strategy("reduce", vec![Action::reduce_debt("debt_u_v", g)]),
                    strategy("remove", vec![Action::remove_debt("debt_u_v")]),
                ]],
            )
        }
        "inject" => (
            inject_system(),
            vec!["v"],
            vec![vec![
                noop("keep"),
                strategy("inject", vec![Action::inject("v", 1.0)]),
            ]],
        ),
        "reprioritize" => {
            let d = params.delta.unwrap_or(DEFAULT_DELTA);
            used.delta = Some(d);
            (
                reprioritize_system(d)?,
                vec!["v"],
                vec![vec![
                    noop("keep"),
                    strategy(
                        "raise",
                        vec![Action::reprioritize("v", [("debt_v_u", 1)])],
                    ),
                ]],
            )
        }
        "prisoners" => (
            prisoners_system(),
            vec!["v1", "v2"],
            ["1", "2"]
                .iter()
                .map(|i| {
                    vec![
                        strategy("cooperate", vec![Action::remove_debt(format!("debt_u_v{i}"))]),
                        noop("defect"),
                    ]
                })
                .collect(),
        ),
        "stag_hunt" => (
            stag_hunt_system(),
            vec!["v1", "v2"],
            ["1", "2"]
                .iter()
                .map(|i| {
                    vec![
                        strategy(
                            "cooperate",
                            vec![Action::remove_debt(format!("debt_u{i}_v{i}"))],
                        ),
                        noop("defect"),
                    ]
                })
                .collect(),
        ),
        "chicken" | "volunteer" => {
            let k = if name == "chicken" {
                2
            } else {
                let k = params.k.unwrap_or(DEFAULT_VOLUNTEERS);
                if k < 2 {
                    return Err(Error::InvalidParams(format!("k = {k} must be at least 2")));
                }
                used.k = Some(k);
                k
            };
            let players: Vec<String> = (1..=k).map(|i| format!("v{i}")).collect();
            let strategies = players
                .iter()
                .map(|p| {
                    vec![
                        strategy("cooperate", vec![Action::donate(p.as_str(), "u", 1.0)]),
                        noop("defect"),
                    ]
                })
                .collect();
            return GameScenario::new(name, volunteer_system(k), players, strategies, used);
        }
        "dollar_auction" => {
            let eps = params.epsilon.unwrap_or(DEFAULT_EPSILON);
            validate_epsilon(eps)?;
            used.epsilon = Some(eps);
            used.delta = Some(6.0 * eps);
            (
                auction_system(0.0, 0.0, 6.0 * eps),
                vec!["u_prime", "v_prime"],
                vec![
                    vec![
                        noop("pass"),
                        strategy("donate", vec![Action::donate("u_prime", "v", eps)]),
                    ],
                    vec![
                        noop("pass"),
                        strategy("donate", vec![Action::donate("v_prime", "u", eps)]),
                    ],
                ],
            )
        }
        other => return Err(Error::UnknownScenario(other.to_owned())),
    };
    GameScenario::new(
        name,
        system,
        players.into_iter().map(String::from).collect(),
        strategies,
        used,
    )
}

pub(crate) fn check_epsilon(eps: f64) -> Result<()> {
    validate_epsilon(eps)
}
