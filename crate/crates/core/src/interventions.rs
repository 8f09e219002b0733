//! Unilateral actions of a bank and their effect on its payoff across all
//! solutions.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BankId, ContractId, FinancialSystem, RecoveryVector, ValidationReport};
use crate::solver::{find_solutions, verify_solution, SolutionSet, SolverConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    /// Scale an incoming debt by `1 - fraction`; `fraction = 1` deletes it.
    RemoveIncomingDebt { contract: ContractId, fraction: f64 },
    /// Raise `to`'s external assets by `amount`, paid by `from` outside the network.
    Donate {
        from: BankId,
        to: BankId,
        amount: f64,
    },
    InjectOwnAssets { bank: BankId, amount: f64 },
    /// New priority level for some of `bank`'s outgoing contracts.
    Reprioritize {
        bank: BankId,
        priorities: BTreeMap<ContractId, u32>,
    },
}

impl Action {
    pub fn remove_debt(contract: impl Into<ContractId>) -> Self {
        Action::RemoveIncomingDebt {
            contract: contract.into(),
            fraction: 1.0,
        }
    }

    pub fn reduce_debt(contract: impl Into<ContractId>, fraction: f64) -> Self {
        Action::RemoveIncomingDebt {
            contract: contract.into(),
            fraction,
        }
    }

    pub fn donate(from: impl Into<BankId>, to: impl Into<BankId>, amount: f64) -> Self {
        Action::Donate {
            from: from.into(),
            to: to.into(),
            amount,
        }
    }

    pub fn inject(bank: impl Into<BankId>, amount: f64) -> Self {
        Action::InjectOwnAssets {
            bank: bank.into(),
            amount,
        }
    }

    pub fn reprioritize<I, C>(bank: impl Into<BankId>, priorities: I) -> Self
    where
        I: IntoIterator<Item = (C, u32)>,
        C: Into<ContractId>,
    {
        Action::Reprioritize {
            bank: bank.into(),
            priorities: priorities.into_iter().map(|(c, p)| (c.into(), p)).collect(),
        }
    }

    /// Out-of-network money `bank` spends on this action.
    pub fn cost_to(&self, bank: &str) -> f64 {
        match self {
            Action::Donate { from, amount, .. } if from.as_str() == bank => *amount,
            Action::InjectOwnAssets { bank: b, amount } if b.as_str() == bank => *amount,
            _ => 0.0,
        }
    }

    /// The bank entitled to take this action.
    pub fn actor(&self, sys: &FinancialSystem) -> Result<BankId> {
        match self {
            Action::RemoveIncomingDebt { contract, .. } => sys
                .contract(contract.as_str())
                .map(|c| c.creditor.clone())
                .ok_or_else(|| Error::ContractNotFound(contract.clone())),
            Action::Donate { from, .. } => Ok(from.clone()),
            Action::InjectOwnAssets { bank, .. } | Action::Reprioritize { bank, .. } => {
                Ok(bank.clone())
            }
        }
    }

    /// Contracts this action rewrites.
    pub fn touched_contracts(&self) -> Vec<ContractId> {
        match self {
            Action::RemoveIncomingDebt { contract, .. } => vec![contract.clone()],
            Action::Reprioritize { priorities, .. } => priorities.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }

    /// Errors unless `acting` is the bank entitled to this action.
    pub fn check_actor(&self, sys: &FinancialSystem, acting: &str) -> Result<()> {
        let actor = self.actor(sys)?;
        if actor.as_str() == acting {
            return Ok(());
        }
        Err(match self {
            Action::RemoveIncomingDebt { contract, .. } => Error::WrongCreditor {
                contract: contract.clone(),
                creditor: actor,
                acting: acting.into(),
            },
            _ => Error::InvalidAction(format!("action belongs to `{actor}`, not `{acting}`")),
        })
    }
}

fn positive_amount(amount: f64) -> Result<()> {
    if amount.is_finite() && amount > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidAction(format!("amount {amount} must be positive")))
    }
}

fn known_bank(sys: &FinancialSystem, id: &BankId) -> Result<()> {
    if sys.has_bank(id.as_str()) {
        Ok(())
    } else {
        Err(Error::UnknownBank(id.clone()))
    }
}

/// Returns the modified system; `sys` is untouched. A deletion that leaves a
/// CDS reference entity without debt is performed and shows up in the
/// result's validation report.
pub fn apply_action(sys: &FinancialSystem, action: &Action) -> Result<FinancialSystem> {
    let mut out = sys.clone();
    match action {
        Action::RemoveIncomingDebt { contract, fraction } => {
            if !(0.0..=1.0).contains(fraction) {
                return Err(Error::InvalidAction(format!(
                    "fraction {fraction} outside [0, 1]"
                )));
            }
            let c = out.contract_mut(contract.as_str())?;
            if !c.kind.is_debt() {
                return Err(Error::NotADebt(contract.clone()));
            }
            if *fraction >= 1.0 {
                out.remove_contract(contract.as_str())?;
            } else {
                c.notional *= 1.0 - fraction;
            }
        }
        Action::Donate { from, to, amount } => {
            positive_amount(*amount)?;
            known_bank(sys, from)?;
            if from == to {
                return Err(Error::InvalidAction(
                    "donor and recipient coincide; use inject_own_assets".into(),
                ));
            }
            let e = out.external_assets(to.as_str())?;
            out.set_external_assets(to.as_str(), e + amount)?;
        }
        Action::InjectOwnAssets { bank, amount } => {
            positive_amount(*amount)?;
            let e = out.external_assets(bank.as_str())?;
            out.set_external_assets(bank.as_str(), e + amount)?;
        }
        Action::Reprioritize { bank, priorities } => {
            known_bank(sys, bank)?;
            for (id, &level) in priorities {
                let c = sys
                    .contract(id.as_str())
                    .ok_or_else(|| Error::ContractNotFound(id.clone()))?;
                if &c.debtor != bank {
                    return Err(Error::WrongDebtor {
                        contract: id.clone(),
                        debtor: c.debtor.clone(),
                        acting: bank.clone(),
                    });
                }
                out.set_priority(id.as_str(), level)?;
            }
        }
    }
    Ok(out)
}

/// Before/after comparison of one action from the acting bank's viewpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectReport {
    pub acting: BankId,
    pub action: Action,
    pub cost: f64,
    pub before: SolutionSet,
    pub after: SolutionSet,
    pub payoffs_before: Vec<f64>,
    pub payoffs_after: Vec<f64>,
    pub rates_before: Vec<f64>,
    pub rates_after: Vec<f64>,
    /// `min(q') - cost - min(q)`.
    pub worst_case_gain: f64,
    /// `max(q') - cost - max(q)`.
    pub best_case_gain: f64,
    pub validation_after: ValidationReport,
}

pub fn assess(
    sys: &FinancialSystem,
    action: &Action,
    acting: &str,
    cfg: &SolverConfig,
) -> Result<EffectReport> {
    action.check_actor(sys, acting)?;
    let modified = apply_action(sys, action)?;
    let before = find_solutions(sys, cfg)?;
    let after = find_solutions(&modified, cfg)?;
    Ok(report(acting, action, before, after, modified.validate()))
}

pub(crate) fn report(
    acting: &str,
    action: &Action,
    before: SolutionSet,
    after: SolutionSet,
    validation_after: ValidationReport,
) -> EffectReport {
    let cost = action.cost_to(acting);
    let gain = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => a - cost - b,
        _ => f64::NAN,
    };
    EffectReport {
        acting: acting.into(),
        action: action.clone(),
        cost,
        payoffs_before: before.payoffs_of(acting),
        payoffs_after: after.payoffs_of(acting),
        rates_before: before.rates_of(acting),
        rates_after: after.rates_of(acting),
        worst_case_gain: gain(after.min_payoff(acting), before.min_payoff(acting)),
        best_case_gain: gain(after.max_payoff(acting), before.max_payoff(acting)),
        before,
        after,
        validation_after,
    }
}

/// How a point with several solutions is scored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Minimum payoff over all solutions.
    #[default]
    WorstCase,
    /// Mean payoff, each solution equally likely.
    Expected,
}

impl Objective {
    pub fn score(self, set: &SolutionSet, bank: &str) -> Option<f64> {
        match self {
            Objective::WorstCase => set.min_payoff(bank),
            Objective::Expected => set.mean_payoff(bank),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub payoff: f64,
    pub solutions: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemovalScan {
    pub best_fraction: f64,
    pub best_payoff: f64,
    pub curve: Vec<CurvePoint>,
}

/// Scores removing `i / grid_steps` of `contract` for `i = 0..=grid_steps`
/// and returns the best fraction (smallest one on ties) with the sampled curve.
pub fn optimize_partial_removal(
    sys: &FinancialSystem,
    contract: &str,
    acting: &str,
    grid_steps: usize,
    objective: Objective,
    cfg: &SolverConfig,
) -> Result<RemovalScan> {
    if grid_steps == 0 {
        return Err(Error::InvalidParams("grid_steps must be positive".into()));
    }
    let probe = Action::reduce_debt(contract, 0.0);
    probe.check_actor(sys, acting)?;
    apply_action(sys, &probe)?;

    let curve: Vec<CurvePoint> = (0..=grid_steps)
        .into_par_iter()
        .map(|i| {
            let fraction = i as f64 / grid_steps as f64;
            let modified = apply_action(sys, &Action::reduce_debt(contract, fraction))?;
            let set = find_solutions(&modified, cfg)?;
            let payoff = objective.score(&set, acting).unwrap_or(f64::NAN);
            Ok(CurvePoint {
                fraction,
                payoff,
                solutions: set.len(),
            })
        })
        .collect::<Result<_>>()?;

    let mut best = &curve[0];
    for p in &curve[1..] {
        if p.payoff > best.payoff + 1e-12 || best.payoff.is_nan() {
            best = p;
        }
    }
    Ok(RemovalScan {
        best_fraction: best.fraction,
        best_payoff: best.payoff,
        curve,
    })
}

/// Whether a solution of the modified system is also a solution of the
/// original one.
pub fn project_solution(
    original: &FinancialSystem,
    _modified: &FinancialSystem,
    r: &RecoveryVector,
    _acting: &str,
    tolerance: f64,
) -> Result<bool> {
    Ok(verify_solution(original, r, tolerance)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> FinancialSystem {
        let mut sys = FinancialSystem::new(2);
        sys.add_bank("u", 2.0).add_bank("v", 1.0).add_bank("w", 0.0);
        sys.add_debt_at("u", "v", 2.0, 2);
        sys.add_debt_at("u", "w", 2.0, 2);
        sys.add_cds_at("w", "v", "u", 2.0, 2);
        sys
    }

    #[test]
    fn removal_scales_one_notional() {
        let sys = triangle();
        let out = apply_action(&sys, &Action::reduce_debt("c0", 0.25)).unwrap();
        assert_eq!(out.contract("c0").unwrap().notional, 1.5);
        assert_eq!(out.contracts()[1..], sys.contracts()[1..]);
        assert_eq!(out.banks(), sys.banks());
        assert_eq!(sys.contract("c0").unwrap().notional, 2.0);
    }

    #[test]
    fn second_full_removal_errors() {
        let sys = triangle();
        let a = Action::remove_debt("c0");
        let once = apply_action(&sys, &a).unwrap();
        assert!(once.contract("c0").is_none());
        assert!(matches!(apply_action(&once, &a), Err(Error::ContractNotFound(_))));
    }

    #[test]
    fn removal_rejects_cds_and_bad_fraction() {
        let sys = triangle();
        assert!(matches!(
            apply_action(&sys, &Action::remove_debt("c2")),
            Err(Error::NotADebt(_))
        ));
        assert!(matches!(
            apply_action(&sys, &Action::reduce_debt("c0", 1.5)),
            Err(Error::InvalidAction(_))
        ));
    }

    #[test]
    fn wrong_creditor_is_rejected() {
        let sys = triangle();
        let err = Action::remove_debt("c0").check_actor(&sys, "w").unwrap_err();
        assert!(matches!(err, Error::WrongCreditor { .. }));
        assert!(Action::remove_debt("c0").check_actor(&sys, "v").is_ok());
    }

    #[test]
    fn removing_last_reference_debt_is_reported() {
        let sys = triangle();
        let once = apply_action(&sys, &Action::remove_debt("c0")).unwrap();
        let twice = apply_action(&once, &Action::remove_debt("c1")).unwrap();
        assert!(once.validate().is_ok());
        assert!(!twice.validate().is_ok());
    }

    #[test]
    fn donation_and_injection() {
        let sys = triangle();
        let d = apply_action(&sys, &Action::donate("v", "u", 1.0)).unwrap();
        assert_eq!(d.external_assets("u").unwrap(), 3.0);
        assert_eq!(d.external_assets("v").unwrap(), 1.0);
        assert_eq!(Action::donate("v", "u", 1.0).cost_to("v"), 1.0);
        assert_eq!(Action::donate("v", "u", 1.0).cost_to("u"), 0.0);
        let i = apply_action(&sys, &Action::inject("w", 0.5)).unwrap();
        assert_eq!(i.external_assets("w").unwrap(), 0.5);
        assert!(apply_action(&sys, &Action::inject("w", 0.0)).is_err());
        assert!(apply_action(&sys, &Action::donate("u", "u", 1.0)).is_err());
    }

    #[test]
    fn reprioritize_only_own_contracts() {
        let sys = triangle();
        let out = apply_action(&sys, &Action::reprioritize("u", [("c1", 1)])).unwrap();
        assert_eq!(out.contract("c1").unwrap().priority, 1);
        assert_eq!(out.contract("c0").unwrap().priority, 2);
        assert!(matches!(
            apply_action(&sys, &Action::reprioritize("u", [("c2", 1)])),
            Err(Error::WrongDebtor { .. })
        ));
        assert!(matches!(
            apply_action(&sys, &Action::reprioritize("u", [("c1", 3)])),
            Err(Error::PriorityOutOfRange { .. })
        ));
    }

    #[test]
    fn action_json_shape() {
        let a = Action::donate("v", "u", 1.0);
        let json = serde_json::to_value(&a).unwrap();
        assert_eq!(json["kind"], "donate");
        let back: Action = serde_json::from_value(json).unwrap();
        assert_eq!(back, a);
    }
}
