//! Static description of a financial network: banks with external assets and
//! weighted, prioritized debt and CDS contracts between them.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::document::SystemDocument;
use crate::error::{Error, Result};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl From<&$name> for $name {
            fn from(s: &$name) -> Self {
                s.clone()
            }
        }
    };
}

string_id!(
    /// Human-readable bank identifier; banks are ordered by it everywhere.
    BankId
);
string_id!(
    /// Stable contract identifier, unaffected by removal of other contracts.
    ContractId
);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bank {
    pub id: BankId,
    pub external_assets: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContractKind {
    Debt,
    /// Pays `notional * (1 - r_reference)`.
    Cds { reference: BankId },
}

impl ContractKind {
    pub fn reference(&self) -> Option<&BankId> {
        match self {
            ContractKind::Debt => None,
            ContractKind::Cds { reference } => Some(reference),
        }
    }

    pub fn is_debt(&self) -> bool {
        matches!(self, ContractKind::Debt)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contract {
    pub id: ContractId,
    pub debtor: BankId,
    pub creditor: BankId,
    pub notional: f64,
    pub kind: ContractKind,
    /// 1 is paid first.
    pub priority: u32,
}

/// A sanity or structural problem found by [`FinancialSystem::validate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    NoPriorityLevels,
    DuplicateBank { bank: BankId },
    InvalidExternalAssets { bank: BankId, value: f64 },
    DuplicateContract { contract: ContractId },
    UnknownBank { contract: ContractId, bank: BankId },
    SelfContract { contract: ContractId },
    SelfReference { contract: ContractId },
    InvalidNotional { contract: ContractId, value: f64 },
    PriorityOutOfRange { contract: ContractId, priority: u32, levels: u32 },
    ReferenceWithoutDebt { contract: ContractId, reference: BankId },
}

impl Violation {
    /// Structural problems make the network impossible to evaluate; sanity
    /// problems (self loops, references without debt) do not.
    pub fn is_structural(&self) -> bool {
        !matches!(
            self,
            Violation::SelfContract { .. }
                | Violation::SelfReference { .. }
                | Violation::ReferenceWithoutDebt { .. }
        )
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPriorityLevels => write!(f, "priority_levels must be at least 1"),
            Violation::DuplicateBank { bank } => write!(f, "duplicate bank `{bank}`"),
            Violation::InvalidExternalAssets { bank, value } => {
                write!(f, "bank `{bank}`: external assets {value} must be finite and nonnegative")
            }
            Violation::DuplicateContract { contract } => {
                write!(f, "duplicate contract id `{contract}`")
            }
            Violation::UnknownBank { contract, bank } => {
                write!(f, "contract `{contract}`: unknown bank `{bank}`")
            }
            Violation::SelfContract { contract } => {
                write!(f, "contract `{contract}`: self-contract")
            }
            Violation::SelfReference { contract } => {
                write!(f, "contract `{contract}`: self-reference")
            }
            Violation::InvalidNotional { contract, value } => {
                write!(f, "contract `{contract}`: notional {value} must be finite and positive")
            }
            Violation::PriorityOutOfRange {
                contract,
                priority,
                levels,
            } => write!(
                f,
                "contract `{contract}`: priority {priority} outside 1..={levels}"
            ),
            Violation::ReferenceWithoutDebt {
                contract,
                reference,
            } => write!(
                f,
                "contract `{contract}`: reference entity has no debt (`{reference}`)"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn structural(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.is_structural())
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidSystem(self.violations))
        }
    }
}

/// Banks, contracts and the number of priority classes.
///
/// Bank insertion order is kept for documents; every numeric view (recovery
/// vectors, solution ordering) is keyed by sorted [`BankId`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "SystemDocument", try_from = "SystemDocument")]
pub struct FinancialSystem {
    banks: Vec<Bank>,
    contracts: Vec<Contract>,
    priority_levels: u32,
}

impl Default for FinancialSystem {
    fn default() -> Self {
        Self::new(1)
    }
}

impl FinancialSystem {
    pub fn new(priority_levels: u32) -> Self {
        Self {
            banks: Vec::new(),
            contracts: Vec::new(),
            priority_levels,
        }
    }

    pub fn priority_levels(&self) -> u32 {
        self.priority_levels
    }

    pub fn set_priority_levels(&mut self, levels: u32) {
        self.priority_levels = levels;
    }

    pub fn banks(&self) -> &[Bank] {
        &self.banks
    }

    pub fn contracts(&self) -> &[Contract] {
        &self.contracts
    }

    pub fn bank(&self, id: &str) -> Option<&Bank> {
        self.banks.iter().find(|b| b.id.as_str() == id)
    }

    pub fn contract(&self, id: &str) -> Option<&Contract> {
        self.contracts.iter().find(|c| c.id.as_str() == id)
    }

    pub fn has_bank(&self, id: &str) -> bool {
        self.bank(id).is_some()
    }

    /// Bank ids in canonical (sorted) order.
    pub fn sorted_bank_ids(&self) -> Vec<BankId> {
        let set: BTreeSet<&BankId> = self.banks.iter().map(|b| &b.id).collect();
        set.into_iter().cloned().collect()
    }

    pub fn add_bank(&mut self, id: impl Into<BankId>, external_assets: f64) -> &mut Self {
        self.banks.push(Bank {
            id: id.into(),
            external_assets,
        });
        self
    }

    pub fn external_assets(&self, id: &str) -> Result<f64> {
        self.bank(id)
            .map(|b| b.external_assets)
            .ok_or_else(|| Error::UnknownBank(id.into()))
    }

    pub fn set_external_assets(&mut self, id: &str, value: f64) -> Result<()> {
        let bank = self
            .banks
            .iter_mut()
            .find(|b| b.id.as_str() == id)
            .ok_or_else(|| Error::UnknownBank(id.into()))?;
        bank.external_assets = value;
        Ok(())
    }

    fn fresh_contract_id(&self) -> ContractId {
        let taken: BTreeSet<&str> = self.contracts.iter().map(|c| c.id.as_str()).collect();
        (self.contracts.len()..)
            .map(|n| format!("c{n}"))
            .find(|id| !taken.contains(id.as_str()))
            .map(ContractId::from)
            .expect("unbounded range")
    }

    /// Appends a contract, assigning a fresh id when `contract.id` is empty.
    pub fn add_contract(&mut self, mut contract: Contract) -> ContractId {
        if contract.id.as_str().is_empty() {
            contract.id = self.fresh_contract_id();
        }
        let id = contract.id.clone();
        self.contracts.push(contract);
        id
    }

    pub fn add_debt(
        &mut self,
        debtor: impl Into<BankId>,
        creditor: impl Into<BankId>,
        notional: f64,
    ) -> ContractId {
        self.add_debt_at(debtor, creditor, notional, 1)
    }

    pub fn add_debt_at(
        &mut self,
        debtor: impl Into<BankId>,
        creditor: impl Into<BankId>,
        notional: f64,
        priority: u32,
    ) -> ContractId {
        self.add_contract(Contract {
            id: ContractId::new(""),
            debtor: debtor.into(),
            creditor: creditor.into(),
            notional,
            kind: ContractKind::Debt,
            priority,
        })
    }

    pub fn add_cds(
        &mut self,
        debtor: impl Into<BankId>,
        creditor: impl Into<BankId>,
        reference: impl Into<BankId>,
        notional: f64,
    ) -> ContractId {
        self.add_cds_at(debtor, creditor, reference, notional, 1)
    }

    pub fn add_cds_at(
        &mut self,
        debtor: impl Into<BankId>,
        creditor: impl Into<BankId>,
        reference: impl Into<BankId>,
        notional: f64,
        priority: u32,
    ) -> ContractId {
        self.add_contract(Contract {
            id: ContractId::new(""),
            debtor: debtor.into(),
            creditor: creditor.into(),
            notional,
            kind: ContractKind::Cds {
                reference: reference.into(),
            },
            priority,
        })
    }

    pub(crate) fn contract_mut(&mut self, id: &str) -> Result<&mut Contract> {
        self.contracts
            .iter_mut()
            .find(|c| c.id.as_str() == id)
            .ok_or_else(|| Error::ContractNotFound(id.into()))
    }

    pub fn set_priority(&mut self, id: &str, priority: u32) -> Result<()> {
        if priority == 0 || priority > self.priority_levels {
            return Err(Error::PriorityOutOfRange {
                priority,
                levels: self.priority_levels,
            });
        }
        self.contract_mut(id)?.priority = priority;
        Ok(())
    }

    pub fn remove_contract(&mut self, id: &str) -> Result<Contract> {
        let pos = self
            .contracts
            .iter()
            .position(|c| c.id.as_str() == id)
            .ok_or_else(|| Error::ContractNotFound(id.into()))?;
        Ok(self.contracts.remove(pos))
    }

    /// Outgoing contracts of `bank`, in document order.
    pub fn outgoing<'a>(&'a self, bank: &'a str) -> impl Iterator<Item = &'a Contract> + 'a {
        self.contracts
            .iter()
            .filter(move |c| c.debtor.as_str() == bank)
    }

    /// Reports every violated invariant; an empty report means the system is valid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.priority_levels == 0 {
            violations.push(Violation::NoPriorityLevels);
        }

        let mut seen = BTreeSet::new();
        for bank in &self.banks {
            if !seen.insert(bank.id.as_str()) {
                violations.push(Violation::DuplicateBank {
                    bank: bank.id.clone(),
                });
            }
            if !(bank.external_assets.is_finite() && bank.external_assets >= 0.0) {
                violations.push(Violation::InvalidExternalAssets {
                    bank: bank.id.clone(),
                    value: bank.external_assets,
                });
            }
        }

        // Reference entities need a positive-weight outgoing debt.
        let debtors: BTreeSet<&str> = self
            .contracts
            .iter()
            .filter(|c| c.kind.is_debt() && c.notional > 0.0)
            .map(|c| c.debtor.as_str())
            .collect();

        let mut ids = BTreeSet::new();
        for c in &self.contracts {
            if !ids.insert(c.id.as_str()) {
                violations.push(Violation::DuplicateContract {
                    contract: c.id.clone(),
                });
            }
            let mut parties = vec![&c.debtor, &c.creditor];
            parties.extend(c.kind.reference());
            for bank in parties {
                if !seen.contains(bank.as_str()) {
                    violations.push(Violation::UnknownBank {
                        contract: c.id.clone(),
                        bank: bank.clone(),
                    });
                }
            }
            if c.debtor == c.creditor {
                violations.push(Violation::SelfContract {
                    contract: c.id.clone(),
                });
            }
            if let Some(reference) = c.kind.reference() {
                if reference == &c.debtor || reference == &c.creditor {
                    violations.push(Violation::SelfReference {
                        contract: c.id.clone(),
                    });
                }
                if !debtors.contains(reference.as_str()) {
                    violations.push(Violation::ReferenceWithoutDebt {
                        contract: c.id.clone(),
                        reference: reference.clone(),
                    });
                }
            }
            if !(c.notional.is_finite() && c.notional > 0.0) {
                violations.push(Violation::InvalidNotional {
                    contract: c.id.clone(),
                    value: c.notional,
                });
            }
            if c.priority == 0 || c.priority > self.priority_levels {
                violations.push(Violation::PriorityOutOfRange {
                    contract: c.id.clone(),
                    priority: c.priority,
                    levels: self.priority_levels,
                });
            }
        }
        ValidationReport { violations }
    }
}

/// Recovery rate per bank, keyed by sorted [`BankId`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RecoveryVector(BTreeMap<BankId, f64>);

impl RecoveryVector {
    /// Every bank of `sys` at rate `rate`.
    pub fn uniform(sys: &FinancialSystem, rate: f64) -> Self {
        Self(sys.banks().iter().map(|b| (b.id.clone(), rate)).collect())
    }

    /// All rates 1 except the listed overrides.
    pub fn solvent_except<'a, I>(sys: &FinancialSystem, overrides: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut r = Self::uniform(sys, 1.0);
        for (id, rate) in overrides {
            r.0.insert(id.into(), rate);
        }
        r
    }

    pub fn from_pairs<I, K>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<BankId>,
    {
        Self(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.0.get(id).copied()
    }

    /// Rate of `id`; panics if absent.
    pub fn rate(&self, id: &str) -> f64 {
        self.0[id]
    }

    pub fn set(&mut self, id: impl Into<BankId>, rate: f64) {
        self.0.insert(id.into(), rate);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BankId, f64)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.0.values().copied().collect()
    }

    /// Max-norm distance; banks missing from either side count as distance 1.
    pub fn distance(&self, other: &RecoveryVector) -> f64 {
        let keys: BTreeSet<&BankId> = self.0.keys().chain(other.0.keys()).collect();
        keys.into_iter()
            .map(|k| match (self.0.get(k), other.0.get(k)) {
                (Some(a), Some(b)) => (a - b).abs(),
                _ => 1.0,
            })
            .fold(0.0, f64::max)
    }
}
