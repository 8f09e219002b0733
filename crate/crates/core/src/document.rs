//! JSON interchange format for systems and solver output.
//!
//! ```json
//! {
//!   "priority_levels": 1,
//!   "banks": [{ "id": "u", "external_assets": 2 }],
//!   "contracts": [
//!     { "id": "d1", "debtor": "u", "creditor": "v", "notional": "2", "kind": "debt" },
//!     { "debtor": "w", "creditor": "v", "notional": 2, "kind": "cds", "reference": "u", "priority": 1 }
//!   ]
//! }
//! ```
//!
//! Amounts may be JSON numbers, decimal strings or `"p/q"` fractions.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::clearing::ClearingState;
use crate::error::{Error, Result};
use crate::model::{Bank, BankId, Contract, ContractId, ContractKind, FinancialSystem};
use crate::solver::{Multiplicity, SolutionSet};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Amount(pub f64);

fn parse_amount(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{s}` is not a number"))
    };
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let q = parse(q)?;
            if q == 0.0 {
                return Err(format!("`{s}` divides by zero"));
            }
            parse(p)? / q
        }
        None => parse(s)?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Amount;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, decimal string or fraction")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Amount, E> {
                Ok(Amount(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Amount, E> {
                Ok(Amount(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Amount, E> {
                Ok(Amount(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Amount, E> {
                parse_amount(v).map(Amount).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindTag {
    Debt,
    Cds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankEntry {
    pub id: BankId,
    pub external_assets: Amount,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<ContractId>,
    pub debtor: BankId,
    pub creditor: BankId,
    pub notional: Amount,
    pub kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<BankId>,
    #[serde(default = "one")]
    pub priority: u32,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    #[serde(default = "one")]
    pub priority_levels: u32,
    pub banks: Vec<BankEntry>,
    #[serde(default)]
    pub contracts: Vec<ContractEntry>,
}

impl SystemDocument {
    /// Parses JSON; errors name the offending field path and position.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::Document {
                context: if path == "." { "document".into() } else { path },
                message: inner.to_string(),
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// Builds the system without validating it.
    pub fn to_system(&self) -> Result<FinancialSystem> {
        let mut sys = FinancialSystem::new(self.priority_levels);
        for b in &self.banks {
            sys.add_bank(b.id.clone(), b.external_assets.0);
        }
        for (i, c) in self.contracts.iter().enumerate() {
            let kind = match (c.kind, &c.reference) {
                (KindTag::Debt, None) => ContractKind::Debt,
                (KindTag::Cds, Some(r)) => ContractKind::Cds { reference: r.clone() },
                (KindTag::Debt, Some(_)) => {
                    return Err(Error::document(
                        format!("contracts[{i}].reference"),
                        "a debt has no reference entity",
                    ))
                }
                (KindTag::Cds, None) => {
                    return Err(Error::document(
                        format!("contracts[{i}].reference"),
                        "a cds needs a reference entity",
                    ))
                }
            };
            sys.add_contract(Contract {
                id: c.id.clone().unwrap_or_else(|| ContractId::new("")),
                debtor: c.debtor.clone(),
                creditor: c.creditor.clone(),
                notional: c.notional.0,
                kind,
                priority: c.priority,
            });
        }
        Ok(sys)
    }

    pub fn from_system(sys: &FinancialSystem) -> Self {
        Self {
            priority_levels: sys.priority_levels(),
            banks: sys
                .banks()
                .iter()
                .map(|Bank { id, external_assets }| BankEntry {
                    id: id.clone(),
                    external_assets: Amount(*external_assets),
                })
                .collect(),
            contracts: sys
                .contracts()
                .iter()
                .map(|c| ContractEntry {
                    id: Some(c.id.clone()),
                    debtor: c.debtor.clone(),
                    creditor: c.creditor.clone(),
                    notional: Amount(c.notional),
                    kind: if c.kind.is_debt() { KindTag::Debt } else { KindTag::Cds },
                    reference: c.kind.reference().cloned(),
                    priority: c.priority,
                })
                .collect(),
        }
    }
}

impl From<FinancialSystem> for SystemDocument {
    fn from(sys: FinancialSystem) -> Self {
        Self::from_system(&sys)
    }
}

impl TryFrom<SystemDocument> for FinancialSystem {
    type Error = Error;

    fn try_from(doc: SystemDocument) -> Result<Self> {
        doc.to_system()
    }
}

/// Parses a document into a system; validation is left to the caller.
pub fn parse_system(text: &str) -> Result<FinancialSystem> {
    SystemDocument::parse(text)?.to_system()
}

/// Machine-readable solver output: the system followed by its solutions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub system: SystemDocument,
    pub multiplicity: Multiplicity,
    /// Number of solutions found, including any left out of `solutions`.
    pub found: usize,
    pub solutions: Vec<ClearingState>,
}

impl SolveReport {
    /// With `all = false` only the first solution in canonical order is listed.
    pub fn new(sys: &FinancialSystem, set: SolutionSet, all: bool) -> Self {
        let found = set.solutions.len();
        let mut solutions = set.solutions;
        if !all {
            solutions.truncate(1);
        }
        Self {
            system: SystemDocument::from_system(sys),
            multiplicity: set.multiplicity,
            found,
            solutions,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "priority_levels": 2,
        "banks": [{"id": "u", "external_assets": "2"}, {"id": "v", "external_assets": 1},
                  {"id": "w", "external_assets": "0.0"}],
        "contracts": [
            {"id": "a", "debtor": "u", "creditor": "v", "notional": "4/2", "kind": "debt", "priority": 2},
            {"debtor": "u", "creditor": "w", "notional": 2, "kind": "debt"},
            {"debtor": "w", "creditor": "v", "notional": 2, "kind": "cds", "reference": "u", "priority": 2}
        ]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let sys = parse_system(DOC).unwrap();
        assert!(sys.validate().is_ok());
        assert_eq!(sys.contract("a").unwrap().notional, 2.0);
        assert_eq!(sys.contracts()[1].priority, 1);
        let again = parse_system(&SystemDocument::from_system(&sys).to_json()).unwrap();
        assert_eq!(again, sys);
    }

    #[test]
    fn errors_carry_field_path() {
        let bad = DOC.replace("\"0.0\"", "\"zero\"");
        match parse_system(&bad) {
            Err(Error::Document { context, message }) => {
                assert_eq!(context, "banks[2].external_assets");
                assert!(message.contains("zero"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let bad = DOC.replace("\"kind\": \"cds\", \"reference\": \"u\",", "\"kind\": \"cds\",");
        assert!(matches!(parse_system(&bad), Err(Error::Document { .. })));
        assert!(matches!(
            parse_system(r#"{"banks": [], "extra": 1}"#),
            Err(Error::Document { .. })
        ));
    }
}
