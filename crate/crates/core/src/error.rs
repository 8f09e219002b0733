use thiserror::Error;

use crate::model::{BankId, ContractId, Violation};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown bank `{0}`")]
    UnknownBank(BankId),

    #[error("recovery vector is missing bank `{0}`")]
    MissingRate(BankId),

    #[error("recovery rate {rate} of bank `{bank}` is outside [0, 1]")]
    RateOutOfRange { bank: BankId, rate: f64 },

    #[error("system is not valid: {}", join_violations(.0))]
    InvalidSystem(Vec<Violation>),

    #[error("contract `{0}` not found")]
    ContractNotFound(ContractId),

    #[error("contract `{contract}` is owed to `{creditor}`, not `{acting}`")]
    WrongCreditor {
        contract: ContractId,
        creditor: BankId,
        acting: BankId,
    },

    #[error("contract `{contract}` has debtor `{debtor}`, not `{acting}`")]
    WrongDebtor {
        contract: ContractId,
        debtor: BankId,
        acting: BankId,
    },

    #[error("contract `{0}` is not a debt contract")]
    NotADebt(ContractId),

    #[error("priority {priority} outside 1..={levels}")]
    PriorityOutOfRange { priority: u32, levels: u32 },

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "default-set enumeration over {candidates} candidate banks exceeds the cap of {cap}; \
         use multistart-only mode"
    )]
    TooLarge { candidates: usize, cap: usize },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("document error at {context}: {message}")]
    Document { context: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn document(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Document {
            context: context.into(),
            message: message.into(),
        }
    }

    /// True for errors a caller could fix by switching to multistart-only solving.
    pub fn is_capability(&self) -> bool {
        matches!(self, Error::TooLarge { .. })
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
