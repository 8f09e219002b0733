pub mod clearing;
pub mod document;
pub mod error;
pub mod games;
pub mod interventions;
pub mod model;
pub mod solver;

pub use clearing::{
    clearing_state, liabilities, payments, residual, update, ClearingState, ContractFlow,
    LiabilityLedger, PaymentMap,
};
pub use document::{parse_system, SolveReport, SystemDocument};
pub use error::{Error, Result};
pub use games::{
    auction_run, auction_solutions, auction_step, build_scenario, find_dominant, find_pure_nash,
    game_report, payoff_matrix, AuctionState, GameReport, GameScenario, PayoffMatrix, ScenarioParams, Strategy,
};
pub use interventions::{
    apply_action, assess, optimize_partial_removal, project_solution, Action, CurvePoint,
    EffectReport, Objective, RemovalScan,
};
pub use model::{
    Bank, BankId, Contract, ContractId, ContractKind, FinancialSystem, RecoveryVector,
    ValidationReport, Violation,
};
pub use solver::{
    find_solutions, iterate, solve_with_default_set, verify_solution, DefaultSet,
    IterationResult, Multiplicity, SolutionSet, SolverConfig,
};
