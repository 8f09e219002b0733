use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use finclear::games::AuctionMove;
use finclear::{
    assess, auction_run, build_scenario, find_solutions, game_report, optimize_partial_removal,
    parse_system, Action, AuctionState, EffectReport, Error, FinancialSystem, GameReport, Objective,
    RemovalScan, ScenarioParams, SolveReport, SolverConfig, SystemDocument,
};
use serde::Serialize;

/// `println!` that exits quietly once the reader has gone, e.g. `| head`.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

#[derive(Parser)]
#[command(name = "finclear", version, about = "Clearing of debt and CDS networks with payment priorities")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Residual below which a recovery vector counts as a solution.
    #[arg(long = "tol", env = "FINCLEAR_TOLERANCE", global = true)]
    tolerance: Option<f64>,
    /// Seed for the solver's random starts.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Skip default-set enumeration; needed for networks with many fragile banks.
    #[arg(long, global = true)]
    multistart_only: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check a system document.
    Validate { path: PathBuf },
    /// List the clearing solutions of a system.
    Solve {
        path: PathBuf,
        /// List every solution, not only the first in canonical order.
        #[arg(long)]
        all: bool,
    },
    /// Compare a bank's payoffs before and after one action.
    Assess {
        path: PathBuf,
        /// Acting bank; defaults to whoever may take the action.
        #[arg(long)]
        bank: Option<String>,
        #[command(flatten)]
        action: ActionArgs,
        /// Fraction of the debt removed by --remove.
        #[arg(long, default_value_t = 1.0)]
        fraction: f64,
        /// Amount given by --donate-to.
        #[arg(long)]
        amount: Option<f64>,
    },
    /// Payoff of removing a growing fraction of an incoming debt.
    ScanGamma {
        path: PathBuf,
        #[arg(long)]
        contract: String,
        #[arg(long)]
        bank: Option<String>,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::WorstCase)]
        objective: ObjectiveArg,
    },
    /// Payoff matrix and equilibria of a bundled scenario.
    Game {
        name: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        matrix: bool,
        #[arg(long)]
        nash: bool,
    },
    /// Play the donation auction move by move.
    Auction {
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 200)]
        rounds: usize,
    },
    /// Write a bundled scenario's system document.
    Scenario {
        name: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "FINCLEAR_PORT", default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ActionArgs {
    /// Remove (part of) an incoming debt, see --fraction.
    #[arg(long, value_name = "CONTRACT")]
    remove: Option<String>,
    /// Give external assets to another bank, see --amount.
    #[arg(long, value_name = "BANK")]
    donate_to: Option<String>,
    /// Add to the acting bank's own external assets.
    #[arg(long, value_name = "AMOUNT")]
    inject: Option<f64>,
    /// New priority for an outgoing contract; repeatable.
    #[arg(long, value_name = "CONTRACT=LEVEL", value_parser = parse_priority)]
    reprioritize: Vec<(String, u32)>,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    gamma0: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
}

impl ParamArgs {
    fn params(&self) -> ScenarioParams {
        ScenarioParams {
            gamma0: self.gamma0,
            delta: self.delta,
            epsilon: self.epsilon,
            k: self.k,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    WorstCase,
    Expected,
}

fn parse_priority(s: &str) -> Result<(String, u32), String> {
    let (c, p) = s.split_once('=').ok_or("expected CONTRACT=LEVEL")?;
    let p = p.parse().map_err(|_| format!("`{p}` is not a priority level"))?;
    Ok((c.to_owned(), p))
}

enum Failure {
    Usage(String),
    Validation(String),
    Capability(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Document { .. } | Error::Json(_) | Error::InvalidSystem(_) => Failure::Validation(msg),
            e if e.is_capability() => Failure::Capability(msg),
            _ => Failure::Usage(msg),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => fail(1, &m),
        Err(Failure::Validation(m)) => fail(2, &m),
        Err(Failure::Capability(m)) => fail(3, &m),
    }
}

fn fail(code: u8, message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn run(cli: Cli) -> Outcome {
    let mut cfg = SolverConfig::default();
    if let Some(t) = cli.tolerance {
        cfg = cfg.with_tolerance(t);
    }
    if let Some(s) = cli.seed {
        cfg = cfg.with_seed(s);
    }
    if cli.multistart_only {
        cfg = cfg.multistart_only();
    }
    cfg.validate()?;
    let json = cli.format == Format::Json;

    match cli.command {
        Command::Validate { path } => {
            let sys = load(&path)?;
            let report = sys.validate();
            if json {
                emit(&report);
            } else if report.is_ok() {
                say!(
                    "ok: {} banks, {} contracts, {} priority levels",
                    sys.banks().len(),
                    sys.contracts().len(),
                    sys.priority_levels()
                );
            }
            if !report.is_ok() {
                let lines: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
                return Err(Failure::Validation(lines.join("\n       ")));
            }
        }
        Command::Solve { path, all } => {
            let sys = load_valid(&path)?;
            let set = find_solutions(&sys, &cfg)?;
            let report = SolveReport::new(&sys, set, all);
            if json {
                emit(&report);
            } else {
                print_solve(&report);
            }
        }
        Command::Assess {
            path,
            bank,
            action,
            fraction,
            amount,
        } => {
            let sys = load_valid(&path)?;
            let action = build_action(&action, fraction, amount, bank.as_deref(), &sys)?;
            let acting = match bank {
                Some(b) => b,
                None => action.actor(&sys)?.to_string(),
            };
            let report = assess(&sys, &action, &acting, &cfg)?;
            if json {
                emit(&report);
            } else {
                print_effect(&report);
            }
        }
        Command::ScanGamma {
            path,
            contract,
            bank,
            steps,
            objective,
        } => {
            let sys = load_valid(&path)?;
            let acting = match bank {
                Some(b) => b,
                None => Action::remove_debt(contract.as_str()).actor(&sys)?.to_string(),
            };
            let objective = match objective {
                ObjectiveArg::WorstCase => Objective::WorstCase,
                ObjectiveArg::Expected => Objective::Expected,
            };
            let scan = optimize_partial_removal(&sys, &contract, &acting, steps, objective, &cfg)?;
            if json {
                emit(&scan);
            } else {
                print_scan(&scan, &acting);
            }
        }
        Command::Game {
            name,
            params,
            matrix,
            nash,
        } => {
            let scenario = build_scenario(&name, &params.params())?;
            if scenario.players.len() < 2 {
                return Err(Failure::Usage(format!("`{name}` is not a game; try `finclear scenario {name}`")));
            }
            let report = game_report(&scenario, &cfg)?;
            if json {
                emit(&report);
            } else {
                let both = !matrix && !nash;
                if matrix || both {
                    print_matrix(&report);
                }
                if nash || both {
                    print_equilibria(&report);
                }
            }
        }
        Command::Auction { epsilon, rounds } => {
            let state = auction_run(&AuctionState::new(epsilon)?, rounds, &cfg)?;
            if json {
                emit(&state);
            } else {
                print_auction(&state);
            }
        }
        Command::Scenario { name, params } => {
            let scenario = build_scenario(&name, &params.params())?;
            say!("{}", SystemDocument::from_system(&scenario.system).to_json());
        }
        Command::Serve { port } => {
            let addr = SocketAddr::from((Ipv4Addr::UNSPECIFIED, port));
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Usage(e.to_string()))?;
            eprintln!("listening on http://{addr}");
            rt.block_on(finclear_service::serve(addr, cfg))
                .map_err(|e| Failure::Usage(format!("cannot serve on {addr}: {e}")))?;
        }
    }
    Ok(())
}

fn load(path: &PathBuf) -> Result<FinancialSystem, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_system(&text).map_err(|e| match e {
        Error::Document { context, message } => Failure::Validation(format!(
            "{}: {context}: {message}",
            path.display()
        )),
        e => e.into(),
    })
}

fn load_valid(path: &PathBuf) -> Result<FinancialSystem, Failure> {
    let sys = load(path)?;
    sys.validate().into_result()?;
    Ok(sys)
}

fn build_action(
    args: &ActionArgs,
    fraction: f64,
    amount: Option<f64>,
    bank: Option<&str>,
    sys: &FinancialSystem,
) -> Result<Action, Failure> {
    let need_bank = |what: &str| {
        bank.map(str::to_owned)
            .ok_or_else(|| Failure::Usage(format!("--{what} needs --bank")))
    };
    if let Some(c) = &args.remove {
        if sys.contract(c).is_none() {
            return Err(Error::ContractNotFound(c.as_str().into()).into());
        }
        return Ok(Action::reduce_debt(c.as_str(), fraction));
    }
    if let Some(to) = &args.donate_to {
        let amount = amount.ok_or_else(|| Failure::Usage("--donate-to needs --amount".into()))?;
        return Ok(Action::donate(need_bank("donate-to")?, to.as_str(), amount));
    }
    if let Some(amount) = args.inject {
        return Ok(Action::inject(need_bank("inject")?, amount));
    }
    Ok(Action::reprioritize(
        need_bank("reprioritize")?,
        args.reprioritize.iter().map(|(c, p)| (c.as_str(), *p)),
    ))
}

fn emit<T: Serialize>(value: &T) {
    say!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

/// Up to three decimals, trailing zeros dropped.
fn num(x: f64) -> String {
    if x.is_nan() {
        return "n/a".into();
    }
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn tuple(xs: impl IntoIterator<Item = f64>) -> String {
    let parts: Vec<String> = xs.into_iter().map(num).collect();
    format!("({})", parts.join(", "))
}

fn print_solve(report: &SolveReport) {
    let banks: Vec<&str> = report
        .solutions
        .first()
        .map(|s| s.recovery.iter().map(|(b, _)| b.as_str()).collect())
        .unwrap_or_default();
    say!(
        "{} solution(s), multiplicity {}",
        report.found,
        serde_json::to_value(report.multiplicity).unwrap().as_str().unwrap()
    );
    say!("banks: {}", banks.join(", "));
    for (i, s) in report.solutions.iter().enumerate() {
        say!(
            "#{}  r={}  payoffs={}",
            i + 1,
            tuple(s.recovery.iter().map(|(_, r)| r)),
            tuple(s.payoffs.values().copied())
        );
    }
    if report.solutions.len() < report.found {
        say!("(use --all to list the other {})", report.found - report.solutions.len());
    }
}

fn print_effect(r: &EffectReport) {
    say!("acting bank: {}  cost: {}", r.acting, num(r.cost));
    say!(
        "payoffs: {} -> {}   rates: {} -> {}",
        tuple(r.payoffs_before.iter().copied()),
        tuple(r.payoffs_after.iter().copied()),
        tuple(r.rates_before.iter().copied()),
        tuple(r.rates_after.iter().copied())
    );
    say!(
        "gain: worst case {}, best case {}",
        num(r.worst_case_gain),
        num(r.best_case_gain)
    );
    for v in &r.validation_after.violations {
        say!("warning: {v}");
    }
}

fn print_scan(scan: &RemovalScan, acting: &str) {
    say!("fraction\tpayoff\tsolutions");
    for p in &scan.curve {
        say!("{}\t{}\t{}", num(p.fraction), num(p.payoff), p.solutions);
    }
    say!(
        "best for {acting}: fraction {} with payoff {}",
        num(scan.best_fraction),
        num(scan.best_payoff)
    );
}

fn print_matrix(report: &GameReport) {
    let m = &report.matrix;
    let players: Vec<&str> = m.players.iter().map(|p| p.as_str()).collect();
    say!("{} ({})", m.scenario, players.join(", "));
    for cell in &m.cells {
        say!("{}  {}", cell.labels.join("/"), tuple(cell.payoffs.iter().copied()));
    }
}

fn print_equilibria(report: &GameReport) {
    if report.nash.is_empty() {
        say!("no pure Nash equilibrium");
    }
    for profile in &report.nash {
        let labels: Vec<&str> = profile.iter().map(String::as_str).collect();
        let cell = report.matrix.cell_by_labels(&labels).expect("equilibria come from the matrix");
        say!("Nash equilibrium: \"{}\" {}", labels.join("/"), tuple(cell.payoffs.iter().copied()));
    }
    for (player, d) in report.matrix.players.iter().zip(&report.dominant) {
        if let Some(d) = d {
            say!("dominant for {player}: {d}");
        }
    }
}

fn print_auction(state: &AuctionState) {
    say!("epsilon {}  delta {}", num(state.epsilon), num(state.delta));
    for (i, m) in state.history.iter().enumerate() {
        print_move(i + 1, m);
    }
    say!(
        "spent: u_prime {}, v_prime {}{}",
        num(state.spent(finclear::games::AuctionPlayer::UPrime)),
        num(state.spent(finclear::games::AuctionPlayer::VPrime)),
        if state.halted() { "  (halted)" } else { "" }
    );
}

fn print_move(n: usize, m: &AuctionMove) {
    let who = serde_json::to_value(m.player).unwrap();
    let who = who.as_str().unwrap();
    if m.passed() {
        say!("{n:>3}. {who} passes (payoff {})", num(m.payoff_before));
    } else {
        say!(
            "{n:>3}. {who} donates {} -> e_u={} e_v={}, payoff {} -> {}",
            num(m.cost),
            num(m.e_u),
            num(m.e_v),
            num(m.payoff_before),
            num(m.payoff_after)
        );
    }
}
