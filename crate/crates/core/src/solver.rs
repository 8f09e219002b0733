//! Finding clearing vectors (fixed points of the update function).
//!
//! Two independent search routes feed one verified, clustered result:
//!
//! * damped iteration `r <- (1 - λ) r + λ f(r)` from every corner of the
//!   hypercube over the banks that can default (when there are few enough)
//!   plus seeded random interior starts;
//! * enumeration of default sets `D`: rates outside `D` are pinned to 1 and
//!   the balance equations `a_v(r) = r_v l_v(r)` for `v ∈ D` are solved with
//!   Levenberg–Marquardt from several starts. Unlike damped iteration this
//!   reaches repelling fixed points as well.
//!
//! A candidate is accepted only if its residual is within tolerance and its
//! default pattern is consistent with its own assets and liabilities.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::clearing::{ClearingState, Network, Workspace};
use crate::error::{Error, Result};
use crate::model::{BankId, FinancialSystem, RecoveryVector};

/// Seed of the random interior multistarts.
pub const DEFAULT_SEED: u64 = 0x00C1_EA12_2019;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Residual acceptance threshold.
    pub tolerance: f64,
    /// Damping factor λ in (0, 1].
    pub damping: f64,
    pub max_iterations: usize,
    /// Give up a damped run whose best residual has not improved for this many steps.
    pub stall_window: usize,
    /// Corners of the hypercube are used as starts when at most this many banks can default.
    pub corner_limit: usize,
    pub random_starts: usize,
    pub seed: u64,
    /// Max-norm radius under which two solutions are considered the same.
    pub cluster_radius: f64,
    /// Run default-set enumeration in addition to multistart iteration.
    pub enumerate: bool,
    /// Hard cap on the number of banks that can default for enumeration.
    pub max_enumeration_banks: usize,
    /// Extra random starts per default set (on top of the 0, ½ and 1 starts).
    pub subset_random_starts: usize,
    /// More than this many distinct solutions sharing one default pattern
    /// flags a suspected continuum.
    pub family_threshold: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            damping: 0.5,
            max_iterations: 100_000,
            stall_window: 2_000,
            corner_limit: 12,
            random_starts: 256,
            seed: DEFAULT_SEED,
            cluster_radius: 1e-6,
            enumerate: true,
            max_enumeration_banks: 20,
            subset_random_starts: 3,
            family_threshold: 8,
        }
    }
}

impl SolverConfig {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Multistart iteration only; no enumeration and therefore no size cap.
    pub fn multistart_only(mut self) -> Self {
        self.enumerate = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidConfig(m.to_owned()));
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return fail("tolerance must be positive");
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return fail("damping must lie in (0, 1]");
        }
        if self.max_iterations == 0 || self.stall_window == 0 {
            return fail("iteration budgets must be positive");
        }
        if !(self.cluster_radius > 0.0 && self.cluster_radius.is_finite()) {
            return fail("cluster_radius must be positive");
        }
        if self.family_threshold == 0 {
            return fail("family_threshold must be positive");
        }
        Ok(())
    }
}

/// Banks hypothesised to be in default; every other bank has rate 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DefaultSet(pub BTreeSet<BankId>);

impl DefaultSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.0.contains(id)
    }
}

impl<S: Into<BankId>> FromIterator<S> for DefaultSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(Into::into).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    /// Nothing verified was found.
    None,
    Unique,
    Multiple,
    FamilySuspected,
}

/// Verified solutions in canonical (lexicographic in `r`) order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionSet {
    pub solutions: Vec<ClearingState>,
    pub multiplicity: Multiplicity,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn payoffs_of(&self, bank: &str) -> Vec<f64> {
        self.solutions.iter().map(|s| s.payoff(bank)).collect()
    }

    pub fn rates_of(&self, bank: &str) -> Vec<f64> {
        self.solutions.iter().map(|s| s.rate(bank)).collect()
    }

    pub fn min_payoff(&self, bank: &str) -> Option<f64> {
        self.payoffs_of(bank).into_iter().reduce(f64::min)
    }

    pub fn max_payoff(&self, bank: &str) -> Option<f64> {
        self.payoffs_of(bank).into_iter().reduce(f64::max)
    }

    pub fn mean_payoff(&self, bank: &str) -> Option<f64> {
        let p = self.payoffs_of(bank);
        (!p.is_empty()).then(|| p.iter().sum::<f64>() / p.len() as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    BudgetExhausted,
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum IterationResult {
    Converged {
        state: Box<ClearingState>,
        iterations: usize,
    },
    NotConverged {
        iterations: usize,
        residual: f64,
        best_residual: f64,
        last: RecoveryVector,
        reason: StopReason,
    },
}

impl IterationResult {
    pub fn converged(&self) -> Option<&ClearingState> {
        match self {
            IterationResult::Converged { state, .. } => Some(state),
            IterationResult::NotConverged { .. } => None,
        }
    }
}

/// Outcome of a damped run on dense vectors.
struct Run {
    converged: bool,
    iterations: usize,
    residual: f64,
    best: f64,
    reason: StopReason,
}

fn damped(net: &Network, ws: &mut Workspace, r: &mut [f64], cfg: &SolverConfig) -> Run {
    let lambda = cfg.damping;
    let mut best = f64::INFINITY;
    let mut last_gain = 0;
    let mut residual = f64::INFINITY;
    for it in 0..cfg.max_iterations {
        residual = net.evaluate(r, ws);
        if residual <= cfg.tolerance {
            return Run {
                converged: true,
                iterations: it,
                residual,
                best: residual,
                reason: StopReason::BudgetExhausted,
            };
        }
        if residual < best * (1.0 - 1e-3) {
            best = residual;
            last_gain = it;
        } else if it - last_gain > cfg.stall_window {
            return Run {
                converged: false,
                iterations: it,
                residual,
                best,
                reason: StopReason::Stalled,
            };
        }
        for (x, f) in r.iter_mut().zip(&ws.update) {
            *x = ((1.0 - lambda) * *x + lambda * f).clamp(0.0, 1.0);
        }
    }
    Run {
        converged: false,
        iterations: cfg.max_iterations,
        residual,
        best: best.min(residual),
        reason: StopReason::BudgetExhausted,
    }
}

/// Damped fixed-point iteration from `r0`.
pub fn iterate(
    sys: &FinancialSystem,
    r0: &RecoveryVector,
    cfg: &SolverConfig,
) -> Result<IterationResult> {
    cfg.validate()?;
    let net = Network::compile(sys)?;
    let mut r = net.dense(r0)?;
    let mut ws = net.workspace();
    let run = damped(&net, &mut ws, &mut r, cfg);
    Ok(if run.converged {
        IterationResult::Converged {
            state: Box::new(net.state(&r, &mut ws)),
            iterations: run.iterations,
        }
    } else {
        IterationResult::NotConverged {
            iterations: run.iterations,
            residual: run.residual,
            best_residual: run.best,
            last: net.recovery(&r),
            reason: run.reason,
        }
    })
}

/// `(residual <= tolerance, residual)`.
pub fn verify_solution(
    sys: &FinancialSystem,
    r: &RecoveryVector,
    tolerance: f64,
) -> Result<(bool, f64)> {
    let res = crate::clearing::residual(sys, r)?;
    Ok((res <= tolerance, res))
}

/// Tie band for `a_v` versus `l_v` comparisons.
fn tie(tol: f64, l: f64) -> f64 {
    tol * l.max(1.0)
}

/// Every bank in `in_default` has `a_v < l_v` and every other bank `a_v >= l_v`,
/// up to the tie band.
fn consistent(ws: &Workspace, in_default: &[bool], tol: f64) -> bool {
    in_default.iter().enumerate().all(|(v, &d)| {
        let (a, l) = (ws.assets[v], ws.total[v]);
        if d {
            a < l + tie(tol, l)
        } else {
            a >= l - tie(tol, l)
        }
    })
}

/// Balance residuals `a_v(r) - r_v l_v(r)` over `vars`, other rates as in `base`.
fn balance(net: &Network, ws: &mut Workspace, base: &mut [f64], vars: &[usize], x: &[f64], out: &mut [f64]) {
    for (&v, &xv) in vars.iter().zip(x) {
        base[v] = xv;
    }
    net.evaluate(base, ws);
    for (o, &v) in out.iter_mut().zip(vars) {
        *o = ws.assets[v] - base[v] * ws.total[v];
    }
}

/// Levenberg–Marquardt on the balance equations of `vars`, staying inside [0, 1].
fn levenberg_marquardt(
    net: &Network,
    ws: &mut Workspace,
    base: &mut [f64],
    vars: &[usize],
    start: &[f64],
) -> Vec<f64> {
    let m = vars.len();
    let mut x = start.to_vec();
    let mut h = vec![0.0; m];
    let mut trial_h = vec![0.0; m];
    balance(net, ws, base, vars, &x, &mut h);
    let mut cost: f64 = h.iter().map(|v| v * v).sum();
    let mut mu = 1e-6;
    let step = 1e-6;
    let mut jac = DMatrix::<f64>::zeros(m, m);
    let (mut hp, mut hm) = (vec![0.0; m], vec![0.0; m]);

    for _ in 0..80 {
        if cost < 1e-30 {
            break;
        }
        for j in 0..m {
            let (lo, hi) = ((x[j] - step).max(0.0), (x[j] + step).min(1.0));
            let xj = x[j];
            x[j] = hi;
            balance(net, ws, base, vars, &x, &mut hp);
            x[j] = lo;
            balance(net, ws, base, vars, &x, &mut hm);
            x[j] = xj;
            for i in 0..m {
                jac[(i, j)] = (hp[i] - hm[i]) / (hi - lo);
            }
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * DVector::from_column_slice(&h);
        let mut accepted = false;
        while mu < 1e12 {
            let mut a = jtj.clone();
            for i in 0..m {
                a[(i, i)] += mu * (1.0 + jtj[(i, i)]);
            }
            let Some(delta) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                mu *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x
                .iter()
                .zip(delta.iter())
                .map(|(xi, d)| (xi + d).clamp(0.0, 1.0))
                .collect();
            balance(net, ws, base, vars, &trial, &mut trial_h);
            let trial_cost: f64 = trial_h.iter().map(|v| v * v).sum();
            if trial_cost < cost {
                let moved = trial
                    .iter()
                    .zip(&x)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                x = trial;
                std::mem::swap(&mut h, &mut trial_h);
                cost = trial_cost;
                mu = (mu / 5.0).max(1e-12);
                accepted = true;
                if moved < 1e-16 {
                    return x;
                }
                break;
            }
            mu *= 8.0;
        }
        if !accepted {
            break;
        }
    }
    x
}

fn subset_seed(seed: u64, mask: u64) -> u64 {
    seed ^ mask.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Candidate solutions consistent with the default set given by `vars`.
fn solve_subset(
    net: &Network,
    vars: &[usize],
    mask: u64,
    cfg: &SolverConfig,
) -> Vec<Vec<f64>> {
    let n = net.len();
    let mut ws = net.workspace();
    let mut in_default = vec![false; n];
    for &v in vars {
        in_default[v] = true;
    }
    let mut base = vec![1.0; n];
    if vars.is_empty() {
        let res = net.evaluate(&base, &mut ws);
        return if res <= cfg.tolerance && consistent(&ws, &in_default, cfg.tolerance) {
            vec![base]
        } else {
            Vec::new()
        };
    }

    let m = vars.len();
    let mut starts = vec![vec![0.0; m], vec![0.5; m], vec![1.0; m]];
    let mut rng = ChaCha8Rng::seed_from_u64(subset_seed(cfg.seed, mask));
    for _ in 0..cfg.subset_random_starts {
        starts.push((0..m).map(|_| rng.gen::<f64>()).collect());
    }

    let mut found: Vec<Vec<f64>> = Vec::new();
    for start in starts {
        base.iter_mut().for_each(|x| *x = 1.0);
        let x = levenberg_marquardt(net, &mut ws, &mut base, vars, &start);
        let mut r = vec![1.0; n];
        for (&v, &xv) in vars.iter().zip(&x) {
            r[v] = xv;
        }
        let res = net.evaluate(&r, &mut ws);
        if res <= cfg.tolerance
            && consistent(&ws, &in_default, cfg.tolerance)
            && !found.iter().any(|s| dist(s, &r) < cfg.cluster_radius)
        {
            found.push(r);
        }
    }
    found
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn candidate_banks(net: &Network) -> Vec<usize> {
    (0..net.len()).filter(|&v| !net.never_defaults(v)).collect()
}

/// Pins rates outside `d` to 1 and solves for the rates inside it. Returns
/// a solution only if its assets and liabilities agree with `d`.
pub fn solve_with_default_set(
    sys: &FinancialSystem,
    d: &DefaultSet,
    cfg: &SolverConfig,
) -> Result<Option<ClearingState>> {
    cfg.validate()?;
    let net = Network::compile(sys)?;
    let mut vars = Vec::new();
    for id in &d.0 {
        let v = net
            .ids
            .binary_search(id)
            .map_err(|_| Error::UnknownBank(id.clone()))?;
        vars.push(v);
    }
    let mut found = solve_subset(&net, &vars, default_mask(&vars), cfg);
    found.sort_by(|a, b| lex(a, b));
    let mut ws = net.workspace();
    Ok(found.first().map(|r| net.state(r, &mut ws)))
}

fn default_mask(vars: &[usize]) -> u64 {
    vars.iter().fold(0u64, |m, &v| m | 1u64.rotate_left(v as u32))
}

fn lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Refines a converged iterate on its own default pattern and snaps rates
/// that are 1 up to rounding.
///
/// A candidate that only balances because some rate sits just below 1 is an
/// artifact: a bank owing almost nothing then has an update that is a ratio
/// of two rounding-sized numbers. Such candidates are replaced by wherever
/// iteration from the snapped point leads.
fn polish(net: &Network, ws: &mut Workspace, r: Vec<f64>, cfg: &SolverConfig) -> Vec<f64> {
    let (best, snapped, rejected) = refine(net, ws, r, cfg);
    if !rejected {
        return best;
    }
    let mut r = snapped;
    if damped(net, ws, &mut r, cfg).converged {
        refine(net, ws, r, cfg).0
    } else {
        r
    }
}

/// `(best, snapped, snapping_rejected)`.
fn refine(net: &Network, ws: &mut Workspace, r: Vec<f64>, cfg: &SolverConfig) -> (Vec<f64>, Vec<f64>, bool) {
    let original = net.evaluate(&r, ws);
    let vars: Vec<usize> = (0..r.len()).filter(|&v| r[v] < 1.0 - 1e-7).collect();
    let mut best = (original, r.clone());
    if !vars.is_empty() {
        let mut base = r.clone();
        let start: Vec<f64> = vars.iter().map(|&v| r[v]).collect();
        let x = levenberg_marquardt(net, ws, &mut base, &vars, &start);
        let mut refined = r.clone();
        for (&v, &xv) in vars.iter().zip(&x) {
            refined[v] = xv;
        }
        let res = net.evaluate(&refined, ws);
        if res <= best.0 && dist(&refined, &r) < cfg.cluster_radius {
            best = (res, refined);
        }
    }
    let mut snapped = best.1.clone();
    let mut changed = false;
    for x in snapped.iter_mut() {
        if *x != 1.0 && *x > 1.0 - cfg.tolerance {
            *x = 1.0;
            changed = true;
        }
    }
    let mut rejected = false;
    if changed {
        let res = net.evaluate(&snapped, ws);
        if res <= best.0.max(cfg.tolerance * 1e-3) {
            best = (res, snapped.clone());
        } else {
            rejected = true;
        }
    }
    (best.1, snapped, rejected)
}

/// All solutions found by multistart iteration and (unless disabled)
/// default-set enumeration, verified, clustered and canonically ordered.
///
/// Errors with [`Error::TooLarge`] when enumeration is enabled and more than
/// `max_enumeration_banks` banks can default.
pub fn find_solutions(sys: &FinancialSystem, cfg: &SolverConfig) -> Result<SolutionSet> {
    cfg.validate()?;
    let net = Network::compile(sys)?;
    let cand = candidate_banks(&net);
    if cfg.enumerate && cand.len() > cfg.max_enumeration_banks {
        return Err(Error::TooLarge {
            candidates: cand.len(),
            cap: cfg.max_enumeration_banks,
        });
    }
    let n = net.len();

    let mut starts: Vec<Vec<f64>> = Vec::new();
    if cand.len() <= cfg.corner_limit {
        for mask in 0u64..(1u64 << cand.len()) {
            let mut r = vec![1.0; n];
            for (bit, &v) in cand.iter().enumerate() {
                r[v] = if mask >> bit & 1 == 1 { 1.0 } else { 0.0 };
            }
            starts.push(r);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.random_starts {
        let mut r = vec![1.0; n];
        for &v in &cand {
            r[v] = rng.gen::<f64>();
        }
        starts.push(r);
    }

    let mut candidates: Vec<Vec<f64>> = starts
        .into_par_iter()
        .map_init(
            || net.workspace(),
            |ws, mut r| damped(&net, ws, &mut r, cfg).converged.then_some(r),
        )
        .flatten()
        .collect();

    if cfg.enumerate {
        let subsets: Vec<u64> = (0u64..(1u64 << cand.len())).collect();
        let enumerated: Vec<Vec<f64>> = subsets
            .into_par_iter()
            .flat_map_iter(|mask| {
                let vars: Vec<usize> = cand
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| mask >> bit & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                solve_subset(&net, &vars, mask, cfg)
            })
            .collect();
        candidates.extend(enumerated);
    }

    let mut ws = net.workspace();
    let mut verified: Vec<(Vec<f64>, f64)> = Vec::new();
    for r in candidates {
        let r = polish(&net, &mut ws, r, cfg);
        let res = net.evaluate(&r, &mut ws);
        if res <= cfg.tolerance {
            verified.push((r, res));
        }
    }
    verified.sort_by(|a, b| lex(&a.0, &b.0));

    let mut reps: Vec<(Vec<f64>, f64)> = Vec::new();
    for (r, res) in verified {
        match reps.iter_mut().find(|(s, _)| dist(s, &r) < cfg.cluster_radius) {
            Some(rep) => {
                if res < rep.1 {
                    *rep = (r, res);
                }
            }
            None => reps.push((r, res)),
        }
    }
    reps.sort_by(|a, b| lex(&a.0, &b.0));

    let solutions: Vec<ClearingState> = reps.iter().map(|(r, _)| net.state(r, &mut ws)).collect();
    let multiplicity = classify(&solutions, cfg);
    Ok(SolutionSet {
        solutions,
        multiplicity,
    })
}

fn classify(solutions: &[ClearingState], cfg: &SolverConfig) -> Multiplicity {
    match solutions.len() {
        0 => Multiplicity::None,
        1 => Multiplicity::Unique,
        _ => {
            let mut counts = std::collections::BTreeMap::<Vec<BankId>, usize>::new();
            for s in solutions {
                *counts.entry(s.default_set(cfg.cluster_radius)).or_default() += 1;
            }
            if counts.values().any(|&c| c > cfg.family_threshold) {
                Multiplicity::FamilySuspected
            } else {
                Multiplicity::Multiple
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> FinancialSystem {
        let mut sys = FinancialSystem::new(1);
        sys.add_bank("u", 2.0).add_bank("v", 1.0).add_bank("w", 0.0);
        sys.add_debt("u", "v", 2.0);
        sys.add_debt("u", "w", 2.0);
        sys.add_cds("w", "v", "u", 2.0);
        sys
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            damping: 0.0,
            ..SolverConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = SolverConfig::default().with_tolerance(0.0);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn iterate_triangle() {
        let sys = triangle();
        let out = iterate(&sys, &RecoveryVector::uniform(&sys, 1.0), &SolverConfig::default())
            .unwrap();
        let state = out.converged().expect("converges");
        assert!((state.rate("u") - 0.5).abs() < 1e-9);
        assert_eq!(state.rate("v"), 1.0);
        assert!((state.rate("w") - 1.0).abs() < 1e-9);
    }

    #[test]
    fn default_set_triangle() {
        let sys = triangle();
        let cfg = SolverConfig::default();
        let s = solve_with_default_set(&sys, &DefaultSet::from_iter(["u"]), &cfg)
            .unwrap()
            .unwrap();
        assert!((s.rate("u") - 0.5).abs() < 1e-12);
        assert!(solve_with_default_set(&sys, &DefaultSet::empty(), &cfg)
            .unwrap()
            .is_none());
        assert!(matches!(
            solve_with_default_set(&sys, &DefaultSet::from_iter(["zz"]), &cfg),
            Err(Error::UnknownBank(_))
        ));
    }

    #[test]
    fn find_unique_triangle() {
        let set = find_solutions(&triangle(), &SolverConfig::default()).unwrap();
        assert_eq!(set.multiplicity, Multiplicity::Unique);
        assert_eq!(set.len(), 1);
        let s = &set.solutions[0];
        assert!((s.rate("u") - 0.5).abs() < 1e-12);
        assert!((s.payoff("v") - 3.0).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        let sys = triangle();
        let cfg = SolverConfig {
            max_iterations: 1,
            ..SolverConfig::default()
        };
        let out = iterate(&sys, &RecoveryVector::uniform(&sys, 1.0), &cfg).unwrap();
        match out {
            IterationResult::NotConverged {
                iterations,
                residual,
                ..
            } => {
                assert_eq!(iterations, 1);
                assert!(residual > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn too_large_is_a_capability_error() {
        let mut sys = FinancialSystem::new(1);
        for i in 0..4 {
            sys.add_bank(format!("b{i}"), 0.0);
        }
        for i in 0..4 {
            sys.add_debt(format!("b{i}"), format!("b{}", (i + 1) % 4), 1.0);
        }
        let cfg = SolverConfig {
            max_enumeration_banks: 3,
            ..SolverConfig::default()
        };
        let err = find_solutions(&sys, &cfg).unwrap_err();
        assert!(err.is_capability());
        let set = find_solutions(&sys, &cfg.clone().multistart_only()).unwrap();
        assert!(!set.is_empty());
    }
}
