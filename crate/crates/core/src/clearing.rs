//! Per-vector evaluation: liabilities, priority-aware payments, assets,
//! payoffs and the clearing update function.
//!
//! Payments of a bank `v` are funded by the amount `r_v * l_v(r)` that the
//! candidate vector says `v` pays out. That budget fills priority level 1
//! first, then level 2, and so on; the marginal level is paid pro rata. At a
//! fixed point the budget equals `min(a_v, l_v)`, so this matches the
//! waterfall on actual assets. With a single priority class the payment is
//! exactly `r_v * l_{v,u}(r)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BankId, ContractId, FinancialSystem, RecoveryVector, Violation};

#[derive(Clone, Debug)]
struct Edge {
    debtor: usize,
    creditor: usize,
    notional: f64,
    reference: Option<usize>,
    level: usize,
}

/// Index-based form of a [`FinancialSystem`] used by every numeric routine.
/// Banks are indexed in sorted-id order.
#[derive(Clone, Debug)]
pub(crate) struct Network {
    pub(crate) ids: Vec<BankId>,
    external: Vec<f64>,
    edges: Vec<Edge>,
    contract_ids: Vec<ContractId>,
    outgoing: Vec<Vec<usize>>,
    levels: usize,
}

/// Scratch buffers for [`Network::evaluate`].
#[derive(Clone, Debug)]
pub(crate) struct Workspace {
    pub(crate) liability: Vec<f64>,
    pub(crate) total: Vec<f64>,
    pub(crate) by_level: Vec<f64>,
    pub(crate) payment: Vec<f64>,
    pub(crate) assets: Vec<f64>,
    pub(crate) update: Vec<f64>,
    factor: Vec<f64>,
}

impl Network {
    pub(crate) fn compile(sys: &FinancialSystem) -> Result<Self> {
        let structural: Vec<Violation> = sys.validate().structural().cloned().collect();
        if !structural.is_empty() {
            return Err(Error::InvalidSystem(structural));
        }
        let ids = sys.sorted_bank_ids();
        let index: BTreeMap<&str, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let mut external = vec![0.0; ids.len()];
        for bank in sys.banks() {
            external[index[bank.id.as_str()]] = bank.external_assets;
        }
        let mut outgoing = vec![Vec::new(); ids.len()];
        let mut edges = Vec::with_capacity(sys.contracts().len());
        let mut contract_ids = Vec::with_capacity(sys.contracts().len());
        for (k, c) in sys.contracts().iter().enumerate() {
            let debtor = index[c.debtor.as_str()];
            outgoing[debtor].push(k);
            edges.push(Edge {
                debtor,
                creditor: index[c.creditor.as_str()],
                notional: c.notional,
                reference: c.kind.reference().map(|w| index[w.as_str()]),
                level: c.priority as usize - 1,
            });
            contract_ids.push(c.id.clone());
        }
        Ok(Self {
            ids,
            external,
            edges,
            contract_ids,
            outgoing,
            levels: sys.priority_levels() as usize,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.ids.len()
    }

    pub(crate) fn workspace(&self) -> Workspace {
        let n = self.ids.len();
        Workspace {
            liability: vec![0.0; self.edges.len()],
            total: vec![0.0; n],
            by_level: vec![0.0; n * self.levels],
            payment: vec![0.0; self.edges.len()],
            assets: vec![0.0; n],
            update: vec![0.0; n],
            factor: vec![0.0; self.levels],
        }
    }

    /// Largest liability bank `v` can ever face (all CDS references at 0).
    pub(crate) fn max_liability(&self, v: usize) -> f64 {
        self.outgoing[v].iter().map(|&k| self.edges[k].notional).sum()
    }

    /// Banks that can never default: no outgoing contracts, or external
    /// assets covering the largest possible liability.
    pub(crate) fn never_defaults(&self, v: usize) -> bool {
        self.outgoing[v].is_empty() || self.external[v] >= self.max_liability(v)
    }

    pub(crate) fn dense(&self, r: &RecoveryVector) -> Result<Vec<f64>> {
        for (id, _) in r.iter() {
            if self.ids.binary_search(id).is_err() {
                return Err(Error::UnknownBank(id.clone()));
            }
        }
        self.ids
            .iter()
            .map(|id| {
                let rate = r.get(id.as_str()).ok_or_else(|| Error::MissingRate(id.clone()))?;
                if !(0.0..=1.0).contains(&rate) {
                    return Err(Error::RateOutOfRange {
                        bank: id.clone(),
                        rate,
                    });
                }
                Ok(rate)
            })
            .collect()
    }

    pub(crate) fn recovery(&self, r: &[f64]) -> RecoveryVector {
        RecoveryVector::from_pairs(self.ids.iter().cloned().zip(r.iter().copied()))
    }

    /// Fills `ws` for the vector `r` and returns the max-norm residual `|f(r) - r|`.
    pub(crate) fn evaluate(&self, r: &[f64], ws: &mut Workspace) -> f64 {
        let p = self.levels;
        ws.total.iter_mut().for_each(|x| *x = 0.0);
        ws.by_level.iter_mut().for_each(|x| *x = 0.0);
        for (k, e) in self.edges.iter().enumerate() {
            let l = match e.reference {
                Some(w) => e.notional * (1.0 - r[w]),
                None => e.notional,
            };
            ws.liability[k] = l;
            ws.total[e.debtor] += l;
            ws.by_level[e.debtor * p + e.level] += l;
        }

        ws.assets.copy_from_slice(&self.external);
        for v in 0..self.ids.len() {
            if self.outgoing[v].is_empty() {
                continue;
            }
            let rate = r[v].clamp(0.0, 1.0);
            let total = ws.total[v];
            let budget = rate * total;
            let mut paid_above = 0.0;
            for level in 0..p {
                let owed = ws.by_level[v * p + level];
                ws.factor[level] = if owed <= 0.0 || budget >= paid_above + owed {
                    1.0
                } else if budget <= paid_above {
                    0.0
                } else if paid_above == 0.0 && owed == total {
                    // single effective class: pay exactly r_v of each liability
                    rate
                } else {
                    (budget - paid_above) / owed
                };
                paid_above += owed;
            }
            for &k in &self.outgoing[v] {
                let e = &self.edges[k];
                let pay = ws.factor[e.level] * ws.liability[k];
                ws.payment[k] = pay;
                ws.assets[e.creditor] += pay;
            }
        }

        let mut residual: f64 = 0.0;
        for v in 0..self.ids.len() {
            let (a, l) = (ws.assets[v], ws.total[v]);
            let f = if a >= l { 1.0 } else { a / l };
            ws.update[v] = f;
            residual = residual.max((f - r[v]).abs());
        }
        residual
    }

    pub(crate) fn state(&self, r: &[f64], ws: &mut Workspace) -> ClearingState {
        let residual = self.evaluate(r, ws);
        let ids = &self.ids;
        let mut pairwise: BTreeMap<BankId, BTreeMap<BankId, f64>> = BTreeMap::new();
        let mut payments: BTreeMap<BankId, BTreeMap<BankId, f64>> = BTreeMap::new();
        let mut flows = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            let (d, c) = (&ids[e.debtor], &ids[e.creditor]);
            *pairwise
                .entry(d.clone())
                .or_default()
                .entry(c.clone())
                .or_insert(0.0) += ws.liability[k];
            *payments
                .entry(d.clone())
                .or_default()
                .entry(c.clone())
                .or_insert(0.0) += ws.payment[k];
            flows.push(ContractFlow {
                id: self.contract_ids[k].clone(),
                debtor: d.clone(),
                creditor: c.clone(),
                priority: e.level as u32 + 1,
                liability: ws.liability[k],
                payment: ws.payment[k],
            });
        }
        let per_bank = |values: &[f64]| -> BTreeMap<BankId, f64> {
            ids.iter().cloned().zip(values.iter().copied()).collect()
        };
        let p = self.levels;
        let by_priority = ids
            .iter()
            .enumerate()
            .map(|(v, id)| (id.clone(), ws.by_level[v * p..(v + 1) * p].to_vec()))
            .collect();
        let payoffs = ids
            .iter()
            .enumerate()
            .map(|(v, id)| (id.clone(), (ws.assets[v] - ws.total[v]).max(0.0)))
            .collect();
        ClearingState {
            recovery: self.recovery(r),
            ledger: LiabilityLedger {
                pairwise,
                totals: per_bank(&ws.total),
                by_priority,
            },
            payments,
            contracts: flows,
            external: per_bank(&self.external),
            assets: per_bank(&ws.assets),
            payoffs,
            update: self.recovery(&ws.update),
            residual,
        }
    }
}

/// Liabilities induced by one recovery vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiabilityLedger {
    /// `debtor -> creditor -> l_{debtor,creditor}(r)`, parallel contracts summed.
    pub pairwise: BTreeMap<BankId, BTreeMap<BankId, f64>>,
    pub totals: BTreeMap<BankId, f64>,
    /// Per bank, total liability on each priority level (index 0 is level 1).
    pub by_priority: BTreeMap<BankId, Vec<f64>>,
}

impl LiabilityLedger {
    pub fn between(&self, debtor: &str, creditor: &str) -> f64 {
        self.pairwise
            .get(debtor)
            .and_then(|m| m.get(creditor))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn total(&self, bank: &str) -> f64 {
        self.totals.get(bank).copied().unwrap_or(0.0)
    }

    pub fn at_priority(&self, bank: &str, priority: u32) -> f64 {
        self.by_priority
            .get(bank)
            .and_then(|v| v.get(priority as usize - 1))
            .copied()
            .unwrap_or(0.0)
    }

    /// Liabilities on levels `1..=priority`.
    pub fn cumulative(&self, bank: &str, priority: u32) -> f64 {
        self.by_priority
            .get(bank)
            .map(|v| v.iter().take(priority as usize).sum())
            .unwrap_or(0.0)
    }
}

/// Liability and payment of a single contract.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractFlow {
    pub id: ContractId,
    pub debtor: BankId,
    pub creditor: BankId,
    pub priority: u32,
    pub liability: f64,
    pub payment: f64,
}

pub type PaymentMap = BTreeMap<BankId, BTreeMap<BankId, f64>>;

/// A recovery vector together with everything it induces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClearingState {
    pub recovery: RecoveryVector,
    pub ledger: LiabilityLedger,
    /// `debtor -> creditor -> p_{debtor,creditor}(r)`.
    pub payments: PaymentMap,
    pub contracts: Vec<ContractFlow>,
    pub external: BTreeMap<BankId, f64>,
    pub assets: BTreeMap<BankId, f64>,
    pub payoffs: BTreeMap<BankId, f64>,
    /// `f(r)`.
    pub update: RecoveryVector,
    /// Max-norm of `f(r) - r`.
    pub residual: f64,
}

impl ClearingState {
    pub fn rate(&self, bank: &str) -> f64 {
        self.recovery.rate(bank)
    }

    pub fn payoff(&self, bank: &str) -> f64 {
        self.payoffs[bank]
    }

    pub fn assets_of(&self, bank: &str) -> f64 {
        self.assets[bank]
    }

    pub fn liability_of(&self, bank: &str) -> f64 {
        self.ledger.total(bank)
    }

    pub fn payment(&self, debtor: &str, creditor: &str) -> f64 {
        self.payments
            .get(debtor)
            .and_then(|m| m.get(creditor))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn outgoing_paid(&self, bank: &str) -> f64 {
        self.payments
            .get(bank)
            .map(|m| m.values().sum())
            .unwrap_or(0.0)
    }

    /// Banks with `r_v < 1 - tol`.
    pub fn default_set(&self, tol: f64) -> Vec<BankId> {
        self.recovery
            .iter()
            .filter(|(_, r)| *r < 1.0 - tol)
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Checks conservation and priority dominance.
    ///
    /// Total outgoing payments of a bank with `l_v > 0` must equal
    /// `min(a_v, l_v)` up to `tol + residual * l_v` (exact at a solution);
    /// banks without liabilities pay nothing. A positive payment on level
    /// `rho` requires every level above it paid in full, and creditors on the
    /// marginal level are all paid the same fraction.
    pub fn invariant_violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for (bank, &l) in &self.ledger.totals {
            let paid = self.outgoing_paid(bank.as_str());
            let a = self.assets[bank];
            if l > 0.0 {
                let gap = (paid - a.min(l)).abs();
                if gap > tol + self.residual * l {
                    out.push(format!(
                        "conservation: `{bank}` pays {paid} but min(a, l) = {}",
                        a.min(l)
                    ));
                }
            } else if paid.abs() > tol {
                out.push(format!("conservation: `{bank}` has no liabilities but pays {paid}"));
            }
        }

        let mut by_debtor: BTreeMap<&BankId, Vec<&ContractFlow>> = BTreeMap::new();
        for f in &self.contracts {
            by_debtor.entry(&f.debtor).or_default().push(f);
        }
        for (debtor, flows) in by_debtor {
            for f in &flows {
                if f.payment > tol {
                    for g in flows.iter().filter(|g| g.priority < f.priority) {
                        if g.liability - g.payment > tol {
                            out.push(format!(
                                "priority: `{debtor}` pays `{}` on level {} while `{}` on level {} is short by {}",
                                f.id,
                                f.priority,
                                g.id,
                                g.priority,
                                g.liability - g.payment
                            ));
                        }
                    }
                }
            }
            let mut ratios: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
            for f in flows.iter().filter(|f| f.liability > tol) {
                ratios
                    .entry(f.priority)
                    .or_default()
                    .push(f.payment / f.liability);
            }
            for (level, rs) in ratios {
                let lo = rs.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = rs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if hi - lo > tol.max(1e-12) {
                    out.push(format!(
                        "proportionality: `{debtor}` level {level} ratios range {lo}..{hi}"
                    ));
                }
            }
        }
        out
    }
}

pub fn liabilities(sys: &FinancialSystem, r: &RecoveryVector) -> Result<LiabilityLedger> {
    Ok(clearing_state(sys, r)?.ledger)
}

pub fn payments(sys: &FinancialSystem, r: &RecoveryVector) -> Result<PaymentMap> {
    Ok(clearing_state(sys, r)?.payments)
}

pub fn clearing_state(sys: &FinancialSystem, r: &RecoveryVector) -> Result<ClearingState> {
    let net = Network::compile(sys)?;
    let dense = net.dense(r)?;
    let mut ws = net.workspace();
    Ok(net.state(&dense, &mut ws))
}

/// The update function `f`: 1 for banks whose assets cover their liabilities
/// (including banks without liabilities), `a_v / l_v` otherwise.
pub fn update(sys: &FinancialSystem, r: &RecoveryVector) -> Result<RecoveryVector> {
    let net = Network::compile(sys)?;
    let dense = net.dense(r)?;
    let mut ws = net.workspace();
    net.evaluate(&dense, &mut ws);
    Ok(net.recovery(&ws.update))
}

pub fn residual(sys: &FinancialSystem, r: &RecoveryVector) -> Result<f64> {
    let net = Network::compile(sys)?;
    let dense = net.dense(r)?;
    let mut ws = net.workspace();
    Ok(net.evaluate(&dense, &mut ws))
}
