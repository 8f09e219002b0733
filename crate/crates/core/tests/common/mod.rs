//! Test-only oracle: a from-scratch evaluation of the update function, a
//! grid scan for fixed points and a random system generator.

#![allow(dead_code)]

use std::path::PathBuf;

use finclear::{ContractKind, FinancialSystem, SolutionSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.json"))
}

pub fn load(name: &str) -> FinancialSystem {
    let text = std::fs::read_to_string(scenario_path(name)).unwrap();
    let sys = finclear::parse_system(&text).unwrap();
    assert!(sys.validate().is_ok(), "{name} does not validate");
    sys
}

struct Edge {
    debtor: usize,
    creditor: usize,
    notional: f64,
    reference: Option<usize>,
    level: u32,
}

/// Dense re-encoding of a system, independent of the library's own.
pub struct Naive {
    pub ids: Vec<String>,
    external: Vec<f64>,
    edges: Vec<Edge>,
    /// Edge indices grouped by debtor, then by level in payment order.
    schedule: Vec<Vec<Vec<usize>>>,
}

pub struct NaiveEval {
    pub liabilities: Vec<f64>,
    pub assets: Vec<f64>,
    pub update: Vec<f64>,
}

impl Naive {
    pub fn new(sys: &FinancialSystem) -> Self {
        let ids = sys.sorted_bank_ids().iter().map(|b| b.to_string()).collect::<Vec<_>>();
        let ix = |b: &str| ids.iter().position(|i| i == b).unwrap();
        let external = ids.iter().map(|i| sys.external_assets(i).unwrap()).collect();
        let edges: Vec<Edge> = sys
            .contracts()
            .iter()
            .map(|c| Edge {
                debtor: ix(c.debtor.as_str()),
                creditor: ix(c.creditor.as_str()),
                notional: c.notional,
                reference: match &c.kind {
                    ContractKind::Debt => None,
                    ContractKind::Cds { reference } => Some(ix(reference.as_str())),
                },
                level: c.priority,
            })
            .collect();
        let levels = sys.priority_levels() as usize;
        let mut schedule: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); levels]; ids.len()];
        for (i, e) in edges.iter().enumerate() {
            schedule[e.debtor][e.level as usize - 1].push(i);
        }
        Self {
            ids,
            external,
            edges,
            schedule,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// Banks whose external assets may fall short of their largest possible
    /// liabilities; every other bank has rate 1 at any fixed point.
    pub fn can_default(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| {
                let most: f64 = self.edges.iter().filter(|e| e.debtor == v).map(|e| e.notional).sum();
                most > 0.0 && self.external[v] < most
            })
            .collect()
    }

    pub fn eval(&self, r: &[f64]) -> NaiveEval {
        let n = self.len();
        let owed: Vec<f64> = self
            .edges
            .iter()
            .map(|e| e.notional * e.reference.map_or(1.0, |w| 1.0 - r[w]))
            .collect();
        let mut liabilities = vec![0.0; n];
        for (e, l) in self.edges.iter().zip(&owed) {
            liabilities[e.debtor] += l;
        }
        let mut assets = self.external.clone();
        for v in 0..n {
            let mut budget = r[v] * liabilities[v];
            for here in &self.schedule[v] {
                let due: f64 = here.iter().map(|&i| owed[i]).sum();
                if due <= 0.0 {
                    continue;
                }
                let paid = budget.min(due);
                for &i in here {
                    assets[self.edges[i].creditor] += paid * owed[i] / due;
                }
                budget -= paid;
            }
        }
        let update = (0..n)
            .map(|v| {
                if assets[v] >= liabilities[v] {
                    1.0
                } else {
                    assets[v] / liabilities[v]
                }
            })
            .collect();
        NaiveEval {
            liabilities,
            assets,
            update,
        }
    }

    pub fn residual(&self, r: &[f64]) -> f64 {
        let f = self.eval(r).update;
        f.iter().zip(r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn payoff(&self, r: &[f64], bank: &str) -> f64 {
        let v = self.ids.iter().position(|i| i == bank).unwrap();
        let e = self.eval(r);
        (e.assets[v] - e.liabilities[v]).max(0.0)
    }
}

/// Fixed points found by scanning a `1/steps` grid over the banks that can
/// default, then zooming in from every grid point whose residual is a local
/// minimum below `gate`. The max-norm residual has flat stretches, so each
/// connected plateau of equal minima is zoomed from once.
pub fn grid_oracle(sys: &FinancialSystem, steps: usize) -> Vec<Vec<f64>> {
    let naive = Naive::new(sys);
    let free = naive.can_default();
    let d = free.len();
    assert!(d <= 4, "grid oracle is meant for small systems");
    let h = 1.0 / steps as f64;
    let side = steps + 1;
    let total = side.pow(d as u32);

    let point = |mut k: usize| {
        let mut r = vec![1.0; naive.len()];
        for &v in &free {
            r[v] = (k % side) as f64 * h;
            k /= side;
        }
        r
    };
    let res: Vec<f64> = (0..total).map(|k| naive.residual(&point(k))).collect();

    let gate = 4.0 * h * (1.0 + naive.edges.len() as f64);
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut seen = vec![false; total];
    for k in 0..total {
        if seen[k] || res[k] > gate {
            continue;
        }
        let local_min = neighbours(k, side, d).all(|j| res[j] >= res[k]);
        if !local_min {
            continue;
        }
        let mut stack = vec![k];
        seen[k] = true;
        while let Some(i) = stack.pop() {
            for j in neighbours(i, side, d) {
                if !seen[j] && res[j] == res[k] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if let Some(r) = zoom(&naive, &free, point(k), h) {
            if !found.iter().any(|s| dist(s, &r) < 1e-7) {
                found.push(r);
            }
        }
    }
    found
}

fn neighbours(k: usize, side: usize, d: usize) -> impl Iterator<Item = usize> {
    let mut out = Vec::new();
    let mut stride = 1;
    for _ in 0..d {
        let coord = (k / stride) % side;
        if coord > 0 {
            out.push(k - stride);
        }
        if coord + 1 < side {
            out.push(k + stride);
        }
        stride *= side;
    }
    out.into_iter()
}

/// Repeatedly re-grids a shrinking box (5 points per axis) around the best
/// point seen so far.
fn zoom(naive: &Naive, free: &[usize], mut r: Vec<f64>, mut h: f64) -> Option<Vec<f64>> {
    let d = free.len();
    let mut best = naive.residual(&r);
    while h > 1e-13 && best > 1e-12 {
        let mut next = r.clone();
        for k in 0..5usize.pow(d as u32) {
            let mut t = r.clone();
            let mut kk = k;
            for &v in free {
                let off = (kk % 5) as f64 - 2.0;
                kk /= 5;
                t[v] = (r[v] + off * h / 2.0).clamp(0.0, 1.0);
            }
            let rt = naive.residual(&t);
            if rt < best {
                best = rt;
                next = t;
            }
        }
        r = next;
        h /= 2.0;
    }
    (best <= 1e-9).then_some(r)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn segment_dist(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    // Max-norm distance is bounded by the Euclidean one; use the latter for the projection.
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let len2: f64 = ab.iter().map(|x| x * x).sum();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (p.iter().zip(a).zip(&ab).map(|((p, a), d)| (p - a) * d).sum::<f64>() / len2).clamp(0.0, 1.0)
    };
    let proj: Vec<f64> = a.iter().zip(&ab).map(|(a, d)| a + t * d).collect();
    dist(p, &proj)
}

/// Oracle fixed points not matched by the solver: a point is matched when it
/// lies within `radius` of a reported solution or, for a suspected family,
/// of a segment joining two reported solutions.
pub fn missed(sys: &FinancialSystem, set: &SolutionSet, oracle: &[Vec<f64>], radius: f64) -> Vec<Vec<f64>> {
    let ids = sys.sorted_bank_ids();
    let sols: Vec<Vec<f64>> = set
        .solutions
        .iter()
        .map(|s| ids.iter().map(|b| s.rate(b.as_str())).collect())
        .collect();
    let family = set.multiplicity == finclear::Multiplicity::FamilySuspected;
    oracle
        .iter()
        .filter(|p| {
            let near = sols.iter().any(|s| dist(p, s) <= radius);
            let on_family = family
                && sols.iter().enumerate().any(|(i, a)| {
                    sols[i + 1..].iter().any(|b| segment_dist(p, a, b) <= radius)
                });
            !(near || on_family)
        })
        .cloned()
        .collect()
}

/// A random system passing validation: up to `max_banks` banks,
/// `max_contracts` contracts and `max_levels` priority levels.
pub fn random_system(seed: u64, max_banks: usize, max_contracts: usize, max_levels: u32) -> FinancialSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=max_banks);
    let levels = rng.gen_range(1..=max_levels);
    let mut sys = FinancialSystem::new(levels);
    for i in 0..n {
        let e = if rng.gen_bool(0.3) { 0.0 } else { (rng.gen_range(0.0..4.0) * 8.0f64).round() / 8.0 };
        sys.add_bank(format!("b{i}"), e);
    }
    let m = rng.gen_range(1..=max_contracts);
    let mut debtors: Vec<usize> = Vec::new();
    let amount = |rng: &mut ChaCha8Rng| (rng.gen_range(0.25..4.0) * 8.0f64).round() / 8.0;
    for _ in 0..m {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let p = rng.gen_range(1..=levels);
        let refs: Vec<usize> = debtors.iter().copied().filter(|&w| w != a && w != b).collect();
        if refs.is_empty() || rng.gen_bool(0.5) {
            sys.add_debt_at(format!("b{a}"), format!("b{b}"), amount(&mut rng), p);
            debtors.push(a);
        } else {
            let w = refs[rng.gen_range(0..refs.len())];
            sys.add_cds_at(format!("b{a}"), format!("b{b}"), format!("b{w}"), amount(&mut rng), p);
        }
    }
    sys
}
