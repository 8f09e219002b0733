mod common;

use common::{random_system, Naive};
use finclear::{
    apply_action, clearing_state, find_solutions, liabilities, Action, FinancialSystem,
    RecoveryVector, SolverConfig,
};
use proptest::prelude::*;

fn rates(sys: &FinancialSystem, raw: &[f64]) -> RecoveryVector {
    RecoveryVector::from_pairs(sys.sorted_bank_ids().into_iter().zip(raw.iter().copied()))
}

fn system() -> impl Strategy<Value = (FinancialSystem, Vec<f64>)> {
    (any::<u64>(), prop::collection::vec(0.0..=1.0f64, 7)).prop_map(|(seed, raw)| (random_system(seed, 7, 10, 3), raw))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn update_matches_independent_evaluation((sys, raw) in system()) {
        let r = rates(&sys, &raw);
        let s = clearing_state(&sys, &r).unwrap();
        let naive = Naive::new(&sys);
        let dense: Vec<f64> = sys.sorted_bank_ids().iter().map(|b| r.rate(b.as_str())).collect();
        let e = naive.eval(&dense);
        for (i, id) in naive.ids.iter().enumerate() {
            let f = s.update.rate(id);
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!((f - e.update[i]).abs() < 1e-9, "{id}: {f} vs {}", e.update[i]);
            prop_assert!((s.assets_of(id) - e.assets[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn payments_conserve_and_respect_priority((sys, raw) in system()) {
        let r = rates(&sys, &raw);
        let s = clearing_state(&sys, &r).unwrap();
        let external: f64 = sys.banks().iter().map(|b| b.external_assets).sum();
        let paid: f64 = s.contracts.iter().map(|c| c.payment).sum();
        let assets: f64 = sys.banks().iter().map(|b| s.assets_of(b.id.as_str())).sum();
        prop_assert!((assets - external - paid).abs() < 1e-9);

        for bank in sys.banks() {
            let v = bank.id.as_str();
            let out: Vec<_> = s.contracts.iter().filter(|c| c.debtor.as_str() == v).collect();
            let total: f64 = out.iter().map(|c| c.payment).sum();
            prop_assert!((total - r.rate(v) * s.liability_of(v)).abs() < 1e-9);
            for c in &out {
                prop_assert!(c.payment <= c.liability + 1e-12);
                if c.payment > 1e-12 {
                    // Anything paid at this level means every senior level was paid in full.
                    for senior in out.iter().filter(|d| d.priority < c.priority) {
                        prop_assert!((senior.payment - senior.liability).abs() < 1e-9);
                    }
                }
            }
            if sys.priority_levels() == 1 && s.liability_of(v) > 0.0 {
                for c in &out {
                    prop_assert!((c.payment - r.rate(v) * c.liability).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn liabilities_are_affine_in_recovery((sys, raw) in system(), other in prop::collection::vec(0.0..=1.0f64, 7)) {
        let a = rates(&sys, &raw);
        let b = rates(&sys, &other);
        let mid = rates(&sys, &raw.iter().zip(&other).map(|(x, y)| (x + y) / 2.0).collect::<Vec<_>>());
        let (la, lb, lm) = (liabilities(&sys, &a).unwrap(), liabilities(&sys, &b).unwrap(), liabilities(&sys, &mid).unwrap());
        for id in sys.sorted_bank_ids() {
            let v = id.as_str();
            prop_assert!((lm.total(v) - (la.total(v) + lb.total(v)) / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn actions_leave_their_input_alone((sys, _raw) in system(), amount in 0.0..3.0f64) {
        let before = sys.clone();
        let bank = sys.banks()[0].id.clone();
        let _ = apply_action(&sys, &Action::inject(bank.clone(), amount));
        let _ = apply_action(&sys, &Action::donate(bank, sys.banks()[1].id.clone(), amount));
        if let Some(c) = sys.contracts().iter().find(|c| c.kind.is_debt()) {
            let _ = apply_action(&sys, &Action::reduce_debt(c.id.clone(), 0.5));
            let _ = apply_action(&sys, &Action::reprioritize(c.debtor.clone(), [(c.id.clone(), 1)]));
        }
        prop_assert_eq!(sys, before);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solutions_pay_before_keeping_anything(seed in any::<u64>()) {
        let sys = random_system(seed, 6, 8, 2);
        let cfg = SolverConfig::default();
        let set = find_solutions(&sys, &cfg).unwrap();
        prop_assert!(!set.is_empty());
        for s in &set.solutions {
            for b in sys.banks() {
                let v = b.id.as_str();
                if s.payoff(v) > 1e-9 {
                    prop_assert!((s.rate(v) - 1.0).abs() < 1e-9, "{v} keeps {} at r={}", s.payoff(v), s.rate(v));
                }
            }
        }
        prop_assert_eq!(find_solutions(&sys, &cfg).unwrap(), set);
    }
}
