use dynred_core::amortization::{fit_exponent, keep_rule, CreditLedger};
use dynred_core::instances::{
    gen_cnf, gen_oumv, gen_tcstar, plant_tcstar, validate_tcstar, CnfFormula, OuMvInstance, Slot, TcStarInstance,
};
use dynred_core::oracles::tcstar_oracle;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn oumv_generator_is_deterministic_and_round_trips(n in 1usize..12, density in 0.0f64..=1.0, seed in any::<u64>()) {
        let a = gen_oumv(n, density, seed).unwrap();
        prop_assert_eq!(&a, &gen_oumv(n, density, seed).unwrap());
        prop_assert_eq!(a.n(), n);
        prop_assert_eq!(a.pairs().len(), n);
        prop_assert!(a.pairs().iter().all(|p| p.u.len() == n && p.v.len() == n));
        prop_assert_eq!(OuMvInstance::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn cnf_generator_is_valid(half in 1usize..8, clauses in 0usize..30, width in 1usize..4, seed in any::<u64>()) {
        let vars = 2 * half;
        let width = width.min(vars);
        let f = gen_cnf(vars, clauses, width, seed).unwrap();
        prop_assert_eq!(&f, &gen_cnf(vars, clauses, width, seed).unwrap());
        prop_assert_eq!(f.num_vars(), vars);
        prop_assert_eq!(f.clauses().len(), clauses);
        for c in f.clauses() {
            prop_assert_eq!(c.len(), width);
            let mut seen: Vec<usize> = c.iter().map(|l| l.var).collect();
            seen.sort_unstable();
            seen.dedup();
            prop_assert_eq!(seen.len(), width);
            prop_assert!(c.iter().all(|l| l.var < vars));
        }
        prop_assert_eq!(&CnfFormula::from_dimacs(&f.to_dimacs()).unwrap(), &f);
        prop_assert_eq!(&CnfFormula::from_json(&f.to_json()).unwrap(), &f);
        prop_assert_eq!(&CnfFormula::parse(&f.to_dimacs()).unwrap(), &f);
    }

    #[test]
    fn split_evaluation_agrees_with_full(half in 1usize..6, clauses in 1usize..12, seed in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        let f = gen_cnf(2 * half, clauses, 2, seed).unwrap();
        let mask = (1u64 << half) - 1;
        let (a, b) = (a & mask, b & mask);
        let split = f.clauses().iter().all(|c| f.first_half_satisfies(c, a) || f.second_half_satisfies(c, b));
        prop_assert_eq!(split, f.evaluate(a | b << half));
    }

    #[test]
    fn tcstar_generator_is_valid(n in 1usize..6, delta in 1usize..4, p in 1usize..4, density in 0.0f64..=1.0, seed in any::<u64>()) {
        let inst = gen_tcstar(n, delta, p, density, seed).unwrap();
        prop_assert!(validate_tcstar(&inst).is_ok());
        prop_assert_eq!(&inst, &gen_tcstar(n, delta, p, density, seed).unwrap());
        prop_assert_eq!(&TcStarInstance::from_json(&inst.to_json()).unwrap(), &inst);
    }

    #[test]
    fn planted_target_is_a_witness(n in 1usize..6, delta in 1usize..4, p in 1usize..4, seed in any::<u64>(), t in (0usize..6, 0usize..6, 0usize..6)) {
        let target = (t.0 % n, t.1 % n, t.2 % n);
        let inst = plant_tcstar(n, delta, p, seed, target).unwrap();
        prop_assert!(validate_tcstar(&inst).is_ok());
        let report = tcstar_oracle(&inst).unwrap();
        prop_assert!(report.answer);
        prop_assert!(report.witnesses.contains(&target));
        // any other witness only lost triangles through the deleted pairs
        let (i, a, b) = target;
        let deleted: Vec<_> = (0..delta)
            .map(|j| (Slot::new(a, j, inst.ab(i, j, a)), Slot::new(b, j, inst.ac(i, j, b))))
            .collect();
        for &(wi, wa, wb) in &report.witnesses {
            for j in 0..delta {
                let pair = (Slot::new(wa, j, inst.ab(wi, j, wa)), Slot::new(wb, j, inst.ac(wi, j, wb)));
                prop_assert!(deleted.contains(&pair));
            }
        }
    }

    #[test]
    fn fit_is_scale_invariant(base in prop::collection::vec((1u64..5000, 1u64..100_000), 2..8), factor in 1u64..1000) {
        prop_assume!(base.iter().any(|s| s.0 != base[0].0));
        let scaled: Vec<_> = base.iter().map(|&(x, y)| (x, y * factor)).collect();
        let a = fit_exponent(&base).unwrap();
        let b = fit_exponent(&scaled).unwrap();
        prop_assert!((a.exponent - b.exponent).abs() < 1e-9);
        prop_assert!((a.residual - b.residual).abs() < 1e-9);
    }

    #[test]
    fn ledger_replays_consistently(alpha in 0.05f64..0.95, phases in prop::collection::vec((1u64..200, 1u64..500, 0u64..50_000), 0..40)) {
        let mut ledger = CreditLedger::new(alpha);
        let mut nodes = 0;
        for (ops, grow, cost) in phases {
            nodes += grow;
            let kept = ledger.record_phase(ops, nodes, cost);
            prop_assert_eq!(kept, keep_rule(alpha, ops, nodes, cost));
        }
        prop_assert!(ledger.is_consistent());
        let json = serde_json::to_string(&ledger).unwrap();
        let back: CreditLedger = serde_json::from_str(&json).unwrap();
        prop_assert!(back.is_consistent());
        prop_assert_eq!(back.kept_cost + back.rolled_cost, ledger.phases.iter().map(|p| p.cost).sum::<u64>());
    }
}

#[test]
fn recognised_parse_errors() {
    assert!(CnfFormula::from_dimacs("p cnf 2 1\n1 -3 0\n").is_err());
    assert!(CnfFormula::from_dimacs("p cnf 3 1\n1 2 0\n").is_err());
    assert!(CnfFormula::from_json("{\"schema_version\": 1, \"num_vars\": 2}").is_err());
    assert!(OuMvInstance::from_json("not json").is_err());
    assert!(TcStarInstance::from_json("{}").is_err());
}
