use partm::axioms::check::{model_check_window, AxiomStatus, TraceModel};
use partm::axioms::text::{parse_structured, serialize_theory, Format};
use partm::axioms::witness::contradiction_witness;
use partm::axioms::{axiom_count, emit_theory, Variant};
use partm::classical::{dtm_run, ndtm_run_all};
use partm::fixtures::{random_input, random_machine, RandomShape};
use partm::{Machine, SymbolId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample(seed: u64, deterministic: bool, mark_rate: f64) -> (Machine, Vec<SymbolId>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = RandomShape { states: 3, symbols: 3, instructions: 6, deterministic, mark_rate };
    let m = random_machine(&mut rng, shape);
    let input = random_input(&mut rng, &m, 3);
    (m, input)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn structured_text_round_trips(seed in any::<u64>(), v in 0usize..3) {
        let variant = [Variant::Fol, Variant::Lfi1, Variant::S5][v];
        let (m, input) = sample(seed, false, 0.3);
        let theory = emit_theory(&m, &input, variant);
        prop_assert_eq!(theory.len(), axiom_count(&m));
        let back = parse_structured(&serialize_theory(&theory, Format::Structured)).unwrap();
        prop_assert_eq!(back, theory);
    }

    #[test]
    fn deterministic_runs_satisfy_their_theory(seed in any::<u64>()) {
        let (m, input) = sample(seed, true, 0.0);
        let trace = dtm_run(&m, &input, 8).unwrap();
        let model = TraceModel::from_trace(&m, &trace);
        let theory = emit_theory(&m, &input, Variant::Fol);
        let report = model_check_window(&theory, &model, model.window()).unwrap();
        prop_assert!(report.failures().is_empty(), "{:?}", report.failures());
        if trace.halted {
            prop_assert!(report.all_pass());
        }
    }

    #[test]
    fn dropping_a_state_fact_is_detected(seed in any::<u64>()) {
        let (m, input) = sample(seed, true, 0.0);
        let trace = dtm_run(&m, &input, 8).unwrap();
        prop_assume!(trace.configs.len() >= 2);
        let mut model = TraceModel::from_trace(&m, &trace);
        let c = &trace.configs[1];
        prop_assert!(model.remove_q(m.state_name(c.state), 1, c.position));
        let theory = emit_theory(&m, &input, Variant::Fol);
        let report = model_check_window(&theory, &model, model.window()).unwrap();
        let culprit = format!("Ai{}", trace.fired[0] + 1);
        prop_assert!(matches!(report.get(&culprit), Some(AxiomStatus::Fail { .. })), "{:?}", report.get(&culprit));
    }

    #[test]
    fn classical_divergence_yields_a_certified_witness(seed in any::<u64>()) {
        let (m, input) = sample(seed, false, 0.0);
        let tree = ndtm_run_all(&m, &input, 6).unwrap();
        let diverges = tree.nodes.iter().any(|n| {
            n.branches.iter().any(|&(_, a)| n.branches.iter().any(|&(_, b)| tree.nodes[a].config != tree.nodes[b].config))
        });
        let search = contradiction_witness(&m, &input, 6);
        if diverges {
            prop_assert!(search.witness.is_some(), "a divergent branch point produces a witness");
        }
        if let Some(w) = search.witness {
            prop_assert!(w.certified);
        }
    }
}
