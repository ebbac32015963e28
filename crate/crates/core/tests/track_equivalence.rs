use std::collections::{BTreeMap, BTreeSet};

use partm::fixtures;
use partm::paraconsistent::ParConfig;
use partm::track::{compile_partm_to_dtm, simulate_and_compare, CompileOptions};
use partm::{StateId, SymbolId};
use proptest::prelude::*;

#[test]
fn every_fixture_matches_for_twenty_five_steps() {
    for (name, m) in fixtures::all() {
        let input = m.parse_input(fixtures::default_input(name).unwrap()).unwrap();
        let r = simulate_and_compare(&m, &input, 25, CompileOptions::default()).unwrap();
        assert!(r.all_matched(), "{name}: first mismatch {:?}", r.first_mismatch);
        assert!(r.analytic_ok, "{name}: {:?}", r.steps_per_cycle);
        assert!(r.materialized_agrees, "{name}");
        for (t, &s) in r.steps_per_cycle.iter().enumerate() {
            assert!(s <= r.fit_c * t + r.fit_d);
        }
        if !r.source_halted {
            assert_eq!(r.steps_per_cycle.len(), 25, "{name}");
        }
    }
}

#[test]
fn walker_window_grows_and_cycles_stay_linear() {
    let m = fixtures::walker();
    let r = simulate_and_compare(&m, &[], 30, CompileOptions::default()).unwrap();
    assert!(r.all_matched());
    assert!(!r.source_halted);
    let first = r.steps_per_cycle[0];
    let last = *r.steps_per_cycle.last().unwrap();
    assert!(last > first, "window should widen: {first} -> {last}");
    for (t, &s) in r.steps_per_cycle.iter().enumerate() {
        assert!(s <= 16 * t + 8 * r.initial_width + 26);
    }
    let total: usize = r.steps_per_cycle.iter().sum();
    assert!(total as f64 <= r.quadratic_c * 900.0 + 1e-9);
}

#[test]
fn deterministic_cycles_cost_the_same() {
    let m = fixtures::flipper();
    let input = m.parse_input("0110100").unwrap();
    let r = simulate_and_compare(&m, &input, 10, CompileOptions::default()).unwrap();
    assert!(r.all_matched());
    assert_eq!(r.steps_per_cycle.len(), 10);
    // The window is fixed by the input, so every cycle costs about the same.
    let min = *r.steps_per_cycle.iter().min().unwrap();
    let max = *r.steps_per_cycle.iter().max().unwrap();
    assert!(max - min <= 8, "{:?}", r.steps_per_cycle);
}

fn arb_config() -> impl Strategy<Value = ParConfig> {
    // Example 1 has 5 states and 4 symbols.
    let cell = prop::collection::btree_set(0usize..4, 1..=4);
    (prop::collection::btree_set((0usize..5, -4i64..5), 1..5), prop::collection::btree_map(-4i64..5, cell, 0..8))
        .prop_map(|(active, tape)| {
            let mut c =
                ParConfig { active: active.into_iter().map(|(q, p)| (StateId(q), p)).collect(), tape: BTreeMap::new() };
            for (p, syms) in tape {
                let set: BTreeSet<SymbolId> = syms.into_iter().map(SymbolId).collect();
                c.set_cell(p, set, SymbolId(0));
            }
            c
        })
}

proptest! {
    #[test]
    fn encode_then_decode_is_identity(c in arb_config()) {
        let m = fixtures::example1();
        prop_assert_eq!(m.blank(), SymbolId(0));
        let mut dtm = compile_partm_to_dtm(&m, CompileOptions::default()).unwrap();
        let (_, tape) = dtm.encode(&c).unwrap();
        prop_assert_eq!(dtm.decode(&tape).unwrap(), c);
    }
}
