use std::collections::BTreeMap;

use partm::classical::{dtm_run, ndtm_run_all, ClassicalConfig};
use partm::entangled::epartm_run;
use partm::fixtures::{random_input, random_machine, RandomShape};
use partm::paraconsistent::{firing_set, partm_run, partm_step, ParConfig};
use partm::{parse_machine, serialize, validate, Action, Machine, SymbolId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shape(deterministic: bool, mark_rate: f64) -> RandomShape {
    RandomShape { states: 3, symbols: 3, instructions: 7, deterministic, mark_rate }
}

fn sample(seed: u64, s: RandomShape) -> (Machine, Vec<SymbolId>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_machine(&mut rng, s);
    let input = random_input(&mut rng, &m, 3);
    (m, input)
}

fn multiset<'a>(it: impl IntoIterator<Item = &'a ClassicalConfig>) -> BTreeMap<ClassicalConfig, usize> {
    let mut out = BTreeMap::new();
    for c in it {
        *out.entry(c.clone()).or_insert(0) += 1;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dsl_round_trip(seed in any::<u64>(), marks in prop::bool::ANY) {
        let (m, _) = sample(seed, shape(false, if marks { 0.3 } else { 0.0 }));
        prop_assert_eq!(parse_machine(&serialize(&m)).unwrap(), m);
    }

    #[test]
    fn deterministic_machines_collapse(seed in any::<u64>()) {
        let (m, input) = sample(seed, shape(true, 0.0));
        prop_assert!(validate(&m).deterministic);
        let d = dtm_run(&m, &input, 8).unwrap();
        let p = partm_run(&m, &input, 8);
        let e = epartm_run(&m, &input, 8);
        prop_assert_eq!(d.configs.len(), p.configs.len());
        prop_assert_eq!(d.configs.len(), e.snapshots.len());
        for (t, c) in d.configs.iter().enumerate() {
            prop_assert_eq!(&p.configs[t], &ParConfig::from_classical(c));
            prop_assert_eq!(e.snapshots[t].configs.len(), 1);
            prop_assert_eq!(e.snapshots[t].distinct().next().unwrap(), c);
        }
        prop_assert_eq!(d.halted, p.halted);
    }

    #[test]
    fn partm_over_approximates_every_branch(seed in any::<u64>()) {
        let (m, input) = sample(seed, shape(false, 0.0));
        let tree = ndtm_run_all(&m, &input, 6).unwrap();
        let p = partm_run(&m, &input, 6);
        for (t, cfg) in p.configs.iter().enumerate() {
            for c in tree.level(t) {
                prop_assert!(cfg.admits(c, m.blank()), "t={} {:?}", t, c);
            }
        }
        // A branch alive at t keeps the paraconsistent run alive at t.
        prop_assert!(tree.level(p.configs.len()).is_empty());
    }

    #[test]
    fn entangled_leaves_are_the_tree_leaves(seed in any::<u64>()) {
        let (m, input) = sample(seed, shape(false, 0.0));
        let tree = ndtm_run_all(&m, &input, 8).unwrap();
        let e = epartm_run(&m, &input, 8);
        let t = e.snapshots.len() - 1;
        let expected = multiset(
            tree.nodes
                .iter()
                .filter(|n| (n.is_halted() && n.depth < t) || n.depth == t)
                .map(|n| &n.config),
        );
        prop_assert_eq!(&e.last().configs, &expected);
        if !tree.truncated {
            prop_assert_eq!(&e.last().configs, &multiset(tree.leaves()));
        }
    }

    #[test]
    fn firing_is_monotone_without_marks(seed in any::<u64>(), extra in 0usize..3, pos in -2i64..3) {
        let (m, input) = sample(seed, shape(false, 0.0));
        let p = partm_run(&m, &input, 4);
        let small = p.last().clone();
        let mut big = small.clone();
        let mut cell = big.cell(pos, m.blank());
        cell.insert(SymbolId(extra));
        big.set_cell(pos, cell, m.blank());
        big.active.insert((m.start_state(), pos));
        let a = firing_set(&m, &small);
        let b = firing_set(&m, &big);
        for f in &a {
            prop_assert!(b.contains(f));
        }
    }

    #[test]
    fn untouched_cells_are_carried(seed in any::<u64>(), marks in prop::bool::ANY) {
        let (m, input) = sample(seed, shape(false, if marks { 0.3 } else { 0.0 }));
        let mut c = ParConfig::initial(&m, &input);
        for _ in 0..6 {
            let Some((next, fired)) = partm_step(&m, &c) else { break };
            let (lo, hi) = c.span().unwrap_or((0, 0));
            for x in lo - 2..=hi + 2 {
                let written = fired
                    .iter()
                    .any(|f| f.position == x && matches!(m.instructions()[f.inst].action, Action::Write(_)));
                if !written {
                    prop_assert_eq!(next.cell(x, m.blank()), c.cell(x, m.blank()), "cell {}", x);
                }
            }
            c = next;
        }
    }
}

#[test]
fn corpus_is_not_degenerate() {
    let (mut branching, mut long) = (0, 0);
    for seed in 0..200 {
        let (m, input) = sample(seed, shape(false, 0.0));
        let tree = ndtm_run_all(&m, &input, 8).unwrap();
        branching += usize::from(tree.nodes.iter().any(|n| n.branches.len() > 1));
        long += usize::from(tree.max_depth() >= 3);
    }
    assert!(branching >= 50, "{branching}");
    assert!(long >= 50, "{long}");
}
