//! Canonical JSON forms of traces and reports.
//!
//! Cell maps are keyed by the decimal position and list only cells that are
//! not blank. Instruction numbers are 1-based, matching `i1`, `i2`, ... in
//! machine listings. Every map is built in sorted order, so equal inputs
//! give byte-identical output.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::classical::{ClassicalConfig, ComputationTree, Trace};
use crate::entangled::{EParTrace, Superposition};
use crate::machine::{Machine, SymbolId};
use crate::paraconsistent::{FiringRecord, ParConfig, ParTrace};
use crate::track::EquivalenceReport;

fn classical_cells(m: &Machine, tape: &BTreeMap<i64, SymbolId>) -> Value {
    let mut cells = Map::new();
    for (&p, &s) in tape {
        if s != m.blank() {
            cells.insert(p.to_string(), json!(m.symbol_name(s)));
        }
    }
    Value::Object(cells)
}

fn par_cells(m: &Machine, tape: &BTreeMap<i64, BTreeSet<SymbolId>>) -> Value {
    let mut cells = Map::new();
    for (&p, set) in tape {
        let syms: Vec<&str> = set.iter().map(|&s| m.symbol_name(s)).collect();
        cells.insert(p.to_string(), json!(syms));
    }
    Value::Object(cells)
}

pub fn config(m: &Machine, t: usize, c: &ClassicalConfig) -> Value {
    json!({
        "t": t,
        "state": m.state_name(c.state),
        "pos": c.position,
        "cells": classical_cells(m, &c.tape),
    })
}

/// `{"halted", "truncated", "steps": [config], "fired": [inst]}`.
pub fn trace(m: &Machine, tr: &Trace) -> Value {
    let steps: Vec<Value> = tr.configs.iter().enumerate().map(|(t, c)| config(m, t, c)).collect();
    let fired: Vec<usize> = tr.fired.iter().map(|k| k + 1).collect();
    json!({
        "halted": tr.halted,
        "truncated": tr.truncated,
        "steps": steps,
        "fired": fired,
    })
}

fn tree_node(m: &Machine, tree: &ComputationTree, k: usize) -> Value {
    let n = &tree.nodes[k];
    let mut v = config(m, n.depth, &n.config);
    let branches: Vec<Value> =
        n.branches.iter().map(|&(inst, child)| json!({"inst": inst + 1, "node": tree_node(m, tree, child)})).collect();
    let obj = v.as_object_mut().expect("config is an object");
    if n.cut {
        obj.insert("cut".into(), json!(true));
    }
    obj.insert("branches".into(), Value::Array(branches));
    v
}

/// The root node with children nested under `"branches"`.
pub fn tree(m: &Machine, tree: &ComputationTree) -> Value {
    json!({
        "truncated": tree.truncated,
        "root": tree_node(m, tree, 0),
    })
}

pub fn par_config(m: &Machine, t: usize, c: &ParConfig) -> Value {
    let active: Vec<Value> = c.active.iter().map(|&(q, p)| json!([m.state_name(q), p])).collect();
    json!({
        "t": t,
        "active": active,
        "cells": par_cells(m, &c.tape),
    })
}

pub fn firings(m: &Machine, t: usize, fired: &[FiringRecord]) -> Value {
    let mut recs: Vec<&FiringRecord> = fired.iter().collect();
    recs.sort_by_key(|r| (r.inst, r.state, r.position, r.symbol));
    let list: Vec<Value> = recs
        .iter()
        .map(|r| {
            json!({
                "inst": r.inst + 1,
                "state": m.state_name(r.state),
                "pos": r.position,
                "sym": m.symbol_name(r.symbol),
            })
        })
        .collect();
    json!({"t": t, "fired": list})
}

/// `{"halted", "truncated", "steps": [par_config], "firings": [log]}`; the
/// firing log entry for `t` produced snapshot `t + 1`.
pub fn par_trace(m: &Machine, tr: &ParTrace) -> Value {
    let steps: Vec<Value> = tr.configs.iter().enumerate().map(|(t, c)| par_config(m, t, c)).collect();
    let log: Vec<Value> = tr.firings.iter().enumerate().map(|(t, f)| firings(m, t, f)).collect();
    json!({
        "halted": tr.halted,
        "truncated": tr.truncated,
        "steps": steps,
        "firings": log,
    })
}

pub fn superposition(m: &Machine, t: usize, sp: &Superposition) -> Value {
    let configs: Vec<Value> = sp
        .configs
        .iter()
        .map(|(c, &count)| {
            json!({
                "state": m.state_name(c.state),
                "pos": c.position,
                "cells": classical_cells(m, &c.tape),
                "count": count,
            })
        })
        .collect();
    json!({"t": t, "configs": configs})
}

/// `{"halted", "truncated", "steps": [superposition], "fired": [[inst]]}`.
pub fn epar_trace(m: &Machine, tr: &EParTrace) -> Value {
    let steps: Vec<Value> = tr.snapshots.iter().enumerate().map(|(t, sp)| superposition(m, t, sp)).collect();
    let fired: Vec<Vec<usize>> = tr.fired.iter().map(|s| s.iter().map(|k| k + 1).collect()).collect();
    json!({
        "halted": tr.halted,
        "truncated": tr.truncated,
        "steps": steps,
        "fired": fired,
    })
}

pub fn equivalence(r: &EquivalenceReport) -> Value {
    json!({
        "tracks": r.tracks,
        "matched": r.matched,
        "all_matched": r.all_matched(),
        "first_mismatch": r.first_mismatch,
        "steps_per_cycle": r.steps_per_cycle,
        "adjusted_steps_per_cycle": r.adjusted_steps_per_cycle,
        "halting_steps": r.halting_steps,
        "total_steps": r.total_steps(),
        "source_halted": r.source_halted,
        "compiled_halted": r.compiled_halted,
        "initial_width": r.initial_width,
        "fit": {"c": r.fit_c, "d": r.fit_d},
        "quadratic_c": r.quadratic_c,
        "analytic_ok": r.analytic_ok,
        "control_states": r.control_states,
        "tuple_symbols": r.tuple_symbols,
        "materialized_agrees": r.materialized_agrees,
        "verdict": r.verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{dtm_run, ndtm_run_all};
    use crate::entangled::epartm_run;
    use crate::fixtures;
    use crate::paraconsistent::partm_run;

    #[test]
    fn figure_one_snapshot_shape() {
        let m = fixtures::example1();
        let tr = partm_run(&m, &m.parse_input("0").unwrap(), 100);
        let v = par_trace(&m, &tr);
        assert_eq!(v["steps"][0], json!({"t": 0, "active": [["q1", 0]], "cells": {"0": ["0"]}}));
        assert_eq!(v["steps"][1]["cells"]["0"], json!(["0", "1"]));
        assert_eq!(v["firings"][0]["fired"][0]["inst"], json!(1));
        assert_eq!(v["firings"][0]["fired"][1]["inst"], json!(2));
    }

    #[test]
    fn classical_forms() {
        let m = fixtures::flipper();
        let input = m.parse_input("01").unwrap();
        let v = trace(&m, &dtm_run(&m, &input, 50).unwrap());
        assert_eq!(v["steps"][0]["t"], json!(0));
        assert_eq!(v["steps"][0]["pos"], json!(0));
        assert!(v["halted"].as_bool().unwrap());

        let f = fixtures::example1_unmarked();
        let t = tree(&f, &ndtm_run_all(&f, &f.parse_input("0").unwrap(), 50).unwrap());
        assert_eq!(t["root"]["branches"].as_array().unwrap().len(), 2);
        assert_eq!(t["root"]["branches"][1]["inst"], json!(2));
    }

    #[test]
    fn superposition_counts() {
        let m = fixtures::example1();
        let tr = epartm_run(&m, &m.parse_input("0").unwrap(), 100);
        let v = epar_trace(&m, &tr);
        let configs = v["steps"][1]["configs"].as_array().unwrap();
        assert_eq!(configs.len(), 2);
        assert!(configs.iter().all(|c| c["count"] == json!(1)));
        assert_eq!(v["fired"][0], json!([1, 2]));
    }

    #[test]
    fn output_is_deterministic() {
        let m = fixtures::example1();
        let input = m.parse_input("0").unwrap();
        let a = par_trace(&m, &partm_run(&m, &input, 100)).to_string();
        let b = par_trace(&m, &partm_run(&m, &input, 100)).to_string();
        assert_eq!(a, b);
    }
}
