//! Plain-text renderings of traces for the `text` output format.

use std::collections::BTreeSet;
use std::fmt::Write;

use partm::classical::{ClassicalConfig, ComputationTree, Trace};
use partm::entangled::{EParTrace, Superposition};
use partm::paraconsistent::{ParConfig, ParTrace};
use partm::{Machine, SymbolId};

/// `q2@1  0: 0 [1] _`: state, head position, the first cell shown, then the
/// cells with the scanned one in brackets.
pub fn config(m: &Machine, c: &ClassicalConfig) -> String {
    let (lo, hi) = c.span();
    let cells: Vec<String> = (lo..=hi)
        .map(|x| {
            let s = m.symbol_name(c.read(x, m.blank()));
            if x == c.position {
                format!("[{s}]")
            } else {
                s.to_owned()
            }
        })
        .collect();
    format!("{}@{}  {lo}: {}", m.state_name(c.state), c.position, cells.join(" "))
}

pub fn trace(m: &Machine, tr: &Trace) -> String {
    let mut out = String::new();
    for (t, c) in tr.configs.iter().enumerate() {
        let _ = write!(out, "t={t}  {}", config(m, c));
        if let Some(k) = tr.fired.get(t) {
            let _ = write!(out, "  -> i{}", k + 1);
        }
        out.push('\n');
    }
    out.push_str(&status(tr.halted, tr.truncated));
    out
}

fn status(halted: bool, truncated: bool) -> String {
    match (halted, truncated) {
        (true, _) => "halted\n".to_owned(),
        (false, true) => "step budget exhausted\n".to_owned(),
        (false, false) => "stopped\n".to_owned(),
    }
}

pub fn tree(m: &Machine, tree: &ComputationTree) -> String {
    let mut out = String::new();
    let mut stack = vec![(0usize, None::<usize>)];
    while let Some((k, inst)) = stack.pop() {
        let n = &tree.nodes[k];
        let indent = "  ".repeat(n.depth);
        let via = inst.map(|i| format!("i{} ", i + 1)).unwrap_or_default();
        let mark = if n.cut {
            "  (cut)"
        } else if n.is_halted() {
            "  (halt)"
        } else {
            ""
        };
        let _ = writeln!(out, "{indent}{via}{}{mark}", config(m, &n.config));
        stack.extend(n.branches.iter().rev().map(|&(i, c)| (c, Some(i))));
    }
    let _ = writeln!(out, "leaves: {}", tree.leaves().len());
    if tree.truncated {
        out.push_str("step budget exhausted\n");
    }
    out
}

fn symbol_set(m: &Machine, s: &BTreeSet<SymbolId>) -> String {
    let names: Vec<&str> = s.iter().map(|&x| m.symbol_name(x)).collect();
    format!("{{{}}}", names.join(","))
}

pub fn par_config(m: &Machine, c: &ParConfig) -> String {
    let active: Vec<String> = c.active.iter().map(|&(q, p)| format!("({},{p})", m.state_name(q))).collect();
    let cells = match c.span() {
        Some((lo, hi)) => {
            (lo..=hi).map(|x| format!("{x}:{}", symbol_set(m, &c.cell(x, m.blank())))).collect::<Vec<_>>().join(" ")
        }
        None => String::new(),
    };
    format!("active {{{}}}  cells {cells}", active.join(", "))
}

pub fn par_trace(m: &Machine, tr: &ParTrace) -> String {
    let mut out = String::new();
    for (t, c) in tr.configs.iter().enumerate() {
        let _ = write!(out, "t={t}  {}", par_config(m, c));
        if let Some(f) = tr.firings.get(t) {
            let insts: BTreeSet<usize> = f.iter().map(|r| r.inst + 1).collect();
            let list: Vec<String> = insts.iter().map(|i| format!("i{i}")).collect();
            let _ = write!(out, "  fired {}", list.join(" "));
        }
        out.push('\n');
    }
    out.push_str(&status(tr.halted, tr.truncated));
    out
}

pub fn superposition(m: &Machine, sp: &Superposition) -> String {
    let mut out = String::new();
    for (c, n) in &sp.configs {
        let _ = writeln!(out, "    x{n} {}", config(m, c));
    }
    out
}

pub fn epar_trace(m: &Machine, tr: &EParTrace) -> String {
    let mut out = String::new();
    for (t, sp) in tr.snapshots.iter().enumerate() {
        let _ = write!(out, "t={t}  {} configuration(s)", sp.len());
        if let Some(f) = tr.fired.get(t) {
            let list: Vec<String> = f.iter().map(|i| format!("i{}", i + 1)).collect();
            let _ = write!(out, "  fired {}", list.join(" "));
        }
        out.push('\n');
        out.push_str(&superposition(m, sp));
    }
    out.push_str(&status(tr.halted, tr.truncated));
    out
}
