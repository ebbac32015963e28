//! Ground model checking of first-order theories against harvested traces.
//!
//! A [`TraceModel`] is the finite structure read off a run: integers with the
//! standard `<` and successor, and `Q`/`S` facts for every time step of the
//! trace and every cell of a window `H`. Outside the trace, times before zero
//! carry no facts and, for a halted run, neither do times after the last
//! step. Anything else outside the harvested region is unknown, so formulas
//! are evaluated in Kleene's three-valued logic and an unknown verdict is
//! reported as partial rather than guessed.
//!
//! Universal quantifiers range over the interior of `H` and existentials over
//! all of `H`, so a successor term applied to an interior point stays inside.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::text::formula_text;
use super::{Formula, PredSym, Term, Theory, Variant};
use crate::classical::Trace;
use crate::machine::Machine;
use crate::paraconsistent::ParTrace;

/// Inclusive cell/time window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceModel {
    /// State name to the set of `(t, x)` where it holds.
    pub q: BTreeMap<String, BTreeSet<(i64, i64)>>,
    /// Symbol name to the set of `(t, x)` where it holds.
    pub s: BTreeMap<String, BTreeSet<(i64, i64)>>,
    pub last_time: i64,
    /// The run halted at `last_time`, so later times carry no facts.
    pub complete: bool,
    /// Cells for which facts were harvested.
    pub cells: Window,
}

fn harvest_window(last_time: i64, lo_cell: i64, hi_cell: i64) -> Window {
    Window { lo: lo_cell.min(-1) - 2, hi: hi_cell.max(last_time + 1) + 2 }
}

impl TraceModel {
    fn empty(machine: &Machine, last_time: i64, complete: bool, cells: Window) -> Self {
        TraceModel {
            q: machine.states().iter().map(|n| (n.clone(), BTreeSet::new())).collect(),
            s: machine.alphabet().iter().map(|n| (n.clone(), BTreeSet::new())).collect(),
            last_time,
            complete,
            cells,
        }
    }

    /// Harvests the structure of a classical run.
    pub fn from_trace(machine: &Machine, trace: &Trace) -> Self {
        let (mut lo, mut hi) = (0i64, 0i64);
        for c in &trace.configs {
            let (a, b) = c.span();
            lo = lo.min(a).min(c.position);
            hi = hi.max(b).max(c.position);
        }
        let last = trace.configs.len() as i64 - 1;
        let cells = harvest_window(last, lo, hi);
        let mut m = Self::empty(machine, last, trace.halted, cells);
        let blank = machine.blank();
        for (t, c) in trace.configs.iter().enumerate() {
            let t = t as i64;
            m.add_q(machine.state_name(c.state), t, c.position);
            for x in cells.lo..=cells.hi {
                m.add_s(machine.symbol_name(c.read(x, blank)), t, x);
            }
        }
        m
    }

    /// Harvests the structure of a paraconsistent run; facts may be
    /// multi-valued.
    pub fn from_par_trace(machine: &Machine, trace: &ParTrace) -> Self {
        let (mut lo, mut hi) = (0i64, 0i64);
        for c in &trace.configs {
            if let Some((a, b)) = c.span() {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        let last = trace.configs.len() as i64 - 1;
        let cells = harvest_window(last, lo, hi);
        let mut m = Self::empty(machine, last, trace.halted, cells);
        let blank = machine.blank();
        for (t, c) in trace.configs.iter().enumerate() {
            let t = t as i64;
            for &(q, p) in &c.active {
                m.add_q(machine.state_name(q), t, p);
            }
            for x in cells.lo..=cells.hi {
                for sym in c.cell(x, blank) {
                    m.add_s(machine.symbol_name(sym), t, x);
                }
            }
        }
        m
    }

    fn add_q(&mut self, name: &str, t: i64, x: i64) {
        self.q.entry(name.to_owned()).or_default().insert((t, x));
    }

    fn add_s(&mut self, name: &str, t: i64, x: i64) {
        self.s.entry(name.to_owned()).or_default().insert((t, x));
    }

    /// Deletes a state fact; returns whether it was present.
    pub fn remove_q(&mut self, state: &str, t: i64, x: i64) -> bool {
        self.q.get_mut(state).is_some_and(|set| set.remove(&(t, x)))
    }

    pub fn holds_q(&self, state: &str, t: i64, x: i64) -> bool {
        self.q.get(state).is_some_and(|set| set.contains(&(t, x)))
    }

    pub fn holds_s(&self, symbol: &str, t: i64, x: i64) -> bool {
        self.s.get(symbol).is_some_and(|set| set.contains(&(t, x)))
    }

    /// The default quantifier window: every harvested cell.
    pub fn window(&self) -> Window {
        self.cells
    }

    fn atom(&self, table: &BTreeMap<String, BTreeSet<(i64, i64)>>, name: &str, t: i64, x: i64) -> Tv {
        if t < 0 || (self.complete && t > self.last_time) {
            return Tv::F;
        }
        if t > self.last_time || !self.cells.contains(x) {
            return Tv::U;
        }
        Tv::from(table.get(name).is_some_and(|set| set.contains(&(t, x))))
    }
}

/// Kleene truth values, ordered `F < U < T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Tv {
    F,
    U,
    T,
}

impl From<bool> for Tv {
    fn from(b: bool) -> Self {
        if b {
            Tv::T
        } else {
            Tv::F
        }
    }
}

impl Tv {
    fn not(self) -> Tv {
        match self {
            Tv::F => Tv::T,
            Tv::U => Tv::U,
            Tv::T => Tv::F,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomStatus {
    Pass,
    /// Bindings of the outer universal quantifiers at the first
    /// falsifying instance.
    Fail {
        instance: Vec<(String, i64)>,
    },
    /// No instance fails, but this one could not be decided inside the window.
    Partial {
        instance: Vec<(String, i64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatisfactionReport {
    pub results: Vec<(String, AxiomStatus)>,
}

impl SatisfactionReport {
    pub fn get(&self, id: &str) -> Option<&AxiomStatus> {
        self.results.iter().find(|(k, _)| k == id).map(|(_, s)| s)
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|(_, s)| *s == AxiomStatus::Pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.results.iter().filter(|(_, s)| matches!(s, AxiomStatus::Fail { .. })).map(|(k, _)| k.as_str()).collect()
    }

    pub fn to_json(&self) -> Value {
        let mut out = Map::new();
        for (id, st) in &self.results {
            let bind = |inst: &[(String, i64)]| -> Value {
                Value::Object(inst.iter().map(|(v, n)| (v.clone(), json!(n))).collect())
            };
            let v = match st {
                AxiomStatus::Pass => json!({"status": "pass"}),
                AxiomStatus::Fail { instance } => json!({"status": "fail", "instance": bind(instance)}),
                AxiomStatus::Partial { instance } => json!({"status": "partial", "instance": bind(instance)}),
            };
            out.insert(id.clone(), v);
        }
        Value::Object(out)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error("model checking needs a FOL theory, got {0}")]
    NotClassical(Variant),
    #[error("window [{lo}, {hi}] does not cover the harvested cells")]
    WindowTooSmall { lo: i64, hi: i64 },
}

struct Eval<'a> {
    model: &'a TraceModel,
    window: Window,
}

impl Eval<'_> {
    fn term(&self, t: &Term, env: &[(&str, i64)]) -> i64 {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|&(_, val)| val)
                .unwrap_or_else(|| panic!("free variable {v}")),
            Term::Zero => 0,
            Term::Succ(a) => self.term(a, env) + 1,
        }
    }

    fn formula<'f>(&self, f: &'f Formula, env: &mut Vec<(&'f str, i64)>) -> Tv {
        use Formula::*;
        match f {
            Pred(p, ts) => {
                let a = self.term(&ts[0], env);
                let b = self.term(&ts[1], env);
                match p {
                    PredSym::Less => Tv::from(a < b),
                    PredSym::Eq => Tv::from(a == b),
                    PredSym::Q(n) => self.model.atom(&self.model.q, n, a, b),
                    PredSym::S(n) => self.model.atom(&self.model.s, n, a, b),
                }
            }
            Not(a, _) => self.formula(a, env).not(),
            And(a, b, _) => {
                let l = self.formula(a, env);
                if l == Tv::F {
                    return Tv::F;
                }
                l.min(self.formula(b, env))
            }
            Or(a, b) => {
                let l = self.formula(a, env);
                if l == Tv::T {
                    return Tv::T;
                }
                l.max(self.formula(b, env))
            }
            Implies(a, b) => {
                let l = self.formula(a, env).not();
                if l == Tv::T {
                    return Tv::T;
                }
                l.max(self.formula(b, env))
            }
            Iff(a, b) => {
                let (l, r) = (self.formula(a, env), self.formula(b, env));
                l.min(r).max(l.not().min(r.not()))
            }
            Forall(v, a) => self.quantify(v, a, env, true),
            Exists(v, a) => self.quantify(v, a, env, false),
            Possibly(a) | Incons(a) => self.formula(a, env),
            Verum => Tv::T,
            Falsum => Tv::F,
        }
    }

    fn quantify<'f>(&self, v: &'f str, body: &'f Formula, env: &mut Vec<(&'f str, i64)>, all: bool) -> Tv {
        let (lo, hi) = if all { (self.window.lo + 1, self.window.hi - 1) } else { (self.window.lo, self.window.hi) };
        let mut acc = if all { Tv::T } else { Tv::F };
        for n in lo..=hi {
            env.push((v, n));
            let r = self.formula(body, env);
            env.pop();
            acc = if all { acc.min(r) } else { acc.max(r) };
            if (all && acc == Tv::F) || (!all && acc == Tv::T) {
                break;
            }
        }
        acc
    }

    /// Enumerates the outer universal prefix and reports the first failing
    /// instance, or else the first undecided one.
    fn axiom(&self, f: &Formula) -> AxiomStatus {
        let mut vars = Vec::new();
        let mut body = f;
        while let Formula::Forall(v, a) = body {
            vars.push(v.as_str());
            body = a;
        }
        let (lo, hi) = (self.window.lo + 1, self.window.hi - 1);
        let mut values = vec![lo; vars.len()];
        let mut first_unknown = None;
        if lo > hi && !vars.is_empty() {
            return AxiomStatus::Pass;
        }
        loop {
            let mut env: Vec<(&str, i64)> = vars.iter().copied().zip(values.iter().copied()).collect();
            let r = self.formula(body, &mut env);
            let named = || vars.iter().map(|v| v.to_string()).zip(values.iter().copied()).collect();
            match r {
                Tv::F => return AxiomStatus::Fail { instance: named() },
                Tv::U if first_unknown.is_none() => first_unknown = Some(named()),
                _ => {}
            }
            // Odometer over the prefix, last variable fastest.
            let mut k = vars.len();
            loop {
                if k == 0 {
                    return match first_unknown {
                        Some(instance) => AxiomStatus::Partial { instance },
                        None => AxiomStatus::Pass,
                    };
                }
                k -= 1;
                if values[k] < hi {
                    values[k] += 1;
                    for v in &mut values[k + 1..] {
                        *v = lo;
                    }
                    break;
                }
            }
        }
    }
}

/// Evaluates each axiom of a FOL theory in `model` with quantifiers
/// relativized to `window`.
pub fn model_check_window(
    theory: &Theory,
    model: &TraceModel,
    window: Window,
) -> Result<SatisfactionReport, CheckError> {
    if theory.variant != Variant::Fol {
        return Err(CheckError::NotClassical(theory.variant));
    }
    let facts = model.q.values().chain(model.s.values()).flatten();
    let covered = facts.clone().all(|&(_, x)| window.contains(x)) && window.lo <= -1 && window.hi >= model.last_time;
    if !covered {
        return Err(CheckError::WindowTooSmall { lo: window.lo, hi: window.hi });
    }
    let ev = Eval { model, window };
    let results = theory.axioms.iter().map(|(id, f)| (id.clone(), ev.axiom(f))).collect();
    Ok(SatisfactionReport { results })
}

/// Evaluates a closed formula; `None` when undecided in the window.
pub fn evaluate(formula: &Formula, model: &TraceModel, window: Window) -> Option<bool> {
    let ev = Eval { model, window };
    match ev.formula(formula, &mut Vec::new()) {
        Tv::T => Some(true),
        Tv::F => Some(false),
        Tv::U => None,
    }
}

/// Renders a failing instance as `t=0, x=1`.
pub fn describe_instance(instance: &[(String, i64)]) -> String {
    instance.iter().map(|(v, n)| format!("{v}={n}")).collect::<Vec<_>>().join(", ")
}

/// The ground axiom at an instance, for diagnostics.
pub fn instance_text(f: &Formula, instance: &[(String, i64)]) -> String {
    let mut body = f;
    while let Formula::Forall(_, a) = body {
        body = a;
    }
    format!("[{}] {}", describe_instance(instance), formula_text(body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{emit_theory, Variant};
    use crate::classical::dtm_run;
    use crate::fixtures;

    fn check(name: &str) -> SatisfactionReport {
        let m = fixtures::source(name).map(|s| crate::parse_machine(s).unwrap()).unwrap();
        let input = m.parse_input(fixtures::default_input(name).unwrap()).unwrap();
        let trace = dtm_run(&m, &input, 200).unwrap();
        let th = emit_theory(&m, &input, Variant::Fol);
        let model = TraceModel::from_trace(&m, &trace);
        model_check_window(&th, &model, model.window()).unwrap()
    }

    #[test]
    fn deterministic_fixtures_satisfy_their_theory() {
        for name in ["flipper", "counter", "anomaly", "empty"] {
            let r = check(name);
            assert!(
                r.all_pass(),
                "{name}: {:?}",
                r.results.iter().filter(|(_, s)| *s != AxiomStatus::Pass).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn deleting_a_state_fact_breaks_the_fired_instruction() {
        let m = fixtures::flipper();
        let input = m.parse_input("0110").unwrap();
        let trace = dtm_run(&m, &input, 200).unwrap();
        let th = emit_theory(&m, &input, Variant::Fol);
        let mut model = TraceModel::from_trace(&m, &trace);
        let c1 = &trace.configs[1];
        assert!(model.remove_q(m.state_name(c1.state), 1, c1.position));
        let r = model_check_window(&th, &model, model.window()).unwrap();
        let id = format!("Ai{}", trace.fired[0] + 1);
        match r.get(&id).unwrap() {
            AxiomStatus::Fail { instance } => {
                assert_eq!(instance[0], ("t".to_string(), 0));
                assert_eq!(instance[1], ("x".to_string(), trace.configs[0].position));
            }
            other => panic!("{id}: {other:?}"),
        }
        assert_eq!(r.failures(), vec![id.as_str()]);
    }

    #[test]
    fn truncated_runs_are_partial_not_failing() {
        let m = fixtures::flipper();
        let input = m.parse_input("0110").unwrap();
        let trace = dtm_run(&m, &input, 2).unwrap();
        assert!(trace.truncated);
        let th = emit_theory(&m, &input, Variant::Fol);
        let model = TraceModel::from_trace(&m, &trace);
        let r = model_check_window(&th, &model, model.window()).unwrap();
        assert!(r.failures().is_empty());
        assert!(r.results.iter().any(|(_, s)| matches!(s, AxiomStatus::Partial { .. })));
        assert_eq!(r.get("A5"), Some(&AxiomStatus::Pass));
    }

    #[test]
    fn rejects_non_classical_and_small_windows() {
        let m = fixtures::flipper();
        let trace = dtm_run(&m, &[], 10).unwrap();
        let model = TraceModel::from_trace(&m, &trace);
        let th = emit_theory(&m, &[], Variant::S5);
        assert_eq!(model_check_window(&th, &model, model.window()), Err(CheckError::NotClassical(Variant::S5)));
        let th = emit_theory(&m, &[], Variant::Fol);
        assert!(matches!(
            model_check_window(&th, &model, Window { lo: 0, hi: 0 }),
            Err(CheckError::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn report_json_is_keyed_by_axiom() {
        let r = check("flipper");
        let v = r.to_json();
        assert_eq!(v["A1"]["status"], "pass");
        assert_eq!(v.as_object().unwrap().len(), r.results.len());
    }
}
