//! First-order theories describing a machine run on an input.
//!
//! [`emit_theory`] produces the axioms in one of three connective regimes,
//! [`text`] renders and parses them, [`check`] evaluates them in the finite
//! structure harvested from a trace, and [`witness`] locates the pair of
//! ground atoms that makes the theory of an ambiguous run contradictory.

pub mod check;
pub mod text;
pub mod witness;

use std::fmt;

use crate::machine::{Action, Instruction, Machine, SymbolId};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Zero,
    Succ(Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_owned())
    }

    pub fn succ(t: Term) -> Term {
        Term::Succ(Box::new(t))
    }

    /// The numeral `0^k`, i.e. `k` successors of zero.
    pub fn numeral(k: u64) -> Term {
        (0..k).fold(Term::Zero, |t, _| Term::succ(t))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PredSym {
    /// State predicate, by state name.
    Q(String),
    /// Symbol predicate, by symbol name.
    S(String),
    Less,
    Eq,
}

/// Which negation or conjunction a connective node stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Classical,
    /// The paraconsistent negation of the underlying LFI.
    Lfi,
    /// The modal reading: `not◇ A = ◇¬A`, `A and◇ B = ◇(A ∧ B)`.
    Diamond,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Pred(PredSym, Vec<Term>),
    Not(Box<Formula>, Regime),
    And(Box<Formula>, Box<Formula>, Regime),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    Possibly(Box<Formula>),
    Incons(Box<Formula>),
    Verum,
    Falsum,
}

impl Formula {
    pub fn negation(a: Formula) -> Formula {
        Formula::Not(Box::new(a), Regime::Classical)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b), Regime::Classical)
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, a: Formula) -> Formula {
        Formula::Forall(v.to_owned(), Box::new(a))
    }

    pub fn exists(v: &str, a: Formula) -> Formula {
        Formula::Exists(v.to_owned(), Box::new(a))
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Pred(PredSym::Eq, vec![a, b])
    }

    pub fn less(a: Term, b: Term) -> Formula {
        Formula::Pred(PredSym::Less, vec![a, b])
    }

    pub fn q(state: &str, t: Term, x: Term) -> Formula {
        Formula::Pred(PredSym::Q(state.to_owned()), vec![t, x])
    }

    pub fn s(symbol: &str, t: Term, x: Term) -> Formula {
        Formula::Pred(PredSym::S(symbol.to_owned()), vec![t, x])
    }

    /// Right-associated conjunction; `Verum` when empty.
    pub fn conj(items: Vec<Formula>, regime: Regime) -> Formula {
        let mut it = items.into_iter().rev();
        let Some(last) = it.next() else {
            return Formula::Verum;
        };
        it.fold(last, |acc, f| Formula::And(Box::new(f), Box::new(acc), regime))
    }

    /// Right-associated disjunction; `Falsum` when empty.
    pub fn disj(items: Vec<Formula>) -> Formula {
        let mut it = items.into_iter().rev();
        let Some(last) = it.next() else {
            return Formula::Falsum;
        };
        it.fold(last, |acc, f| Formula::or(f, acc))
    }

    /// The formula with every regime reset to classical and every `◇` and
    /// `•` erased: the quantifier/predicate shape shared by all variants.
    pub fn skeleton(&self) -> Formula {
        use Formula::*;
        let b = |f: &Formula| Box::new(f.skeleton());
        match self {
            Pred(p, ts) => Pred(p.clone(), ts.clone()),
            Not(a, _) => Not(b(a), Regime::Classical),
            And(x, y, _) => And(b(x), b(y), Regime::Classical),
            Or(x, y) => Or(b(x), b(y)),
            Implies(x, y) => Implies(b(x), b(y)),
            Iff(x, y) => Iff(b(x), b(y)),
            Forall(v, a) => Forall(v.clone(), b(a)),
            Exists(v, a) => Exists(v.clone(), b(a)),
            Possibly(a) | Incons(a) => a.skeleton(),
            Verum => Verum,
            Falsum => Falsum,
        }
    }

    /// Visits every subformula in pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        use Formula::*;
        f(self);
        match self {
            Not(a, _) | Forall(_, a) | Exists(_, a) | Possibly(a) | Incons(a) => a.walk(f),
            And(x, y, _) | Or(x, y) | Implies(x, y) | Iff(x, y) => {
                x.walk(f);
                y.walk(f);
            }
            Pred(..) | Verum | Falsum => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Classical first-order logic; inconsistency marks are dropped.
    Fol,
    /// Paraconsistent negation, classical conjunction, `•` on marked heads.
    Lfi1,
    /// Modal regimes: `∧◇`, `¬◇` and `◇` placed per axiom family.
    S5,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Fol => "FOL",
            Variant::Lfi1 => "LFI1*",
            Variant::S5 => "S5Q=",
        }
    }

    pub fn from_name(s: &str) -> Option<Variant> {
        match s {
            "FOL" | "fol" => Some(Variant::Fol),
            "LFI1*" | "LFI1" | "lfi1" => Some(Variant::Lfi1),
            "S5Q=" | "S5" | "s5" => Some(Variant::S5),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub variant: Variant,
    pub axioms: Vec<(String, Formula)>,
}

impl Theory {
    pub fn get(&self, id: &str) -> Option<&Formula> {
        self.axioms.iter().find(|(k, _)| k == id).map(|(_, f)| f)
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }
}

/// Expected number of axioms for `machine`: five arithmetic axioms, one per
/// instruction, the initial configuration, the two boundary axioms, and one
/// uniqueness axiom per state and per symbol.
pub fn axiom_count(machine: &Machine) -> usize {
    5 + machine.instructions().len() + 1 + 2 + machine.states().len() + machine.alphabet().len()
}

struct Ctx {
    variant: Variant,
}

impl Ctx {
    fn neg(&self) -> Regime {
        match self.variant {
            Variant::Fol | Variant::S5 => Regime::Classical,
            Variant::Lfi1 => Regime::Lfi,
        }
    }

    fn not(&self, a: Formula) -> Formula {
        Formula::Not(Box::new(a), self.neg())
    }

    /// Negation used by the uniqueness axioms.
    fn unique_not(&self, a: Formula) -> Formula {
        match self.variant {
            Variant::S5 => Formula::Not(Box::new(a), Regime::Diamond),
            _ => self.not(a),
        }
    }

    fn diamond_and(&self) -> Regime {
        match self.variant {
            Variant::S5 => Regime::Diamond,
            _ => Regime::Classical,
        }
    }

    fn mark(&self, marked: bool, a: Formula) -> Formula {
        if marked && self.variant != Variant::Fol {
            Formula::Incons(Box::new(a))
        } else {
            a
        }
    }

    fn possibly(&self, a: Formula) -> Formula {
        match self.variant {
            Variant::S5 => Formula::Possibly(Box::new(a)),
            _ => a,
        }
    }
}

fn t() -> Term {
    Term::var("t")
}
fn x() -> Term {
    Term::var("x")
}
fn y() -> Term {
    Term::var("y")
}

fn arithmetic(cx: &Ctx) -> Vec<(String, Formula)> {
    use Formula as F;
    let (z, xv, yv) = (Term::var("z"), x(), y());
    vec![
        ("A1".into(), F::forall("z", F::exists("x", F::eq(z.clone(), Term::succ(xv.clone()))))),
        (
            "A2".into(),
            F::forall(
                "z",
                F::forall(
                    "x",
                    F::forall(
                        "y",
                        F::implies(
                            F::and(F::eq(z.clone(), Term::succ(xv.clone())), F::eq(z.clone(), Term::succ(yv.clone()))),
                            F::eq(xv.clone(), yv.clone()),
                        ),
                    ),
                ),
            ),
        ),
        (
            "A3".into(),
            F::forall(
                "x",
                F::forall(
                    "y",
                    F::forall(
                        "z",
                        F::implies(
                            F::and(F::less(xv.clone(), yv.clone()), F::less(yv.clone(), z.clone())),
                            F::less(xv.clone(), z),
                        ),
                    ),
                ),
            ),
        ),
        ("A4".into(), F::forall("x", F::less(xv.clone(), Term::succ(xv.clone())))),
        (
            "A5".into(),
            F::forall("x", F::forall("y", F::implies(F::less(xv.clone(), yv.clone()), cx.not(F::eq(xv, yv))))),
        ),
    ]
}

/// `⋀_s (S_s(t, y) → S_s(t', y))` over the whole alphabet.
fn frame(cx: &Ctx, machine: &Machine) -> Formula {
    let _ = cx;
    let items = machine
        .alphabet()
        .iter()
        .map(|s| Formula::implies(Formula::s(s, t(), y()), Formula::s(s, Term::succ(t()), y())))
        .collect();
    Formula::conj(items, Regime::Classical)
}

fn instruction_axiom(cx: &Ctx, machine: &Machine, inst: &Instruction) -> Formula {
    use Formula as F;
    let q = machine.state_name(inst.head_state);
    let s = machine.symbol_name(inst.scan_symbol);
    let l = machine.state_name(inst.next_state);
    let t1 = Term::succ(t());
    let head_cell = match inst.action {
        Action::Left => Term::succ(x()),
        _ => x(),
    };
    let antecedent = F::And(
        Box::new(cx.mark(inst.head_incons, F::q(q, t(), head_cell.clone()))),
        Box::new(cx.mark(inst.scan_incons, F::s(s, t(), head_cell))),
        cx.diamond_and(),
    );
    let consequent = match inst.action {
        Action::Write(k) => {
            let rest = F::and(
                F::s(machine.symbol_name(k), t1.clone(), x()),
                F::forall("y", F::implies(cx.not(F::eq(y(), x())), frame(cx, machine))),
            );
            F::And(Box::new(F::q(l, t1, x())), Box::new(rest), cx.diamond_and())
        }
        Action::Right => F::And(
            Box::new(F::q(l, t1, Term::succ(x()))),
            Box::new(F::forall("y", frame(cx, machine))),
            cx.diamond_and(),
        ),
        Action::Left => {
            F::And(Box::new(F::q(l, t1, x())), Box::new(F::forall("y", frame(cx, machine))), cx.diamond_and())
        }
    };
    F::forall("t", F::forall("x", F::implies(antecedent, consequent)))
}

fn initial_axiom(cx: &Ctx, machine: &Machine, input: &[SymbolId]) -> Formula {
    use Formula as F;
    let start = machine.state_name(machine.start_state());
    let p = machine.start_position();
    let head = if p >= 0 {
        F::q(start, Term::Zero, Term::numeral(p as u64))
    } else {
        // The start cell z satisfies z + |p| = 0.
        let z = Term::var("z");
        let shifted = (0..p.unsigned_abs()).fold(z.clone(), |acc, _| Term::succ(acc));
        F::exists("z", F::and(F::eq(shifted, Term::Zero), F::q(start, Term::Zero, z)))
    };
    let mut items = vec![head];
    for (j, &s) in input.iter().enumerate() {
        items.push(F::s(machine.symbol_name(s), Term::Zero, Term::numeral(j as u64)));
    }
    let outside = Formula::conj(
        (0..input.len()).map(|j| cx.not(F::eq(y(), Term::numeral(j as u64)))).collect(),
        Regime::Classical,
    );
    let blank = machine.symbol_name(machine.blank());
    items.push(F::forall("y", F::implies(outside, F::s(blank, Term::Zero, y()))));
    Formula::conj(items, Regime::Classical)
}

/// `⋀_i ¬Q_i(a, b) ∧ ⋀_j ¬S_j(a, b)`.
fn nothing_at(cx: &Ctx, machine: &Machine, a: Term, b: Term) -> Formula {
    let mut items: Vec<Formula> =
        machine.states().iter().map(|q| cx.not(Formula::q(q, a.clone(), b.clone()))).collect();
    items.extend(machine.alphabet().iter().map(|s| cx.not(Formula::s(s, a.clone(), b.clone()))));
    Formula::conj(items, Regime::Classical)
}

fn before_start(cx: &Ctx, machine: &Machine) -> Formula {
    use Formula as F;
    F::forall("t", F::forall("x", F::implies(F::less(t(), Term::Zero), nothing_at(cx, machine, t(), x()))))
}

/// After halting nothing is left. The guard requires a head at `(t, x)`
/// that no instruction can move on; without it the antecedent would also
/// hold at every cell the head is not on.
fn after_halt(cx: &Ctx, machine: &Machine) -> Formula {
    use Formula as F;
    let some_head = F::disj(machine.states().iter().map(|q| F::q(q, t(), x())).collect());
    let fireable = F::disj(
        machine
            .head_pairs()
            .into_iter()
            .map(|(q, s)| {
                F::And(
                    Box::new(F::q(machine.state_name(q), t(), x())),
                    Box::new(F::s(machine.symbol_name(s), t(), x())),
                    cx.diamond_and(),
                )
            })
            .collect(),
    );
    let u = Term::var("u");
    F::forall(
        "t",
        F::forall(
            "x",
            F::implies(
                F::and(some_head, cx.not(fireable)),
                F::forall("u", F::forall("y", F::implies(F::less(t(), u.clone()), nothing_at(cx, machine, u, y())))),
            ),
        ),
    )
}

fn state_unique(cx: &Ctx, machine: &Machine, q: &str) -> Formula {
    use Formula as F;
    let mut items: Vec<Formula> =
        machine.states().iter().filter(|o| *o != q).map(|o| cx.unique_not(F::q(o, t(), x()))).collect();
    let elsewhere =
        Formula::conj(machine.states().iter().map(|o| cx.unique_not(F::q(o, t(), y()))).collect(), Regime::Classical);
    items.push(F::forall("y", F::implies(cx.not(F::eq(y(), x())), elsewhere)));
    F::forall("t", F::forall("x", F::implies(cx.possibly(F::q(q, t(), x())), Formula::conj(items, Regime::Classical))))
}

fn symbol_unique(cx: &Ctx, machine: &Machine, s: &str) -> Formula {
    use Formula as F;
    let items = machine.alphabet().iter().filter(|o| *o != s).map(|o| cx.unique_not(F::s(o, t(), x()))).collect();
    F::forall("t", F::forall("x", F::implies(cx.possibly(F::s(s, t(), x())), Formula::conj(items, Regime::Classical))))
}

/// Emits the theory of `machine` on `input` in the given variant.
pub fn emit_theory(machine: &Machine, input: &[SymbolId], variant: Variant) -> Theory {
    let cx = Ctx { variant };
    let mut axioms = arithmetic(&cx);
    for (k, inst) in machine.instructions().iter().enumerate() {
        axioms.push((format!("Ai{}", k + 1), instruction_axiom(&cx, machine, inst)));
    }
    axioms.push(("Aalpha".into(), initial_axiom(&cx, machine, input)));
    axioms.push(("At0".into(), before_start(&cx, machine)));
    axioms.push(("Ath".into(), after_halt(&cx, machine)));
    for q in machine.states() {
        axioms.push((format!("Aq_{q}"), state_unique(&cx, machine, q)));
    }
    for s in machine.alphabet() {
        axioms.push((format!("As_{s}"), symbol_unique(&cx, machine, s)));
    }
    Theory { variant, axioms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn count<'a>(f: &'a Formula, pred: impl Fn(&'a Formula) -> bool) -> usize {
        let mut n = 0;
        f.walk(&mut |g| {
            if pred(g) {
                n += 1;
            }
        });
        n
    }

    #[test]
    fn example1_has_twenty_six_axioms() {
        let m = fixtures::example1();
        let th = emit_theory(&m, &m.parse_input("0").unwrap(), Variant::Fol);
        assert_eq!(th.len(), 26);
        assert_eq!(th.len(), axiom_count(&m));
        assert_eq!(th.axioms.iter().filter(|(k, _)| k == "Aalpha").count(), 1);
    }

    #[test]
    fn empty_machine_halting_guard_is_falsum() {
        let m = fixtures::empty();
        let th = emit_theory(&m, &[], Variant::Fol);
        assert_eq!(th.len(), 5 + 1 + 2 + 1 + 1);
        assert!(th.axioms.iter().all(|(k, _)| !k.starts_with("Ai")));
        let ath = th.get("Ath").unwrap();
        assert_eq!(count(ath, |g| *g == Formula::negation(Formula::Falsum)), 1);
    }

    #[test]
    fn s5_uniqueness_uses_diamond_negation() {
        let m = fixtures::example1();
        let th = emit_theory(&m, &[], Variant::S5);
        let aq = th.get("Aq_q1").unwrap();
        assert_eq!(count(aq, |g| matches!(g, Formula::Possibly(_))), 1);
        // Four other states at x, five states at y.
        assert_eq!(count(aq, |g| matches!(g, Formula::Not(_, Regime::Diamond))), 9);
        // The `y ≠ x` guard keeps its classical negation.
        assert_eq!(count(aq, |g| matches!(g, Formula::Not(_, Regime::Classical))), 1);
    }

    #[test]
    fn s5_instruction_axioms_have_two_diamond_conjunctions() {
        let m = fixtures::example1();
        let th = emit_theory(&m, &[], Variant::S5);
        for k in 1..=9 {
            let f = th.get(&format!("Ai{k}")).unwrap();
            assert_eq!(count(f, |g| matches!(g, Formula::And(_, _, Regime::Diamond))), 2, "Ai{k}");
        }
        let marked = th.get("Ai8").unwrap();
        assert_eq!(count(marked, |g| matches!(g, Formula::Incons(_))), 1);
    }

    #[test]
    fn variants_share_skeleton() {
        for (_, m) in fixtures::all() {
            let input = m.parse_input("0").unwrap_or_default();
            let base = emit_theory(&m.without_marks(), &input, Variant::Fol);
            for v in [Variant::Lfi1, Variant::S5] {
                let th = emit_theory(&m, &input, v);
                assert_eq!(th.len(), base.len());
                for ((ka, fa), (kb, fb)) in base.axioms.iter().zip(&th.axioms) {
                    assert_eq!(ka, kb);
                    assert_eq!(fa.skeleton(), fb.skeleton(), "{ka}");
                }
            }
        }
    }

    #[test]
    fn fol_drops_marks() {
        let m = fixtures::example1();
        let th = emit_theory(&m, &[], Variant::Fol);
        assert!(th
            .axioms
            .iter()
            .all(|(_, f)| count(f, |g| matches!(g, Formula::Incons(_) | Formula::Possibly(_))) == 0));
    }

    #[test]
    fn negative_start_uses_witness_cell() {
        let src = "machine n\nstates: a\nsymbols: _\nblank: _\nstart: a @ -2\n";
        let m = crate::dsl::parse_machine(src).unwrap();
        let th = emit_theory(&m, &[], Variant::Fol);
        assert_eq!(count(th.get("Aalpha").unwrap(), |g| matches!(g, Formula::Exists(..))), 1);
    }
}
