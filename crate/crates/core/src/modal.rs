//! Propositional S5 with the diamond-defined paraconsistent connectives.
//!
//! `¬◇A` abbreviates `◇¬A` and `A ∧◇ B` abbreviates `◇(A ∧ B)`. Formulas over
//! `{¬◇, ∧◇, ∨, →}` form the paraconsistent fragment; [`translate_pns5`] maps
//! them into S5, and [`s5_satisfiable`] decides S5 by searching models whose
//! worlds are distinct valuations.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MFormula {
    Atom(String),
    /// `¬◇`
    NegD(Box<MFormula>),
    /// `∧◇`
    ConjD(Box<MFormula>, Box<MFormula>),
    Or(Box<MFormula>, Box<MFormula>),
    Implies(Box<MFormula>, Box<MFormula>),
    Not(Box<MFormula>),
    And(Box<MFormula>, Box<MFormula>),
    Iff(Box<MFormula>, Box<MFormula>),
    Diamond(Box<MFormula>),
    Box(Box<MFormula>),
}

use MFormula as M;

pub fn atom(name: &str) -> MFormula {
    M::Atom(name.to_owned())
}
pub fn neg_d(a: MFormula) -> MFormula {
    M::NegD(Box::new(a))
}
pub fn conj_d(a: MFormula, b: MFormula) -> MFormula {
    M::ConjD(Box::new(a), Box::new(b))
}
pub fn or(a: MFormula, b: MFormula) -> MFormula {
    M::Or(Box::new(a), Box::new(b))
}
pub fn implies(a: MFormula, b: MFormula) -> MFormula {
    M::Implies(Box::new(a), Box::new(b))
}
pub fn not(a: MFormula) -> MFormula {
    M::Not(Box::new(a))
}
pub fn and(a: MFormula, b: MFormula) -> MFormula {
    M::And(Box::new(a), Box::new(b))
}
pub fn iff(a: MFormula, b: MFormula) -> MFormula {
    M::Iff(Box::new(a), Box::new(b))
}
pub fn diamond(a: MFormula) -> MFormula {
    M::Diamond(Box::new(a))
}
pub fn boxed(a: MFormula) -> MFormula {
    M::Box(Box::new(a))
}

/// Inconsistency: `•A = A ∧◇ ¬◇A`.
pub fn bullet(a: MFormula) -> MFormula {
    conj_d(a.clone(), neg_d(a))
}

/// Consistency: `◦A = ¬◇•A`.
pub fn circ(a: MFormula) -> MFormula {
    neg_d(bullet(a))
}

/// Classical negation inside the fragment: `¬◇A ∧◇ ◦A`.
pub fn classical_not(a: MFormula) -> MFormula {
    conj_d(neg_d(a.clone()), circ(a))
}

/// Classical conjunction inside the fragment:
/// `(A ∧◇ B) ∧◇ (◦A ∧◇ ◦B)`.
pub fn classical_and(a: MFormula, b: MFormula) -> MFormula {
    conj_d(conj_d(a.clone(), b.clone()), conj_d(circ(a), circ(b)))
}

impl MFormula {
    /// True when only `¬◇`, `∧◇`, `∨`, `→` and atoms occur.
    pub fn is_pns5(&self) -> bool {
        match self {
            M::Atom(_) => true,
            M::NegD(a) => a.is_pns5(),
            M::ConjD(a, b) | M::Or(a, b) | M::Implies(a, b) => a.is_pns5() && b.is_pns5(),
            _ => false,
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            M::Atom(p) => {
                out.insert(p.clone());
            }
            M::NegD(a) | M::Not(a) | M::Diamond(a) | M::Box(a) => a.collect_atoms(out),
            M::ConjD(a, b) | M::Or(a, b) | M::Implies(a, b) | M::And(a, b) | M::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of `◇`/`□` occurrences after desugaring.
    pub fn modal_count(&self) -> usize {
        match self {
            M::Atom(_) => 0,
            M::NegD(a) | M::Diamond(a) | M::Box(a) => 1 + a.modal_count(),
            M::Not(a) => a.modal_count(),
            M::ConjD(a, b) => 1 + a.modal_count() + b.modal_count(),
            M::Or(a, b) | M::Implies(a, b) | M::And(a, b) | M::Iff(a, b) => a.modal_count() + b.modal_count(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            M::Atom(_) => 1,
            M::NegD(a) | M::Not(a) | M::Diamond(a) | M::Box(a) => 1 + a.size(),
            M::ConjD(a, b) | M::Or(a, b) | M::Implies(a, b) | M::And(a, b) | M::Iff(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for MFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            M::Atom(p) => write!(f, "{p}"),
            M::NegD(a) => write!(f, "¬◇{a}"),
            M::Not(a) => write!(f, "¬{a}"),
            M::Diamond(a) => write!(f, "◇{a}"),
            M::Box(a) => write!(f, "□{a}"),
            M::ConjD(a, b) => write!(f, "({a} ∧◇ {b})"),
            M::Or(a, b) => write!(f, "({a} ∨ {b})"),
            M::Implies(a, b) => write!(f, "({a} → {b})"),
            M::And(a, b) => write!(f, "({a} ∧ {b})"),
            M::Iff(a, b) => write!(f, "({a} ↔ {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModalError {
    #[error("{0} is outside the paraconsistent signature")]
    NotPns5(String),
    #[error("catalog entry {id} failed: {reason}")]
    CatalogFailure { id: String, reason: String },
}

/// Translates a fragment formula into S5, failing on any S5-only node.
pub fn translate_pns5(f: &MFormula) -> Result<MFormula, ModalError> {
    Ok(match f {
        M::Atom(_) => f.clone(),
        M::NegD(a) => diamond(not(translate_pns5(a)?)),
        M::ConjD(a, b) => diamond(and(translate_pns5(a)?, translate_pns5(b)?)),
        M::Or(a, b) => or(translate_pns5(a)?, translate_pns5(b)?),
        M::Implies(a, b) => implies(translate_pns5(a)?, translate_pns5(b)?),
        other => return Err(ModalError::NotPns5(other.to_string())),
    })
}

/// Expands `¬◇` and `∧◇` anywhere in a mixed formula.
pub fn desugar(f: &MFormula) -> MFormula {
    match f {
        M::Atom(_) => f.clone(),
        M::NegD(a) => diamond(not(desugar(a))),
        M::ConjD(a, b) => diamond(and(desugar(a), desugar(b))),
        M::Or(a, b) => or(desugar(a), desugar(b)),
        M::Implies(a, b) => implies(desugar(a), desugar(b)),
        M::And(a, b) => and(desugar(a), desugar(b)),
        M::Iff(a, b) => iff(desugar(a), desugar(b)),
        M::Not(a) => not(desugar(a)),
        M::Diamond(a) => diamond(desugar(a)),
        M::Box(a) => boxed(desugar(a)),
    }
}

/// An S5 model: every world sees every world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    pub atoms: Vec<String>,
    /// `worlds[w][k]` is the value of `atoms[k]` at world `w`.
    pub worlds: Vec<Vec<bool>>,
    /// World at which the formula was satisfied.
    pub actual: usize,
}

impl KripkeModel {
    /// Truth of `f` at every world; the abbreviations are read directly.
    pub fn truth_set(&self, f: &MFormula) -> Vec<bool> {
        let n = self.worlds.len();
        let any = |v: &[bool]| v.iter().any(|&b| b);
        match f {
            M::Atom(p) => match self.atoms.iter().position(|a| a == p) {
                Some(k) => self.worlds.iter().map(|w| w[k]).collect(),
                None => vec![false; n],
            },
            M::Not(a) => self.truth_set(a).into_iter().map(|b| !b).collect(),
            M::And(a, b) => zip(self.truth_set(a), self.truth_set(b), |x, y| x && y),
            M::Or(a, b) => zip(self.truth_set(a), self.truth_set(b), |x, y| x || y),
            M::Implies(a, b) => zip(self.truth_set(a), self.truth_set(b), |x, y| !x || y),
            M::Iff(a, b) => zip(self.truth_set(a), self.truth_set(b), |x, y| x == y),
            M::Diamond(a) => vec![any(&self.truth_set(a)); n],
            M::Box(a) => vec![self.truth_set(a).iter().all(|&b| b); n],
            M::NegD(a) => vec![self.truth_set(a).iter().any(|&b| !b); n],
            M::ConjD(a, b) => vec![any(&zip(self.truth_set(a), self.truth_set(b), |x, y| x && y)); n],
        }
    }

    pub fn satisfies(&self, f: &MFormula) -> bool {
        self.truth_set(f)[self.actual]
    }

    pub fn to_json(&self) -> Value {
        let worlds: Vec<Value> = self
            .worlds
            .iter()
            .map(|w| Value::Object(self.atoms.iter().cloned().zip(w.iter().map(|&b| json!(b))).collect()))
            .collect();
        json!({"worlds": worlds, "actual": self.actual})
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Finds a model of `f` with at most `modal_count + 1` worlds, smallest
/// first, or `None` when `f` is unsatisfiable.
pub fn s5_satisfiable(f: &MFormula) -> Option<KripkeModel> {
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    let n = atoms.len();
    assert!(n < 16, "too many atoms for exhaustive search");
    let valuations: Vec<Vec<bool>> = (0..1u32 << n).map(|bits| (0..n).map(|k| bits >> k & 1 == 1).collect()).collect();
    let bound = (f.modal_count() + 1).min(valuations.len());
    for size in 1..=bound {
        for worlds in valuations.iter().cloned().combinations(size) {
            let mut model = KripkeModel { atoms: atoms.clone(), worlds, actual: 0 };
            if let Some(w) = model.truth_set(f).iter().position(|&b| b) {
                model.actual = w;
                return Some(model);
            }
        }
    }
    None
}

pub fn s5_valid(f: &MFormula) -> bool {
    s5_satisfiable(&not(f.clone())).is_none()
}

/// A model falsifying `f`, if any.
pub fn countermodel(f: &MFormula) -> Option<KripkeModel> {
    s5_satisfiable(&not(f.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    Valid,
    /// Not derivable: a countermodel must exist.
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: String,
    pub claim: Claim,
    pub formula: MFormula,
    pub passed: bool,
    /// Countermodel for an `Invalid` claim, re-checked against the formula.
    pub model: Option<KripkeModel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogReport {
    pub entries: Vec<CatalogEntry>,
}

impl CatalogReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn to_json(&self) -> Value {
        let mut out = Map::new();
        for e in &self.entries {
            let mut v = json!({
                "claim": match e.claim { Claim::Valid => "valid", Claim::Invalid => "invalid" },
                "formula": e.formula.to_string(),
                "status": if e.passed { "verified" } else { "failed" },
            });
            if let Some(m) = &e.model {
                v["model"] = m.to_json();
            }
            out.insert(e.id.clone(), v);
        }
        Value::Object(out)
    }
}

fn entry(id: &str, claim: Claim, formula: MFormula) -> CatalogEntry {
    let s5 = desugar(&formula);
    let (passed, model) = match claim {
        Claim::Valid => (s5_valid(&s5), None),
        Claim::Invalid => match countermodel(&s5) {
            Some(m) => (!m.satisfies(&s5), Some(m)),
            None => (false, None),
        },
    };
    CatalogEntry { id: id.to_owned(), claim, formula, passed, model }
}

/// The connective catalog with schematic letters read as distinct atoms.
pub fn catalog() -> CatalogReport {
    let (a, b, c, d) = (atom("A"), atom("B"), atom("C"), atom("D"));
    let mut entries = Vec::new();

    // A ∧◇ B can be valid while neither conjunct is.
    let tricky = or(atom("A"), boxed(not(atom("A"))));
    entries.push(entry("conj_d_1.conjunction", Claim::Valid, conj_d(tricky.clone(), tricky.clone())));
    entries.push(entry("conj_d_1.left", Claim::Invalid, tricky.clone()));
    entries.push(entry("conj_d_1.right", Claim::Invalid, tricky));

    entries.push(entry(
        "conj_d_2",
        Claim::Valid,
        implies(and(boxed(a.clone()), boxed(b.clone())), conj_d(a.clone(), b.clone())),
    ));
    entries.push(entry(
        "conj_d_3",
        Claim::Invalid,
        iff(conj_d(a.clone(), conj_d(b.clone(), c.clone())), conj_d(conj_d(a.clone(), b.clone()), c.clone())),
    ));
    entries.push(entry("conj_d_4", Claim::Valid, iff(conj_d(a.clone(), b.clone()), conj_d(b.clone(), a.clone()))));
    entries.push(entry(
        "conj_d_5",
        Claim::Invalid,
        implies(
            and(conj_d(a.clone(), b.clone()), conj_d(c.clone(), d.clone())),
            or(conj_d(a.clone(), d.clone()), conj_d(c.clone(), b.clone())),
        ),
    ));
    for n in 2..=4 {
        let xs: Vec<MFormula> = (1..=n).map(|k| atom(&format!("A{k}"))).collect();
        let rest = xs[1..].iter().cloned().reduce(and).expect("n >= 2");
        let all = xs.iter().cloned().reduce(and).expect("n >= 2");
        entries.push(entry(&format!("conj_d_6.n{n}"), Claim::Valid, iff(conj_d(xs[0].clone(), rest), diamond(all))));
    }

    entries.push(entry(
        "bullet",
        Claim::Valid,
        iff(bullet(a.clone()), and(diamond(a.clone()), diamond(not(a.clone())))),
    ));
    entries.push(entry("circ", Claim::Valid, iff(circ(a.clone()), or(boxed(not(a.clone())), boxed(a.clone())))));
    entries.push(entry(
        "classical_not",
        Claim::Valid,
        iff(classical_not(a.clone()), and(diamond(not(a.clone())), or(boxed(not(a.clone())), boxed(a.clone())))),
    ));
    entries.push(entry("classical_not.entails", Claim::Valid, implies(classical_not(a.clone()), not(a.clone()))));
    let four_ways = [
        and(a.clone(), b.clone()),
        and(a.clone(), not(b.clone())),
        and(not(a.clone()), b.clone()),
        and(not(a.clone()), not(b.clone())),
    ]
    .into_iter()
    .map(boxed)
    .reduce(or)
    .expect("non-empty");
    entries.push(entry(
        "classical_and",
        Claim::Valid,
        iff(classical_and(a.clone(), b.clone()), and(diamond(and(a.clone(), b.clone())), four_ways)),
    ));
    entries.push(entry(
        "classical_and.entails",
        Claim::Valid,
        implies(classical_and(a.clone(), b.clone()), and(a.clone(), b.clone())),
    ));

    let cand = classical_and;
    entries.push(entry(
        "explosion_1",
        Claim::Valid,
        implies(cand(a.clone(), cand(neg_d(a.clone()), circ(a.clone()))), b.clone()),
    ));
    entries.push(entry(
        "explosion_2",
        Claim::Valid,
        implies(conj_d(a.clone(), conj_d(neg_d(a.clone()), circ(a.clone()))), b.clone()),
    ));
    entries.push(entry(
        "explosion_3",
        Claim::Valid,
        implies(conj_d(conj_d(a.clone(), neg_d(a.clone())), circ(a.clone())), b.clone()),
    ));
    entries.push(entry(
        "explosion_4",
        Claim::Valid,
        implies(conj_d(conj_d(a.clone(), circ(a.clone())), classical_not(a.clone())), b),
    ));
    CatalogReport { entries }
}

/// Runs [`catalog`] and turns the first failed entry into an error.
pub fn check_catalog() -> Result<CatalogReport, ModalError> {
    let report = catalog();
    if let Some(e) = report.entries.iter().find(|e| !e.passed) {
        let reason = match e.claim {
            Claim::Valid => "not S5-valid".to_owned(),
            Claim::Invalid => "no countermodel found".to_owned(),
        };
        return Err(ModalError::CatalogFailure { id: e.id.clone(), reason });
    }
    Ok(report)
}
