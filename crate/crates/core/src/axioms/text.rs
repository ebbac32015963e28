//! Text and structured renderings of theories.
//!
//! The text format is for reading: `forall x. less(x, succ(x))`. The
//! structured format is an s-expression per axiom and parses back to the
//! same [`Theory`].

use std::fmt::Write as _;

use thiserror::Error;

use super::{Formula, PredSym, Regime, Term, Theory, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

fn not_tag(r: Regime) -> &'static str {
    match r {
        Regime::Classical => "not",
        Regime::Lfi => "not~",
        Regime::Diamond => "not◇",
    }
}

fn and_tag(r: Regime) -> &'static str {
    match r {
        Regime::Classical => "and",
        Regime::Lfi => "and~",
        Regime::Diamond => "and◇",
    }
}

pub fn term_text(t: &Term) -> String {
    match t {
        Term::Var(v) => v.clone(),
        Term::Zero => "0".into(),
        Term::Succ(a) => format!("succ({})", term_text(a)),
    }
}

fn term_sexpr(t: &Term) -> String {
    match t {
        Term::Var(v) => v.clone(),
        Term::Zero => "0".into(),
        Term::Succ(a) => format!("(succ {})", term_sexpr(a)),
    }
}

/// Renders a formula in the readable prefix syntax.
pub fn formula_text(f: &Formula) -> String {
    let mut out = String::new();
    write_text(f, &mut out);
    out
}

fn write_text(f: &Formula, out: &mut String) {
    use Formula::*;
    let binary = |out: &mut String, tag: &str, a: &Formula, b: &Formula| {
        out.push_str(tag);
        out.push('(');
        write_text(a, out);
        out.push_str(", ");
        write_text(b, out);
        out.push(')');
    };
    match f {
        Pred(p, ts) => {
            let args: Vec<String> = ts.iter().map(term_text).collect();
            let head = match p {
                PredSym::Q(q) => format!("Q_{q}"),
                PredSym::S(s) => format!("S_{s}"),
                PredSym::Less => "less".into(),
                PredSym::Eq => "eq".into(),
            };
            let _ = write!(out, "{head}({})", args.join(", "));
        }
        Not(a, r) => {
            out.push_str(not_tag(*r));
            out.push('(');
            write_text(a, out);
            out.push(')');
        }
        And(a, b, r) => binary(out, and_tag(*r), a, b),
        Or(a, b) => binary(out, "or", a, b),
        Implies(a, b) => binary(out, "implies", a, b),
        Iff(a, b) => binary(out, "iff", a, b),
        Forall(v, a) | Exists(v, a) => {
            let q = if matches!(f, Forall(..)) { "forall" } else { "exists" };
            let _ = write!(out, "{q} {v}. ");
            write_text(a, out);
        }
        Possibly(a) | Incons(a) => {
            out.push_str(if matches!(f, Possibly(_)) { "diamond(" } else { "incons(" });
            write_text(a, out);
            out.push(')');
        }
        Verum => out.push_str("true"),
        Falsum => out.push_str("false"),
    }
}

/// Renders a formula as an s-expression.
pub fn formula_sexpr(f: &Formula) -> String {
    use Formula::*;
    match f {
        Pred(p, ts) => {
            let args: Vec<String> = ts.iter().map(term_sexpr).collect();
            match p {
                PredSym::Q(q) => format!("(Q {q} {})", args.join(" ")),
                PredSym::S(s) => format!("(S {s} {})", args.join(" ")),
                PredSym::Less => format!("(less {})", args.join(" ")),
                PredSym::Eq => format!("(eq {})", args.join(" ")),
            }
        }
        Not(a, r) => format!("({} {})", not_tag(*r), formula_sexpr(a)),
        And(a, b, r) => format!("({} {} {})", and_tag(*r), formula_sexpr(a), formula_sexpr(b)),
        Or(a, b) => format!("(or {} {})", formula_sexpr(a), formula_sexpr(b)),
        Implies(a, b) => format!("(implies {} {})", formula_sexpr(a), formula_sexpr(b)),
        Iff(a, b) => format!("(iff {} {})", formula_sexpr(a), formula_sexpr(b)),
        Forall(v, a) => format!("(forall {v} {})", formula_sexpr(a)),
        Exists(v, a) => format!("(exists {v} {})", formula_sexpr(a)),
        Possibly(a) => format!("(diamond {})", formula_sexpr(a)),
        Incons(a) => format!("(incons {})", formula_sexpr(a)),
        Verum => "true".into(),
        Falsum => "false".into(),
    }
}

pub fn serialize_theory(theory: &Theory, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => {
            let _ = writeln!(out, "# theory {}", theory.variant);
            for (id, f) in &theory.axioms {
                let _ = writeln!(out, "{id}: {}", formula_text(f));
            }
        }
        Format::Structured => {
            let _ = writeln!(out, "(theory {})", theory.variant);
            for (id, f) in &theory.axioms {
                let _ = writeln!(out, "(axiom {id} {})", formula_sexpr(f));
            }
        }
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing (theory ...) header")]
    MissingHeader,
    #[error("unknown variant {0}")]
    UnknownVariant(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn read_sexp(src: &str) -> Result<Sexp, String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in src.chars() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if !cur.is_empty() {
                tokens.push(std::mem::take(&mut cur));
            }
            if !ch.is_whitespace() {
                tokens.push(ch.to_string());
            }
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    let mut pos = 0;
    let e = parse_tokens(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(format!("trailing input at token {pos}"));
    }
    Ok(e)
}

fn parse_tokens(tokens: &[String], pos: &mut usize) -> Result<Sexp, String> {
    let tok = tokens.get(*pos).ok_or("unexpected end of input")?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(parse_tokens(tokens, pos)?),
                    None => return Err("unclosed parenthesis".into()),
                }
            }
        }
        ")" => Err("unexpected )".into()),
        atom => Ok(Sexp::Atom(atom.to_owned())),
    }
}

fn atom(e: &Sexp) -> Result<&str, String> {
    match e {
        Sexp::Atom(a) => Ok(a),
        Sexp::List(_) => Err("expected an atom".into()),
    }
}

fn to_term(e: &Sexp) -> Result<Term, String> {
    match e {
        Sexp::Atom(a) if a == "0" => Ok(Term::Zero),
        Sexp::Atom(a) => Ok(Term::Var(a.clone())),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(h), a] if h == "succ" => Ok(Term::succ(to_term(a)?)),
            _ => Err("malformed term".into()),
        },
    }
}

fn regime_of(tag: &str, base: &str) -> Option<Regime> {
    let rest = tag.strip_prefix(base)?;
    match rest {
        "" => Some(Regime::Classical),
        "~" => Some(Regime::Lfi),
        "◇" => Some(Regime::Diamond),
        _ => None,
    }
}

fn to_formula(e: &Sexp) -> Result<Formula, String> {
    let items = match e {
        Sexp::Atom(a) if a == "true" => return Ok(Formula::Verum),
        Sexp::Atom(a) if a == "false" => return Ok(Formula::Falsum),
        Sexp::Atom(a) => return Err(format!("unexpected atom {a}")),
        Sexp::List(items) => items,
    };
    let (head, args) = items.split_first().ok_or("empty list")?;
    let head = atom(head)?;
    let b = |i: usize| -> Result<Box<Formula>, String> { Ok(Box::new(to_formula(&args[i])?)) };
    let arity = |n: usize| -> Result<(), String> {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("{head} takes {n} arguments"))
        }
    };
    match head {
        "Q" | "S" => {
            arity(3)?;
            let name = atom(&args[0])?.to_owned();
            let p = if head == "Q" { PredSym::Q(name) } else { PredSym::S(name) };
            Ok(Formula::Pred(p, vec![to_term(&args[1])?, to_term(&args[2])?]))
        }
        "less" | "eq" => {
            arity(2)?;
            let p = if head == "less" { PredSym::Less } else { PredSym::Eq };
            Ok(Formula::Pred(p, vec![to_term(&args[0])?, to_term(&args[1])?]))
        }
        "or" => arity(2).and_then(|_| Ok(Formula::Or(b(0)?, b(1)?))),
        "implies" => arity(2).and_then(|_| Ok(Formula::Implies(b(0)?, b(1)?))),
        "iff" => arity(2).and_then(|_| Ok(Formula::Iff(b(0)?, b(1)?))),
        "diamond" => arity(1).and_then(|_| Ok(Formula::Possibly(b(0)?))),
        "incons" => arity(1).and_then(|_| Ok(Formula::Incons(b(0)?))),
        "forall" | "exists" => {
            arity(2)?;
            let v = atom(&args[0])?.to_owned();
            let body = b(1)?;
            Ok(if head == "forall" { Formula::Forall(v, body) } else { Formula::Exists(v, body) })
        }
        other => {
            if let Some(r) = regime_of(other, "not") {
                arity(1)?;
                Ok(Formula::Not(b(0)?, r))
            } else if let Some(r) = regime_of(other, "and") {
                arity(2)?;
                Ok(Formula::And(b(0)?, b(1)?, r))
            } else {
                Err(format!("unknown connective {other}"))
            }
        }
    }
}

/// Parses a single structured formula.
pub fn parse_formula(src: &str) -> Result<Formula, String> {
    to_formula(&read_sexp(src)?)
}

/// Parses the structured format produced by [`serialize_theory`].
pub fn parse_structured(src: &str) -> Result<Theory, ParseError> {
    let mut variant = None;
    let mut axioms = Vec::new();
    for (k, line) in src.lines().enumerate() {
        let line_no = k + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let err = |msg: String| ParseError::Syntax { line: line_no, msg };
        let e = read_sexp(line).map_err(err)?;
        let Sexp::List(items) = &e else {
            return Err(err("expected a list".into()));
        };
        match items.as_slice() {
            [Sexp::Atom(h), Sexp::Atom(v)] if h == "theory" => {
                variant = Some(Variant::from_name(v).ok_or_else(|| ParseError::UnknownVariant(v.clone()))?);
            }
            [Sexp::Atom(h), Sexp::Atom(id), body] if h == "axiom" => {
                if variant.is_none() {
                    return Err(ParseError::MissingHeader);
                }
                axioms.push((id.clone(), to_formula(body).map_err(err)?));
            }
            _ => return Err(err("expected (theory V) or (axiom ID FORMULA)".into())),
        }
    }
    Ok(Theory { variant: variant.ok_or(ParseError::MissingHeader)?, axioms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{emit_theory, Variant};
    use crate::fixtures;

    #[test]
    fn arithmetic_axioms_render() {
        let m = fixtures::example1();
        let th = emit_theory(&m, &[], Variant::Fol);
        assert_eq!(formula_text(th.get("A4").unwrap()), "forall x. less(x, succ(x))");
        assert_eq!(formula_text(th.get("A1").unwrap()), "forall z. exists x. eq(z, succ(x))");
        assert_eq!(formula_sexpr(th.get("A4").unwrap()), "(forall x (less x (succ x)))");
    }

    #[test]
    fn structured_round_trip_all_variants() {
        for (_, m) in fixtures::all() {
            let input = m.parse_input("0").unwrap_or_default();
            for v in [Variant::Fol, Variant::Lfi1, Variant::S5] {
                let th = emit_theory(&m, &input, v);
                let s = serialize_theory(&th, Format::Structured);
                assert!(s.starts_with(&format!("(theory {})", v.name())));
                assert_eq!(parse_structured(&s).unwrap(), th);
            }
        }
    }

    #[test]
    fn regime_tags_appear() {
        let m = fixtures::example1();
        let s5 = serialize_theory(&emit_theory(&m, &[], Variant::S5), Format::Text);
        assert!(s5.contains("and◇("));
        assert!(s5.contains("not◇("));
        assert!(s5.contains("diamond(Q_q1(t, x))"));
        assert!(s5.contains("incons(S_1(t, x))"));
        let lfi = serialize_theory(&emit_theory(&m, &[], Variant::Lfi1), Format::Text);
        assert!(lfi.contains("not~("));
        assert!(!lfi.contains('◇'));
    }

    #[test]
    fn parse_errors_are_reported() {
        assert_eq!(parse_structured("(axiom A1 true)"), Err(ParseError::MissingHeader));
        assert!(matches!(
            parse_structured("(theory FOL)\n(axiom A1 (nope x))"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(parse_structured("(theory HOL)"), Err(ParseError::UnknownVariant(_))));
        assert!(parse_formula("(and x").is_err());
    }
}
