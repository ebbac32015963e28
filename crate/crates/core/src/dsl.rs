//! Line-oriented text format for machines.
//!
//! ```text
//! machine flip
//! states: scan done
//! symbols: _ 0 1
//! blank: _
//! start: scan @ 0
//! inst: scan 0 -> write 1, done
//! ```
//!
//! `#` starts a comment. A `^` suffix on the head state or scanned symbol of
//! an instruction marks an inconsistency condition.

use std::fmt::Write as _;

use crate::machine::{Action, Instruction, Machine, MachineBuilder, MachineError, StateId, SymbolId};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Token {
    text: String,
    col: usize,
}

fn lex(line: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, c) in line.chars().enumerate() {
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() || matches!(c, ',' | ':' | '@') {
            if !cur.is_empty() {
                out.push(Token { text: std::mem::take(&mut cur), col: start });
            }
            if !c.is_whitespace() {
                out.push(Token { text: c.to_string(), col });
            }
            continue;
        }
        if cur.is_empty() {
            start = col;
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        out.push(Token { text: cur, col: start });
    }
    out
}

#[derive(Debug)]
struct RawInst {
    line: usize,
    head: Token,
    head_incons: bool,
    scan: Token,
    scan_incons: bool,
    action: RawAction,
    next: Token,
}

#[derive(Debug)]
enum RawAction {
    Write(Token),
    Right,
    Left,
}

#[derive(Default)]
struct Raw {
    name: Option<String>,
    states: Vec<(usize, Token)>,
    symbols: Vec<(usize, Token)>,
    blank: Option<(usize, Token)>,
    start: Option<(usize, Token, i64)>,
    accept: Option<(usize, Token)>,
    reject: Option<(usize, Token)>,
    insts: Vec<RawInst>,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> MachineError {
    MachineError::Syntax { line, col, msg: msg.into() }
}

fn ident(line: usize, tok: &Token) -> Result<Token, MachineError> {
    if crate::machine::is_identifier(&tok.text) {
        Ok(tok.clone())
    } else {
        Err(syntax(line, tok.col, format!("expected identifier, found `{}`", tok.text)))
    }
}

fn single(line: usize, key: &Token, args: &[Token]) -> Result<Token, MachineError> {
    match args {
        [t] => ident(line, t),
        [] => Err(syntax(line, key.col, format!("`{}` expects one identifier", key.text))),
        [_, extra, ..] => Err(syntax(line, extra.col, format!("unexpected `{}`", extra.text))),
    }
}

fn strip_mark(line: usize, tok: &Token) -> Result<(Token, bool), MachineError> {
    let (text, marked) = match tok.text.strip_suffix('^') {
        Some(t) => (t.to_owned(), true),
        None => (tok.text.clone(), false),
    };
    let t = Token { text, col: tok.col };
    Ok((ident(line, &t)?, marked))
}

fn parse_inst(line: usize, key: &Token, args: &[Token]) -> Result<RawInst, MachineError> {
    let end_col = args.last().map_or(key.col, |t| t.col);
    let at = |k: usize| -> Result<&Token, MachineError> {
        args.get(k).ok_or_else(|| syntax(line, end_col, "incomplete instruction"))
    };
    let (head, head_incons) = strip_mark(line, at(0)?)?;
    let (scan, scan_incons) = strip_mark(line, at(1)?)?;
    let arrow = at(2)?;
    if arrow.text != "->" {
        return Err(syntax(line, arrow.col, format!("expected `->`, found `{}`", arrow.text)));
    }
    let op = at(3)?;
    let (action, rest) = match op.text.as_str() {
        "write" => (RawAction::Write(ident(line, at(4)?)?), 5),
        "right" => (RawAction::Right, 4),
        "left" => (RawAction::Left, 4),
        other => return Err(syntax(line, op.col, format!("expected `write`, `right` or `left`, found `{other}`"))),
    };
    let comma = at(rest)?;
    if comma.text != "," {
        return Err(syntax(line, comma.col, format!("expected `,`, found `{}`", comma.text)));
    }
    let next = ident(line, at(rest + 1)?)?;
    if let Some(extra) = args.get(rest + 2) {
        return Err(syntax(line, extra.col, format!("unexpected `{}`", extra.text)));
    }
    Ok(RawInst { line, head, head_incons, scan, scan_incons, action, next })
}

fn parse_raw(text: &str) -> Result<Raw, MachineError> {
    let mut raw = Raw::default();
    for (idx, src) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = lex(src);
        if toks.is_empty() {
            continue;
        }
        if toks[0].text == "machine" {
            let name = single(line, &toks[0], &toks[1..])?;
            if raw.name.replace(name.text).is_some() {
                return Err(syntax(line, toks[0].col, "duplicate `machine` directive"));
            }
            continue;
        }
        // Split the line into `key: args` segments.
        let mut segments: Vec<(Token, Vec<Token>)> = Vec::new();
        let mut k = 0;
        while k < toks.len() {
            let is_key = toks.get(k + 1).is_some_and(|t| t.text == ":");
            if is_key {
                segments.push((toks[k].clone(), Vec::new()));
                k += 2;
                continue;
            }
            match segments.last_mut() {
                Some((_, args)) => args.push(toks[k].clone()),
                None => return Err(syntax(line, toks[k].col, format!("expected directive, found `{}`", toks[k].text))),
            }
            k += 1;
        }
        for (key, args) in segments {
            match key.text.as_str() {
                "states" => {
                    for t in &args {
                        raw.states.push((line, ident(line, t)?));
                    }
                }
                "symbols" => {
                    for t in &args {
                        raw.symbols.push((line, ident(line, t)?));
                    }
                }
                "blank" => raw.blank = Some((line, single(line, &key, &args)?)),
                "accept" => raw.accept = Some((line, single(line, &key, &args)?)),
                "reject" => raw.reject = Some((line, single(line, &key, &args)?)),
                "start" => {
                    let [state, at, pos] = args.as_slice() else {
                        return Err(syntax(line, key.col, "expected `start: <state> @ <int>`"));
                    };
                    if at.text != "@" {
                        return Err(syntax(line, at.col, format!("expected `@`, found `{}`", at.text)));
                    }
                    let p: i64 = pos
                        .text
                        .parse()
                        .map_err(|_| syntax(line, pos.col, format!("expected integer, found `{}`", pos.text)))?;
                    raw.start = Some((line, ident(line, state)?, p));
                }
                "inst" => raw.insts.push(parse_inst(line, &key, &args)?),
                other => return Err(syntax(line, key.col, format!("unknown directive `{other}`"))),
            }
        }
    }
    Ok(raw)
}

/// Parses a machine description.
pub fn parse_machine(text: &str) -> Result<Machine, MachineError> {
    let raw = parse_raw(text)?;
    let name = raw.name.ok_or(MachineError::MissingDirective("machine"))?;
    let mut b = MachineBuilder::new(name);
    for (k, (line, t)) in raw.states.iter().enumerate() {
        if b.state(&t.text).0 < k {
            return Err(MachineError::DuplicateState { line: *line, col: t.col, name: t.text.clone() });
        }
    }
    for (k, (line, t)) in raw.symbols.iter().enumerate() {
        if b.symbol(&t.text).0 < k {
            return Err(MachineError::DuplicateSymbol { line: *line, col: t.col, name: t.text.clone() });
        }
    }
    let state = |line: usize, t: &Token| -> Result<StateId, MachineError> {
        raw.states
            .iter()
            .position(|(_, s)| s.text == t.text)
            .map(StateId)
            .ok_or_else(|| MachineError::UndeclaredState { line, col: t.col, name: t.text.clone() })
    };
    let symbol = |line: usize, t: &Token| -> Result<SymbolId, MachineError> {
        raw.symbols
            .iter()
            .position(|(_, s)| s.text == t.text)
            .map(SymbolId)
            .ok_or_else(|| MachineError::UndeclaredSymbol { line, col: t.col, name: t.text.clone() })
    };
    let (bl, bt) = raw.blank.as_ref().ok_or(MachineError::MissingDirective("blank"))?;
    symbol(*bl, bt)?;
    b.blank(&bt.text);
    let (sl, st, sp) = raw.start.as_ref().ok_or(MachineError::MissingDirective("start"))?;
    state(*sl, st)?;
    b.start(&st.text, *sp);
    if let Some((l, t)) = &raw.accept {
        state(*l, t)?;
        b.accept(&t.text);
    }
    if let Some((l, t)) = &raw.reject {
        state(*l, t)?;
        b.reject(&t.text);
    }
    for ri in &raw.insts {
        let action = match &ri.action {
            RawAction::Write(t) => Action::Write(symbol(ri.line, t)?),
            RawAction::Right => Action::Right,
            RawAction::Left => Action::Left,
        };
        b.push(Instruction {
            head_state: state(ri.line, &ri.head)?,
            head_incons: ri.head_incons,
            scan_symbol: symbol(ri.line, &ri.scan)?,
            scan_incons: ri.scan_incons,
            action,
            next_state: state(ri.line, &ri.next)?,
        });
    }
    b.build()
}

/// Renders one instruction as it appears after `inst:`.
pub fn format_instruction(m: &Machine, inst: &Instruction) -> String {
    let mark = |b: bool| if b { "^" } else { "" };
    let action = match inst.action {
        Action::Write(s) => format!("write {}", m.symbol_name(s)),
        Action::Right => "right".to_owned(),
        Action::Left => "left".to_owned(),
    };
    format!(
        "{}{} {}{} -> {}, {}",
        m.state_name(inst.head_state),
        mark(inst.head_incons),
        m.symbol_name(inst.scan_symbol),
        mark(inst.scan_incons),
        action,
        m.state_name(inst.next_state)
    )
}

/// Canonical text form; `parse_machine(&serialize(m)) == Ok(m)`.
pub fn serialize(m: &Machine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "machine {}", m.name());
    let _ = writeln!(out, "states: {}", m.states().join(" "));
    if let Some(a) = m.accept_state() {
        let _ = writeln!(out, "accept: {}", m.state_name(a));
    }
    if let Some(r) = m.reject_state() {
        let _ = writeln!(out, "reject: {}", m.state_name(r));
    }
    let _ = writeln!(out, "symbols: {}", m.alphabet().join(" "));
    let _ = writeln!(out, "blank: {}", m.symbol_name(m.blank()));
    let _ = writeln!(out, "start: {} @ {}", m.state_name(m.start_state()), m.start_position());
    for inst in m.instructions() {
        let _ = writeln!(out, "inst: {}", format_instruction(m, inst));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_example1() {
        let m = crate::fixtures::example1();
        assert_eq!(m.states().len(), 5);
        let mut syms = m.alphabet().to_vec();
        syms.sort();
        assert_eq!(syms, ["*", "0", "1", "_"]);
        assert_eq!(m.instructions().len(), 9);
        let i8 = m.instructions()[7];
        assert!(i8.scan_incons && !i8.head_incons);
        assert_eq!(m.symbol_name(i8.scan_symbol), "1");
        assert_eq!(i8.action, Action::Write(m.symbol_id("*").unwrap()));
        assert_eq!(m.instructions().iter().filter(|i| i.has_marks()).count(), 1);
    }

    #[test]
    fn empty_machine_is_valid() {
        let m = parse_machine("machine e\nstates: q\nsymbols: _\nblank: _\nstart: q @ 0\n").unwrap();
        assert!(m.instructions().is_empty());
    }

    #[test]
    fn undeclared_state_reports_position() {
        let src = "machine x\nstates: q1\nsymbols: _\nblank: _\nstart: q1 @ 0\ninst: q1 _ -> right, q9\n";
        match parse_machine(src) {
            Err(MachineError::UndeclaredState { line, col, name }) => {
                assert_eq!((line, col, name.as_str()), (6, 22, "q9"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_declarations() {
        let src = "machine x\nstates: a b a\nsymbols: _\nblank: _\nstart: a @ 0\n";
        assert!(matches!(parse_machine(src), Err(MachineError::DuplicateState { line: 2, col: 13, .. })));
        let src = "machine x\nstates: a\nsymbols: _ 0\nsymbols: 0\nblank: _\nstart: a @ 0\n";
        assert!(matches!(parse_machine(src), Err(MachineError::DuplicateSymbol { line: 4, .. })));
    }

    #[test]
    fn syntax_errors_carry_columns() {
        let src = "machine x\nstates: a\nsymbols: _\nblank: _\nstart: a @ 0\ninst: a _ => right, a\n";
        assert!(matches!(parse_machine(src), Err(MachineError::Syntax { line: 6, col: 11, .. })));
        let src = "machine x\nstates: a\nsymbols: _\nblank: _\nstart: a @ zero\n";
        assert!(matches!(parse_machine(src), Err(MachineError::Syntax { line: 5, col: 12, .. })));
        let src = "machine x\nbogus line\n";
        assert!(matches!(parse_machine(src), Err(MachineError::Syntax { line: 2, col: 1, .. })));
    }

    #[test]
    fn inline_accept_reject_and_comments() {
        let src =
            "# header\nmachine x # name\nstates: a y n accept: y reject: n\nsymbols: _\nblank: _\nstart: a @ -2\n";
        let m = parse_machine(src).unwrap();
        assert_eq!(m.accept_state(), m.state_id("y"));
        assert_eq!(m.reject_state(), m.state_id("n"));
        assert_eq!(m.start_position(), -2);
        assert_eq!(m.states().len(), 3);
    }

    #[test]
    fn serialize_round_trips_fixtures() {
        for (_, m) in crate::fixtures::all() {
            let text = serialize(&m);
            let back = parse_machine(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(serialize(&back), text);
        }
    }
}
