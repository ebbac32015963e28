//! Conjunctive normal forms: DIMACS text, brute-force satisfiability and a
//! seeded random generator.

use std::fmt;

use rand::Rng;
use thiserror::Error;

/// Literals are signed 1-based variable indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("no clauses")]
    Empty,
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("literal {lit} out of range 1..={vars}")]
    Range { lit: i32, vars: usize },
    #[error("header announces {announced} clauses, found {found}")]
    ClauseCount { announced: usize, found: usize },
}

impl Cnf {
    pub fn new(vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self, CnfError> {
        let cnf = Cnf { vars, clauses };
        cnf.check()?;
        Ok(cnf)
    }

    fn check(&self) -> Result<(), CnfError> {
        if self.clauses.is_empty() {
            return Err(CnfError::Empty);
        }
        for (k, c) in self.clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(CnfError::EmptyClause(k + 1));
            }
            for &lit in c {
                if lit == 0 || lit.unsigned_abs() as usize > self.vars {
                    return Err(CnfError::Range { lit, vars: self.vars });
                }
            }
        }
        Ok(())
    }

    /// `assignment[i]` is the value of variable `i + 1`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&lit| {
                let v = assignment[lit.unsigned_abs() as usize - 1];
                if lit > 0 {
                    v
                } else {
                    !v
                }
            })
        })
    }

    /// First satisfying assignment in counting order, if any.
    pub fn brute_force(&self) -> Option<Vec<bool>> {
        (0..1u64 << self.vars)
            .map(|bits| (0..self.vars).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>())
            .find(|a| self.eval(a))
    }

    pub fn is_satisfiable(&self) -> bool {
        self.brute_force().is_some()
    }

    /// Parses DIMACS: `c` comment lines, a `p cnf V C` header, and clauses
    /// terminated by `0` (possibly spanning lines).
    pub fn parse_dimacs(src: &str) -> Result<Self, CnfError> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (k, line) in src.lines().enumerate() {
            let line_no = k + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            let err = |msg: &str| CnfError::Syntax { line: line_no, msg: msg.to_owned() };
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                match parts.as_slice() {
                    ["p", "cnf", v, c] => {
                        let v = v.parse().map_err(|_| err("bad variable count"))?;
                        let c = c.parse().map_err(|_| err("bad clause count"))?;
                        header = Some((v, c));
                    }
                    _ => return Err(err("expected `p cnf VARS CLAUSES`")),
                }
                continue;
            }
            if header.is_none() {
                return Err(err("clause before the header"));
            }
            for tok in line.split_whitespace() {
                let lit: i32 = tok.parse().map_err(|_| err("bad literal"))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let (vars, announced) = header.ok_or(CnfError::Syntax { line: 0, msg: "missing header".into() })?;
        if announced != clauses.len() {
            return Err(CnfError::ClauseCount { announced, found: clauses.len() });
        }
        Cnf::new(vars, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            for lit in c {
                out.push_str(&lit.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clauses: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                let lits: Vec<String> =
                    c.iter().map(|&l| if l > 0 { format!("x{l}") } else { format!("¬x{}", -l) }).collect();
                format!("({})", lits.join(" ∨ "))
            })
            .collect();
        f.write_str(&clauses.join(" ∧ "))
    }
}

/// Random CNF with `vars` variables, `1..=max_clauses` clauses of
/// `1..=max_len` distinct-variable literals each.
pub fn random_cnf(rng: &mut impl Rng, vars: usize, max_clauses: usize, max_len: usize) -> Cnf {
    assert!(vars >= 1 && max_clauses >= 1 && max_len >= 1);
    let n_clauses = rng.gen_range(1..=max_clauses);
    let clauses = (0..n_clauses)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.min(vars));
            let chosen = rand::seq::index::sample(rng, vars, len);
            chosen
                .into_iter()
                .map(|v| {
                    let lit = v as i32 + 1;
                    if rng.gen_bool(0.5) {
                        lit
                    } else {
                        -lit
                    }
                })
                .collect()
        })
        .collect();
    Cnf { vars, clauses }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn dimacs_round_trip() {
        let src = "c example\np cnf 2 2\n1 2 0\n-1 2 0\n";
        let cnf = Cnf::parse_dimacs(src).unwrap();
        assert_eq!(cnf.clauses, vec![vec![1, 2], vec![-1, 2]]);
        assert_eq!(Cnf::parse_dimacs(&cnf.to_dimacs()).unwrap(), cnf);
        assert_eq!(cnf.to_string(), "(x1 ∨ x2) ∧ (¬x1 ∨ x2)");
    }

    #[test]
    fn dimacs_errors() {
        assert!(matches!(Cnf::parse_dimacs("1 0\n"), Err(CnfError::Syntax { line: 1, .. })));
        assert!(matches!(Cnf::parse_dimacs("p cnf 1 2\n1 0\n"), Err(CnfError::ClauseCount { .. })));
        assert!(matches!(Cnf::parse_dimacs("p cnf 1 1\n3 0\n"), Err(CnfError::Range { lit: 3, .. })));
        assert!(matches!(Cnf::parse_dimacs("p cnf 1 1\n0\n"), Err(CnfError::EmptyClause(1))));
    }

    #[test]
    fn brute_force_examples() {
        assert!(Cnf::new(2, vec![vec![1, 2], vec![-1, 2]]).unwrap().is_satisfiable());
        assert!(!Cnf::new(1, vec![vec![1], vec![-1]]).unwrap().is_satisfiable());
    }

    #[test]
    fn random_cnfs_are_well_formed() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let c = random_cnf(&mut rng, 3, 4, 3);
            assert!(c.check().is_ok());
        }
    }
}
