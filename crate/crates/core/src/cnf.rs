//! CNF formulas: DIMACS I/O, normalization, brute-force satisfiability and a
//! seeded random 3-CNF generator.

use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("clause {clause} mentions variable {var}, but the formula has {num_vars} variables")]
    VariableOutOfRange {
        clause: usize,
        var: usize,
        num_vars: usize,
    },
}

/// A literal over a 0-based variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal {
            var,
            positive: true,
        }
    }

    pub fn neg(var: usize) -> Self {
        Literal {
            var,
            positive: false,
        }
    }

    /// DIMACS form: 1-based, negative for negated literals.
    pub fn from_dimacs(lit: i64) -> Self {
        Literal {
            var: lit.unsigned_abs() as usize - 1,
            positive: lit > 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn is_satisfied_by(self, values: &[bool]) -> bool {
        values[self.var] == self.positive
    }
}

/// Truth values for variables `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All assignments on `n` variables in lexicographic order
    /// (`false < true`, variable 0 most significant).
    pub fn enumerate(n: usize) -> impl Iterator<Item = Assignment> {
        assert!(n < 64, "cannot enumerate 2^{n} assignments");
        (0u64..1 << n)
            .map(move |k| Assignment((0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect()))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "T" } else { "F" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, CnfError> {
        for (j, clause) in clauses.iter().enumerate() {
            if let Some(l) = clause.iter().find(|l| l.var >= num_vars) {
                return Err(CnfError::VariableOutOfRange {
                    clause: j,
                    var: l.var,
                    num_vars,
                });
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Builds from DIMACS-style signed, 1-based literals.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Result<Self, CnfError> {
        CnfFormula::new(
            num_vars,
            clauses
                .iter()
                .map(|c| c.iter().map(|&l| Literal::from_dimacs(l)).collect())
                .collect(),
        )
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Indices of clauses containing both `v` and `¬v` for some `v`.
    pub fn tautological_clauses(&self) -> Vec<usize> {
        self.clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| is_tautology(c))
            .map(|(j, _)| j)
            .collect()
    }

    /// Drops tautological clauses and repeated literals. Empty clauses are
    /// kept.
    pub fn normalize(&self) -> CnfFormula {
        let clauses = self
            .clauses
            .iter()
            .filter(|c| !is_tautology(c))
            .map(|c| {
                let mut out: Vec<Literal> = Vec::with_capacity(c.len());
                for &l in c {
                    if !out.contains(&l) {
                        out.push(l);
                    }
                }
                out
            })
            .collect();
        CnfFormula {
            num_vars: self.num_vars,
            clauses,
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .enumerate()
                .all(|(i, l)| c[i + 1..].iter().all(|k| k.var != l.var))
        })
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.is_satisfied_by(&a.0)))
    }

    /// First model in lexicographic order, by exhaustive enumeration.
    pub fn brute_force_model(&self) -> Option<Assignment> {
        Assignment::enumerate(self.num_vars).find(|a| self.is_satisfied_by(a))
    }

    /// Parses DIMACS CNF (`c` comments, `p cnf n m`, 0-terminated clauses).
    pub fn parse_dimacs(text: &str) -> Result<Self, CnfError> {
        let err = |line: usize, message: String| CnfError::Parse { line, message };
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(err(line_no, "duplicate problem line".into()));
                }
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" {
                    return Err(err(line_no, format!("bad problem line {line:?}")));
                }
                let n = parts[2]
                    .parse()
                    .map_err(|_| err(line_no, format!("bad variable count {:?}", parts[2])))?;
                let m = parts[3]
                    .parse()
                    .map_err(|_| err(line_no, format!("bad clause count {:?}", parts[3])))?;
                header = Some((n, m));
                continue;
            }
            let Some((n, _)) = header else {
                return Err(err(line_no, "clause before problem line".into()));
            };
            for tok in line.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| err(line_no, format!("bad literal {tok:?}")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() as usize > n {
                    return Err(err(
                        line_no,
                        format!("literal {lit} exceeds declared variable count {n}"),
                    ));
                } else {
                    current.push(Literal::from_dimacs(lit));
                }
            }
        }
        let Some((n, m)) = header else {
            return Err(err(0, "missing problem line".into()));
        };
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != m {
            return Err(err(
                0,
                format!("header declares {m} clauses, found {}", clauses.len()),
            ));
        }
        CnfFormula::new(n, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&l.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    /// Random formula: each clause picks `min(3, num_vars)` distinct
    /// variables uniformly and each polarity uniformly.
    pub fn random_3cnf<R: Rng>(num_vars: usize, num_clauses: usize, rng: &mut R) -> CnfFormula {
        let width = num_vars.min(3);
        let clauses = (0..num_clauses)
            .map(|_| {
                sample(rng, num_vars, width)
                    .into_iter()
                    .map(|var| Literal {
                        var,
                        positive: rng.gen_bool(0.5),
                    })
                    .collect()
            })
            .collect();
        CnfFormula { num_vars, clauses }
    }
}

fn is_tautology(clause: &[Literal]) -> bool {
    clause.iter().any(|l| {
        clause
            .iter()
            .any(|k| k.var == l.var && k.positive != l.positive)
    })
}
