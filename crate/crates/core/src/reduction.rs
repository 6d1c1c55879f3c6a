//! 3-CNF to standard-form IP with `b = 0`, coefficients in `{-1, 0, 1}`
//! and incidence treedepth at most 5.
//!
//! Variable `v_i` receives the `i`-th prime `p_i`. A shared column `y`
//! encodes an assignment through its residues: `y mod p_i` is forced into
//! `{0, 1}` by the variable gadget
//!
//! ```text
//!   x_1 - x_l = 0                  l = 2..p_i
//!   x_0 - y - (x_1 + ... + x_p) = 0      0 <= x_0 <= 1
//! ```
//!
//! which is equivalent to `x_0 = y + p_i * x_1`. A clause `C_j` over
//! variables with primes multiplying to `N_j` uses the same gadget with
//! modulus `N_j`, and the box `d_j + 1 <= z_0 <= N_j + d_j - 1` removes
//! exactly the residue class `d_j` of the falsifying assignment.
//!
//! Column order: `y`, then each `x`-block (`l` ascending), then each
//! `z`-block. Row order: all `x_1 - x_l` rows, all `x`-sum rows, all
//! `z_1 - z_l` rows, all `z`-sum rows.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Assignment, CnfFormula, Literal};
use crate::numbers::{crt, nth_primes, CrtSystem};
use crate::sip::{ExtInt, SipInstance, SolveResult, SparseMatrix};
use crate::treedepth::EliminationForest;

/// Column budget for generated instances.
pub const MAX_COLUMNS: usize = 10_000_000;

/// Variable cap for [`decide_reduction`].
pub const MAX_DECIDE_VARIABLES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("formula has no variables")]
    NoVariables,
    #[error("clause {0} is empty; the formula is trivially unsatisfiable")]
    EmptyClause(usize),
    #[error("clause {0} mentions a variable twice; normalize the formula first")]
    NotNormalized(usize),
    #[error("instance would need {0} columns")]
    TooLarge(usize),
    #[error("{0} variables exceed the enumeration cap of {MAX_DECIDE_VARIABLES}")]
    TooManyVariables(usize),
    #[error("provenance does not describe this instance: {0}")]
    ProvenanceMismatch(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("assignment has {found} values, formula has {expected} variables")]
    LengthMismatch { expected: usize, found: usize },
    #[error("assignment falsifies clause {0}")]
    Falsifies(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("vector is not a solution of the generated instance")]
    NotASolution,
}

/// What a column of the generated matrix stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnRole {
    Y,
    X { var: usize, index: usize },
    Z { clause: usize, index: usize },
}

/// Which constraint a row of the generated matrix is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowRole {
    /// `x_1 - x_index = 0`
    XEqual { var: usize, index: usize },
    /// `x_0 - y - sum x_l = 0`
    XMod { var: usize },
    /// `z_1 - z_index = 0`
    ZEqual { clause: usize, index: usize },
    /// `z_0 - y - sum z_l = 0`
    ZMod { clause: usize },
}

/// Columns and rows of one gadget (variable or clause).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    pub modulus: u64,
    /// Columns for indices `0..=modulus`.
    pub cols: Vec<usize>,
    /// Rows `x_1 - x_l = 0` for `l = 2..=modulus`, in that order.
    pub equal_rows: Vec<usize>,
    pub mod_row: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    sip: SipInstance,
    primes: Vec<u64>,
    forbidden: Vec<u64>,
    y: usize,
    variables: Vec<Gadget>,
    clauses: Vec<Gadget>,
    columns: Vec<ColumnRole>,
    rows: Vec<RowRole>,
    certificate: EliminationForest,
}

impl ReductionOutput {
    pub fn sip(&self) -> &SipInstance {
        &self.sip
    }

    /// `p_i` per formula variable.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `d_j` per clause.
    pub fn forbidden(&self) -> &[u64] {
        &self.forbidden
    }

    /// `‖C_j‖` per clause.
    pub fn clause_norms(&self) -> Vec<u64> {
        self.clauses.iter().map(|g| g.modulus).collect()
    }

    pub fn y_column(&self) -> usize {
        self.y
    }

    pub fn variable_gadgets(&self) -> &[Gadget] {
        &self.variables
    }

    pub fn clause_gadgets(&self) -> &[Gadget] {
        &self.clauses
    }

    pub fn column_roles(&self) -> &[ColumnRole] {
        &self.columns
    }

    pub fn row_roles(&self) -> &[RowRole] {
        &self.rows
    }

    /// Depth-5 elimination forest of the incidence graph.
    pub fn certificate(&self) -> &EliminationForest {
        &self.certificate
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            y: self.y,
            x: self
                .variables
                .iter()
                .enumerate()
                .map(|(i, g)| (i, g.cols.clone()))
                .collect(),
            z: self
                .clauses
                .iter()
                .enumerate()
                .map(|(j, g)| (j, g.cols.clone()))
                .collect(),
            primes: self.primes.clone(),
            forbidden: self.forbidden.clone(),
        }
    }

    /// Rebuilds the output from a serialized instance and its provenance,
    /// checking that the two agree with the construction.
    pub fn from_provenance(sip: SipInstance, prov: &Provenance) -> Result<Self, ReductionError> {
        let mismatch = |s: &str| ReductionError::ProvenanceMismatch(s.to_string());
        if prov.x.len() != prov.primes.len() || prov.z.len() != prov.forbidden.len() {
            return Err(mismatch("block counts differ from primes/forbidden"));
        }
        let mut norms = Vec::with_capacity(prov.z.len());
        for (k, (&j, cols)) in prov.z.iter().enumerate() {
            if j != k || cols.len() < 2 {
                return Err(mismatch(
                    "clause blocks must be numbered 0.. and non-trivial",
                ));
            }
            norms.push(cols.len() as u64 - 1);
        }
        let built = build(&prov.primes, &norms, &prov.forbidden)?;
        if built.provenance() != *prov {
            return Err(mismatch("column layout differs"));
        }
        if built.sip != sip {
            return Err(mismatch("matrix or bounds differ"));
        }
        Ok(built)
    }
}

/// Serializable column provenance:
/// `{"y":col,"x":{i:[cols]},"z":{j:[cols]},"primes":[...],"forbidden":[...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub y: usize,
    pub x: BTreeMap<usize, Vec<usize>>,
    pub z: BTreeMap<usize, Vec<usize>>,
    pub primes: Vec<u64>,
    pub forbidden: Vec<u64>,
}

impl Provenance {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("provenance always serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Product of the primes of a clause's variables.
pub fn clause_norm(clause: &[Literal], primes: &[u64]) -> u64 {
    clause.iter().map(|l| primes[l.var]).product()
}

/// The value in `[1, ‖C‖]` whose residues mod the clause's primes encode
/// the assignment falsifying the clause: `0` (false) for a positive
/// literal, `1` (true) for a negated one. `primes` is aligned with
/// `clause`. A CRT residue of 0 maps to `‖C‖`.
///
/// For `(v1 ∨ ¬v2 ∨ v3)` over `(2, 3, 5)` this is 10. The value 21 that
/// sometimes shows up for this clause encodes the complementary assignment
/// `(T, F, T)`, which satisfies it.
pub fn falsifying_value(clause: &[Literal], primes: &[u64]) -> u64 {
    assert_eq!(clause.len(), primes.len(), "one prime per literal");
    let residues: Vec<u64> = clause.iter().map(|l| u64::from(!l.positive)).collect();
    let sys = CrtSystem::from_u64(primes, &residues).expect("clause primes are distinct");
    let norm: u64 = primes.iter().product();
    let r: u64 = crt(&sys)
        .try_into()
        .expect("residue is below the clause norm");
    if r == 0 {
        norm
    } else {
        r
    }
}

/// Builds the instance for a normalized formula without empty clauses.
pub fn reduce(cnf: &CnfFormula) -> Result<ReductionOutput, ReductionError> {
    if cnf.num_vars() == 0 {
        return Err(ReductionError::NoVariables);
    }
    if let Some(j) = cnf.clauses().iter().position(Vec::is_empty) {
        return Err(ReductionError::EmptyClause(j));
    }
    if let Some(j) = cnf.clauses().iter().position(|c| {
        c.iter()
            .enumerate()
            .any(|(i, l)| c[i + 1..].iter().any(|k| k.var == l.var))
    }) {
        return Err(ReductionError::NotNormalized(j));
    }
    let primes = nth_primes(cnf.num_vars());
    let mut norms = Vec::with_capacity(cnf.clauses().len());
    let mut forbidden = Vec::with_capacity(cnf.clauses().len());
    for clause in cnf.clauses() {
        let clause_primes: Vec<u64> = clause.iter().map(|l| primes[l.var]).collect();
        let norm = clause_primes
            .iter()
            .try_fold(1u64, |acc, &p| acc.checked_mul(p))
            .filter(|&n| n < MAX_COLUMNS as u64)
            .ok_or(ReductionError::TooLarge(MAX_COLUMNS))?;
        norms.push(norm);
        forbidden.push(falsifying_value(clause, &clause_primes));
    }
    build(&primes, &norms, &forbidden)
}

fn build(
    primes: &[u64],
    norms: &[u64],
    forbidden: &[u64],
) -> Result<ReductionOutput, ReductionError> {
    if primes.is_empty() {
        return Err(ReductionError::NoVariables);
    }
    if norms.len() != forbidden.len()
        || norms
            .iter()
            .zip(forbidden)
            .any(|(&n, &d)| n < 2 || d == 0 || d > n)
        || primes.iter().any(|&p| p < 2)
    {
        return Err(ReductionError::ProvenanceMismatch(
            "moduli must be at least 2 and forbidden values in [1, modulus]".into(),
        ));
    }
    let num_cols = 1 + primes
        .iter()
        .chain(norms)
        .try_fold(0usize, |acc, &q| acc.checked_add(q as usize + 1))
        .filter(|&c| c < MAX_COLUMNS)
        .ok_or(ReductionError::TooLarge(MAX_COLUMNS))?;

    let x_equal_rows: usize = primes.iter().map(|&p| p as usize - 1).sum();
    let z_equal_rows: usize = norms.iter().map(|&n| n as usize - 1).sum();
    let num_rows = x_equal_rows + primes.len() + z_equal_rows + norms.len();

    let mut columns = vec![ColumnRole::Y];
    let mut rows = vec![RowRole::XMod { var: 0 }; num_rows];
    let mut entries = Vec::new();
    let mut lower = vec![ExtInt::NegInf; num_cols];
    let mut upper = vec![ExtInt::PosInf; num_cols];
    let y = 0;

    let mut equal_cursor = 0;
    let mut mod_cursor = x_equal_rows;
    let mut variables = Vec::with_capacity(primes.len());
    for (i, &p) in primes.iter().enumerate() {
        let g = push_gadget(
            p,
            y,
            &mut columns,
            &mut entries,
            &mut equal_cursor,
            &mut mod_cursor,
            |index| ColumnRole::X { var: i, index },
        );
        for (k, &r) in g.equal_rows.iter().enumerate() {
            rows[r] = RowRole::XEqual {
                var: i,
                index: k + 2,
            };
        }
        rows[g.mod_row] = RowRole::XMod { var: i };
        lower[g.cols[0]] = ExtInt::from(0);
        upper[g.cols[0]] = ExtInt::from(1);
        variables.push(g);
    }

    equal_cursor = mod_cursor;
    mod_cursor = equal_cursor + z_equal_rows;
    let mut clauses = Vec::with_capacity(norms.len());
    for (j, (&n, &d)) in norms.iter().zip(forbidden).enumerate() {
        let g = push_gadget(
            n,
            y,
            &mut columns,
            &mut entries,
            &mut equal_cursor,
            &mut mod_cursor,
            |index| ColumnRole::Z { clause: j, index },
        );
        for (k, &r) in g.equal_rows.iter().enumerate() {
            rows[r] = RowRole::ZEqual {
                clause: j,
                index: k + 2,
            };
        }
        rows[g.mod_row] = RowRole::ZMod { clause: j };
        lower[g.cols[0]] = ExtInt::Finite(BigInt::from(d) + 1);
        upper[g.cols[0]] = ExtInt::Finite(BigInt::from(n) + d - 1);
        clauses.push(g);
    }
    debug_assert_eq!(columns.len(), num_cols);
    debug_assert_eq!(mod_cursor, num_rows);

    let a = SparseMatrix::new(num_rows, num_cols, entries).expect("gadget entries are distinct");
    let sip = SipInstance::new(a, vec![BigInt::zero(); num_rows], lower, upper)
        .expect("gadget bounds are consistent");
    let mut out = ReductionOutput {
        sip,
        primes: primes.to_vec(),
        forbidden: forbidden.to_vec(),
        y,
        variables,
        clauses,
        columns,
        rows,
        certificate: EliminationForest::new(Vec::new()),
    };
    out.certificate = certificate_forest(&out);
    Ok(out)
}

fn push_gadget(
    modulus: u64,
    y: usize,
    columns: &mut Vec<ColumnRole>,
    entries: &mut Vec<(usize, usize, i64)>,
    equal_cursor: &mut usize,
    mod_cursor: &mut usize,
    role: impl Fn(usize) -> ColumnRole,
) -> Gadget {
    let q = modulus as usize;
    let first = columns.len();
    columns.extend((0..=q).map(role));
    let cols: Vec<usize> = (first..=first + q).collect();

    let mut equal_rows = Vec::with_capacity(q - 1);
    for l in 2..=q {
        let r = *equal_cursor;
        *equal_cursor += 1;
        entries.push((r, cols[1], 1));
        entries.push((r, cols[l], -1));
        equal_rows.push(r);
    }

    let mod_row = *mod_cursor;
    *mod_cursor += 1;
    entries.push((mod_row, cols[0], 1));
    entries.push((mod_row, y, -1));
    entries.extend(cols[1..].iter().map(|&c| (mod_row, c, -1)));

    Gadget {
        modulus,
        cols,
        equal_rows,
        mod_row,
    }
}

/// Elimination forest of the incidence graph rooted at `y`.
///
/// Each gadget hangs below `y` as the chain `sum-row -> col 1`, under
/// which sit `col 0` and, for every `l >= 2`, the pair
/// `equal-row(l) -> col l`. Depth is 5 whenever some gadget has modulus
/// at least 2.
pub fn certificate_forest(out: &ReductionOutput) -> EliminationForest {
    let m = out.sip.rows();
    let col = |c: usize| m + c;
    let mut parent = vec![None; m + out.sip.cols()];
    for g in out.variables.iter().chain(&out.clauses) {
        parent[g.mod_row] = Some(col(out.y));
        parent[col(g.cols[1])] = Some(g.mod_row);
        parent[col(g.cols[0])] = Some(col(g.cols[1]));
        for (k, &r) in g.equal_rows.iter().enumerate() {
            parent[r] = Some(col(g.cols[1]));
            parent[col(g.cols[k + 2])] = Some(r);
        }
    }
    EliminationForest::new(parent)
}

/// Solution vector encoding a satisfying assignment.
///
/// `y` is the CRT value of the assignment bits, `x_0` the bit itself,
/// `z_0` the representative of `y mod ‖C_j‖` inside the clause box, and
/// every other gadget column the quotient `(col_0 - y) / modulus`.
pub fn lift_assignment(out: &ReductionOutput, a: &Assignment) -> Result<Vec<BigInt>, LiftError> {
    if a.len() != out.primes.len() {
        return Err(LiftError::LengthMismatch {
            expected: out.primes.len(),
            found: a.len(),
        });
    }
    let bits: Vec<u64> = a.values().iter().map(|&b| u64::from(b)).collect();
    let y = crt(&CrtSystem::from_u64(&out.primes, &bits).expect("primes are distinct"));

    let mut x = vec![BigInt::zero(); out.sip.cols()];
    x[out.y] = y.clone();
    for (g, &bit) in out.variables.iter().zip(&bits) {
        fill_gadget(&mut x, g, BigInt::from(bit), &y);
    }
    for (j, (g, &d)) in out.clauses.iter().zip(&out.forbidden).enumerate() {
        let n = BigInt::from(g.modulus);
        let d = BigInt::from(d);
        if y.mod_floor(&n) == d.mod_floor(&n) {
            return Err(LiftError::Falsifies(j));
        }
        let low = &d + 1;
        let z0 = &low + Integer::mod_floor(&(&y - &low), &n);
        fill_gadget(&mut x, g, z0, &y);
    }
    Ok(x)
}

fn fill_gadget(x: &mut [BigInt], g: &Gadget, head: BigInt, y: &BigInt) {
    let q = (&head - y) / BigInt::from(g.modulus);
    for &c in &g.cols[1..] {
        x[c] = q.clone();
    }
    x[g.cols[0]] = head;
}

/// Reads the assignment off a solution: `v_i` is true iff `y ≡ 1 (mod p_i)`.
pub fn extract_assignment(out: &ReductionOutput, x: &[BigInt]) -> Result<Assignment, ExtractError> {
    if !out.sip.evaluate(x).unwrap_or(false) {
        return Err(ExtractError::NotASolution);
    }
    let y = &x[out.y];
    Ok(Assignment(
        out.primes
            .iter()
            .map(|&p| y.mod_floor(&BigInt::from(p)) == BigInt::from(1))
            .collect(),
    ))
}

/// Decides the generated instance by trying the lift of every assignment
/// in lexicographic order. Every returned witness has passed `evaluate`.
pub fn decide_reduction(out: &ReductionOutput) -> Result<SolveResult, ReductionError> {
    let n = out.primes.len();
    if n > MAX_DECIDE_VARIABLES {
        return Err(ReductionError::TooManyVariables(n));
    }
    for a in Assignment::enumerate(n) {
        if let Ok(x) = lift_assignment(out, &a) {
            if out
                .sip
                .evaluate(&x)
                .expect("lifted vector has one entry per column")
            {
                return Ok(SolveResult::Feasible(x));
            }
        }
    }
    Ok(SolveResult::Infeasible)
}
