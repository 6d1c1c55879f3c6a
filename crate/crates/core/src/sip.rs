//! Standard-form integer programs: `{ x ∈ Z^n : A x = b, l ≤ x ≤ u }`.
//!
//! Values that can grow (right-hand sides, bounds, solution vectors) are
//! arbitrary-precision. Matrix coefficients are plain `i64`; every product
//! is formed in `BigInt` before it is summed.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SipError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("crossed bounds on column {0}: l > u")]
    CrossedBounds(usize),
    #[error("duplicate matrix entry at ({0}, {1})")]
    DuplicateEntry(usize, usize),
    #[error("matrix entry ({row}, {col}) lies outside a {rows}x{cols} matrix")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("explicit zero stored at ({0}, {1})")]
    ZeroEntry(usize, usize),
    #[error("column {0} has an infinite lower bound")]
    InfiniteLowerBound(usize),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
}

impl From<serde_json::Error> for SipError {
    fn from(e: serde_json::Error) -> Self {
        SipError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// An integer extended by the two infinities. Ordered as
/// `NegInf < Finite(_) < PosInf`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtInt {
    NegInf,
    Finite(BigInt),
    PosInf,
}

impl ExtInt {
    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            ExtInt::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtInt::Finite(_))
    }

    /// Compares against a plain integer.
    pub fn cmp_int(&self, v: &BigInt) -> Ordering {
        match self {
            ExtInt::NegInf => Ordering::Less,
            ExtInt::Finite(x) => x.cmp(v),
            ExtInt::PosInf => Ordering::Greater,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            ExtInt::NegInf => Value::String("-inf".into()),
            ExtInt::PosInf => Value::String("+inf".into()),
            ExtInt::Finite(v) => Value::Number(big_to_number(v)),
        }
    }

    fn from_json(v: &Value) -> Result<Self, SipError> {
        match v {
            Value::String(s) if s == "-inf" => Ok(ExtInt::NegInf),
            Value::String(s) if s == "+inf" => Ok(ExtInt::PosInf),
            Value::Number(n) => Ok(ExtInt::Finite(number_to_big(n)?)),
            other => Err(SipError::Schema(format!(
                "bound must be an integer, \"-inf\" or \"+inf\", got {other}"
            ))),
        }
    }
}

impl From<i64> for ExtInt {
    fn from(v: i64) -> Self {
        ExtInt::Finite(BigInt::from(v))
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => write!(f, "-inf"),
            ExtInt::Finite(v) => write!(f, "{v}"),
            ExtInt::PosInf => write!(f, "+inf"),
        }
    }
}

pub(crate) fn big_to_number(v: &BigInt) -> Number {
    v.to_string()
        .parse()
        .expect("decimal integers are valid JSON numbers")
}

pub(crate) fn number_to_big(n: &Number) -> Result<BigInt, SipError> {
    n.to_string()
        .parse()
        .map_err(|_| SipError::Schema(format!("expected an integer, got {n}")))
}

/// Sparse integer matrix in canonical row-major order without stored zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, i64)>,
}

impl SparseMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        mut entries: Vec<(usize, usize, i64)>,
    ) -> Result<Self, SipError> {
        for &(r, c, v) in &entries {
            if r >= rows || c >= cols {
                return Err(SipError::IndexOutOfBounds {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            if v == 0 {
                return Err(SipError::ZeroEntry(r, c));
            }
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = entries
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(SipError::DuplicateEntry(w[0].0, w[0].1));
        }
        Ok(SparseMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds from dense rows, dropping zeros. All rows must have `cols` entries.
    pub fn from_dense(cols: usize, dense: &[Vec<i64>]) -> Result<Self, SipError> {
        let mut entries = Vec::new();
        for (r, row) in dense.iter().enumerate() {
            if row.len() != cols {
                return Err(SipError::DimensionMismatch {
                    what: "dense row",
                    expected: cols,
                    found: row.len(),
                });
            }
            entries.extend(
                row.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(c, &v)| (r, c, v)),
            );
        }
        SparseMatrix::new(dense.len(), cols, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Non-zero entries `(row, col, value)` in row-major order.
    pub fn entries(&self) -> &[(usize, usize, i64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries
            .binary_search_by_key(&(row, col), |&(r, c, _)| (r, c))
            .map(|i| self.entries[i].2)
            .unwrap_or(0)
    }

    /// Largest absolute coefficient, 0 for the zero matrix.
    pub fn max_abs(&self) -> u64 {
        self.entries
            .iter()
            .map(|&(_, _, v)| v.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Column indices of the non-zeros of each row, ascending.
    pub fn row_supports(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.rows];
        for &(r, c, _) in &self.entries {
            out[r].push(c);
        }
        out
    }

    /// Row indices of the non-zeros of each column, ascending.
    pub fn col_supports(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cols];
        for &(r, c, _) in &self.entries {
            out[c].push(r);
        }
        out
    }

    /// `(row, value)` pairs of each column.
    pub fn columns(&self) -> Vec<Vec<(usize, i64)>> {
        let mut out = vec![Vec::new(); self.cols];
        for &(r, c, v) in &self.entries {
            out[c].push((r, v));
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Keeps the listed rows (in the given order) and renumbers them from 0.
    pub fn select_rows(&self, keep: &[usize]) -> SparseMatrix {
        let supports = self.row_ranges();
        let mut entries = Vec::new();
        for (new_r, &r) in keep.iter().enumerate() {
            let (start, end) = supports[r];
            entries.extend(
                self.entries[start..end]
                    .iter()
                    .map(|&(_, c, v)| (new_r, c, v)),
            );
        }
        SparseMatrix {
            rows: keep.len(),
            cols: self.cols,
            entries,
        }
    }

    fn row_ranges(&self) -> Vec<(usize, usize)> {
        let mut ranges = vec![(0, 0); self.rows];
        let mut i = 0;
        for (r, range) in ranges.iter_mut().enumerate() {
            let start = i;
            while i < self.entries.len() && self.entries[i].0 == r {
                i += 1;
            }
            *range = (start, i);
        }
        ranges
    }

    /// `A x` with arbitrary-precision accumulation.
    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>, SipError> {
        if x.len() != self.cols {
            return Err(SipError::DimensionMismatch {
                what: "solution vector",
                expected: self.cols,
                found: x.len(),
            });
        }
        let mut out = vec![BigInt::zero(); self.rows];
        for &(r, c, v) in &self.entries {
            out[r] += &x[c] * v;
        }
        Ok(out)
    }
}

/// A standard-form integer program `{ x : A x = b, l ≤ x ≤ u }`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SipInstance {
    a: SparseMatrix,
    b: Vec<BigInt>,
    l: Vec<ExtInt>,
    u: Vec<ExtInt>,
}

impl SipInstance {
    pub fn new(
        a: SparseMatrix,
        b: Vec<BigInt>,
        l: Vec<ExtInt>,
        u: Vec<ExtInt>,
    ) -> Result<Self, SipError> {
        let sip = SipInstance { a, b, l, u };
        sip.validate()?;
        Ok(sip)
    }

    /// Convenience constructor from dense data with finite bounds.
    pub fn from_dense(
        dense: &[Vec<i64>],
        b: &[i64],
        l: &[i64],
        u: &[i64],
    ) -> Result<Self, SipError> {
        let cols = dense.first().map_or(l.len(), Vec::len);
        SipInstance::new(
            SparseMatrix::from_dense(cols, dense)?,
            b.iter().map(|&v| BigInt::from(v)).collect(),
            l.iter().map(|&v| ExtInt::from(v)).collect(),
            u.iter().map(|&v| ExtInt::from(v)).collect(),
        )
    }

    /// Checks every structural invariant of the instance.
    pub fn validate(&self) -> Result<(), SipError> {
        let check = |what, expected, found| {
            if expected == found {
                Ok(())
            } else {
                Err(SipError::DimensionMismatch {
                    what,
                    expected,
                    found,
                })
            }
        };
        check("b", self.a.rows, self.b.len())?;
        check("l", self.a.cols, self.l.len())?;
        check("u", self.a.cols, self.u.len())?;

        let mut seen: Option<(usize, usize)> = None;
        for &(r, c, v) in &self.a.entries {
            if r >= self.a.rows || c >= self.a.cols {
                return Err(SipError::IndexOutOfBounds {
                    row: r,
                    col: c,
                    rows: self.a.rows,
                    cols: self.a.cols,
                });
            }
            if v == 0 {
                return Err(SipError::ZeroEntry(r, c));
            }
            if seen == Some((r, c)) {
                return Err(SipError::DuplicateEntry(r, c));
            }
            seen = Some((r, c));
        }

        for (i, (l, u)) in self.l.iter().zip(&self.u).enumerate() {
            if l > u || *l == ExtInt::PosInf || *u == ExtInt::NegInf {
                return Err(SipError::CrossedBounds(i));
            }
        }
        Ok(())
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &[BigInt] {
        &self.b
    }

    pub fn lower(&self) -> &[ExtInt] {
        &self.l
    }

    pub fn upper(&self) -> &[ExtInt] {
        &self.u
    }

    pub fn rows(&self) -> usize {
        self.a.rows
    }

    pub fn cols(&self) -> usize {
        self.a.cols
    }

    /// True iff `x` satisfies `A x = b` and `l ≤ x ≤ u`.
    pub fn evaluate(&self, x: &[BigInt]) -> Result<bool, SipError> {
        let ax = self.a.mul_vec(x)?;
        if ax != self.b {
            return Ok(false);
        }
        Ok(x.iter()
            .zip(self.l.iter().zip(&self.u))
            .all(|(v, (l, u))| l.cmp_int(v) != Ordering::Greater && u.cmp_int(v) != Ordering::Less))
    }

    /// Substitutes `x = x' + l` so that every lower bound becomes 0.
    /// Returns the shifted instance and the offset `l`.
    pub fn shift_to_zero_lower_bounds(&self) -> Result<(SipInstance, Vec<BigInt>), SipError> {
        let offset = self
            .l
            .iter()
            .enumerate()
            .map(|(i, l)| l.finite().cloned().ok_or(SipError::InfiniteLowerBound(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let a_l = self.a.mul_vec(&offset)?;
        let b = self.b.iter().zip(a_l).map(|(b, al)| b - al).collect();
        let u = self
            .u
            .iter()
            .zip(&offset)
            .map(|(u, l)| match u {
                ExtInt::Finite(v) => ExtInt::Finite(v - l),
                other => other.clone(),
            })
            .collect();
        let l = vec![ExtInt::Finite(BigInt::zero()); self.a.cols];
        let shifted = SipInstance {
            a: self.a.clone(),
            b,
            l,
            u,
        };
        Ok((shifted, offset))
    }

    /// Same instance restricted to the listed rows.
    pub fn select_rows(&self, keep: &[usize]) -> SipInstance {
        SipInstance {
            a: self.a.select_rows(keep),
            b: keep.iter().map(|&r| self.b[r].clone()).collect(),
            l: self.l.clone(),
            u: self.u.clone(),
        }
    }

    /// Compact JSON in the fixed key order `rows, cols, entries, b, l, u`.
    pub fn to_json(&self) -> String {
        let doc = SipJson {
            rows: self.a.rows,
            cols: self.a.cols,
            entries: self.a.entries.clone(),
            b: self.b.iter().map(big_to_number).collect(),
            l: self.l.iter().map(ExtInt::to_json).collect(),
            u: self.u.iter().map(ExtInt::to_json).collect(),
        };
        serde_json::to_string(&doc).expect("SIP documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, SipError> {
        let doc: SipJson = serde_json::from_str(text)?;
        let a = SparseMatrix::new(doc.rows, doc.cols, doc.entries)?;
        let b = doc
            .b
            .iter()
            .map(number_to_big)
            .collect::<Result<Vec<_>, _>>()?;
        let l = doc
            .l
            .iter()
            .map(ExtInt::from_json)
            .collect::<Result<Vec<_>, _>>()?;
        let u = doc
            .u
            .iter()
            .map(ExtInt::from_json)
            .collect::<Result<Vec<_>, _>>()?;
        SipInstance::new(a, b, l, u)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SipJson {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, i64)>,
    b: Vec<Number>,
    l: Vec<Value>,
    u: Vec<Value>,
}

/// Outcome of a feasibility decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Feasible(Vec<BigInt>),
    Infeasible,
}

impl SolveResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveResult::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[BigInt]> {
        match self {
            SolveResult::Feasible(x) => Some(x),
            SolveResult::Infeasible => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionJson {
    x: Vec<Number>,
}

/// Solution JSON: `{"x":[...]}`.
pub fn solution_to_json(x: &[BigInt]) -> String {
    let doc = SolutionJson {
        x: x.iter().map(big_to_number).collect(),
    };
    serde_json::to_string(&doc).expect("solution documents always serialize")
}

pub fn solution_from_json(text: &str) -> Result<Vec<BigInt>, SipError> {
    let doc: SolutionJson = serde_json::from_str(text)?;
    doc.x.iter().map(number_to_big).collect()
}
