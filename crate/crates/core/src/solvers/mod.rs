//! Feasibility deciders for standard-form integer programs.
//!
//! * [`brute_force`]: exhaustive box scan, the test oracle.
//! * [`solve_few_rows`]: dynamic program over partial row sums, exact for any
//!   row count but practical when rows and coefficients are small.
//! * [`solve_vertex_cover`]: drops dependent rows, bounds the remaining row
//!   count by twice the vertex cover number of the incidence graph, then
//!   runs the few-rows solver.

mod brute;
mod few_rows;
mod row_basis;
mod vertex_cover;

pub use brute::{brute_force, BRUTE_FORCE_MAX_POINTS};
pub use few_rows::{solve_few_rows, FEW_ROWS_MAX_STATES};
pub use row_basis::{remove_dependent_rows, RowBasisResult};
pub use vertex_cover::{min_vertex_cover, solve_vertex_cover, MAX_COVER_SIZE, MAX_COVER_VERTICES};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::sip::{ExtInt, SipError, SipInstance, SolveResult};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("column {0} has an infinite bound")]
    UnboundedVariable(usize),
    #[error("column {0} has an infinite lower bound")]
    InfiniteLowerBound(usize),
    #[error("column {0} has no finite upper bound and none can be derived")]
    UnprunableUnboundedVariable(usize),
    #[error("search space exceeds the solver budget")]
    SearchSpaceTooLarge,
    #[error("minimum vertex cover exceeds {MAX_COVER_SIZE}")]
    BudgetExceeded,
    #[error("graph has {0} vertices; vertex cover search is capped at {MAX_COVER_VERTICES}")]
    GraphTooLarge(usize),
    #[error("{rows} independent rows exceed twice the vertex cover size {cover}")]
    RowBoundViolated { rows: usize, cover: usize },
    #[error("solver produced a vector that fails evaluation")]
    InvalidWitness,
    #[error(transparent)]
    Sip(#[from] SipError),
}

/// Upper bounds past this (after shifting) are treated as unbounded.
const FINITE_CAP: i64 = 1 << 40;

/// Instance shifted to zero lower bounds, in machine integers.
struct Prepared {
    rows: usize,
    /// `(row, coefficient)` per column.
    columns: Vec<Vec<(usize, i64)>>,
    /// `None` for unbounded (or astronomically large) upper bounds.
    upper: Vec<Option<i64>>,
    rhs: Vec<i128>,
    offset: Vec<BigInt>,
}

enum Preparation {
    Ready(Prepared),
    /// The right-hand side is out of reach of any box point.
    Infeasible,
}

fn prepare(sip: &SipInstance) -> Result<Preparation, SolverError> {
    if let Some(i) = sip.lower().iter().position(|l| !l.is_finite()) {
        return Err(SolverError::InfiniteLowerBound(i));
    }
    let (shifted, offset) = sip.shift_to_zero_lower_bounds()?;
    let upper: Vec<Option<i64>> = shifted
        .upper()
        .iter()
        .map(|u| match u {
            ExtInt::Finite(v) => v.to_i64().filter(|&v| v <= FINITE_CAP),
            _ => None,
        })
        .collect();
    let columns = shifted.matrix().columns();

    let mut rhs = Vec::with_capacity(shifted.rows());
    for (r, b) in shifted.rhs().iter().enumerate() {
        match b.to_i128().filter(|v| v.abs() < 1 << 100) {
            Some(v) => rhs.push(v),
            None => {
                // With every column of the row bounded, |row sum| is at most
                // sum |a| * u; a rhs beyond that is out of reach.
                let mut reach = Some(BigInt::from(0));
                for (col, u) in columns.iter().zip(&upper) {
                    for &(_, a) in col.iter().filter(|&&(rr, _)| rr == r) {
                        reach = match (reach, u) {
                            (Some(acc), Some(u)) => Some(acc + BigInt::from(a).abs() * u),
                            _ => None,
                        };
                    }
                }
                return match reach {
                    Some(reach) if b.abs() > reach => Ok(Preparation::Infeasible),
                    _ => Err(SolverError::SearchSpaceTooLarge),
                };
            }
        }
    }
    Ok(Preparation::Ready(Prepared {
        rows: shifted.rows(),
        columns,
        upper,
        rhs,
        offset,
    }))
}

impl Prepared {
    fn unshift(&self, x: &[i64]) -> Vec<BigInt> {
        x.iter().zip(&self.offset).map(|(&v, l)| l + v).collect()
    }
}

/// Wraps a witness after checking it against the original instance.
fn certify(sip: &SipInstance, x: Vec<BigInt>) -> Result<SolveResult, SolverError> {
    if sip.evaluate(&x)? {
        Ok(SolveResult::Feasible(x))
    } else {
        Err(SolverError::InvalidWitness)
    }
}
