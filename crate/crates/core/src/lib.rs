//! Standard-form integer programs and incidence treedepth.
//!
//! * [`sip`]: the `{x : Ax = b, l ≤ x ≤ u}` data model, evaluation and JSON.
//! * [`gaifman`]: incidence, primal and dual graphs of a matrix.
//! * [`treedepth`]: elimination forests, exact treedepth, and conversion of
//!   incidence forests into primal/dual forests.
//! * [`numbers`]: primes and Chinese remaindering.
//! * [`cnf`] and [`reduction`]: the 3-SAT gadget construction producing
//!   instances with `b = 0`, coefficients in `{-1, 0, 1}` and incidence
//!   treedepth at most 5, with witness lifting and extraction.
//! * [`solvers`]: brute force, few-rows dynamic program, vertex-cover pipeline.
//! * [`cli`]: the `siptd` command-line front end.

pub mod cli;
pub mod cnf;
pub mod gaifman;
pub mod numbers;
pub mod reduction;
pub mod sip;
pub mod solvers;
pub mod treedepth;

pub use cnf::{Assignment, CnfFormula, Literal};
pub use gaifman::{degree_stats, dual_graph, incidence_graph, primal_graph, DegreeStats, Graph};
pub use reduction::{
    decide_reduction, extract_assignment, lift_assignment, reduce, ReductionOutput,
};
pub use sip::{ExtInt, SipError, SipInstance, SolveResult, SparseMatrix};
pub use treedepth::{check_forest, exact_treedepth, EliminationForest};
