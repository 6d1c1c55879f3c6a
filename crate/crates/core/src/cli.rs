//! `siptd` command-line interface.
//!
//! Exit codes: 0 success (or FEASIBLE / VALID), 1 negative answer
//! (INFEASIBLE, INVALID, forest violation, roundtrip mismatch), 2 unreadable
//! or malformed input, 3 empty clause in `reduce`, 4 solver preconditions
//! or size caps. Diagnostics go to stderr.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cnf::CnfFormula;
use crate::gaifman::{degree_stats, dual_graph, incidence_graph, primal_graph};
use crate::reduction::{
    decide_reduction, extract_assignment, reduce, Provenance, ReductionError, ReductionOutput,
};
use crate::sip::{solution_from_json, solution_to_json, SipInstance, SolveResult};
use crate::solvers::{brute_force, solve_few_rows, solve_vertex_cover};
use crate::treedepth::{check_forest, exact_treedepth, EliminationForest};

#[derive(Debug, Parser)]
#[command(
    name = "siptd",
    version,
    about = "Standard-form IP feasibility and incidence treedepth"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce a DIMACS CNF formula to a standard-form IP.
    Reduce {
        #[arg(long)]
        cnf: PathBuf,
        /// Output path for the SIP JSON.
        #[arg(long)]
        out: PathBuf,
        /// Output path for the elimination forest JSON.
        #[arg(long)]
        cert: PathBuf,
        /// Output path for the provenance JSON [default: <out>.provenance.json].
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Print matrix and Gaifman graph statistics.
    Analyze {
        #[arg(long)]
        sip: PathBuf,
        /// Also compute the exact incidence treedepth (small graphs only).
        #[arg(long)]
        exact_td: bool,
    },
    /// Decide feasibility.
    Solve {
        #[arg(long)]
        sip: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Provenance JSON, required by `reduction-y`.
        #[arg(long)]
        provenance: Option<PathBuf>,
        /// Where to write the witness when feasible [default: <sip>.solution.json].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution against an instance.
    Verify {
        #[arg(long)]
        sip: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Validate an elimination forest against one of the Gaifman graphs.
    CheckForest {
        #[arg(long)]
        sip: PathBuf,
        #[arg(long)]
        forest: PathBuf,
        #[arg(long, value_enum)]
        graph: GraphKind,
    },
    /// Random formulas through reduce + decide, compared with brute-force SAT.
    Roundtrip {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    FewRows,
    VertexCover,
    ReductionY,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Incidence,
    Primal,
    Dual,
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl std::fmt::Display) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses arguments and runs the command, returning the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Reduce {
            cnf,
            out,
            cert,
            provenance,
        } => cmd_reduce(&cnf, &out, &cert, provenance.as_deref()),
        Command::Analyze { sip, exact_td } => cmd_analyze(&sip, exact_td),
        Command::Solve {
            sip,
            method,
            provenance,
            out,
        } => cmd_solve(&sip, method, provenance.as_deref(), out.as_deref()),
        Command::Verify { sip, solution } => cmd_verify(&sip, &solution),
        Command::CheckForest { sip, forest, graph } => cmd_check_forest(&sip, &forest, graph),
        Command::Roundtrip {
            vars,
            clauses,
            seed,
            count,
        } => cmd_roundtrip(vars, clauses, seed, count),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, format!("{text}\n")).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(suffix);
    PathBuf::from(p)
}

fn load_sip(path: &Path) -> Result<SipInstance, Failure> {
    SipInstance::from_json(&read(path)?).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn cmd_reduce(cnf: &Path, out: &Path, cert: &Path, provenance: Option<&Path>) -> CmdResult {
    let formula = CnfFormula::parse_dimacs(&read(cnf)?)
        .map_err(|e| fail(2, format!("{}: {e}", cnf.display())))?;
    for j in formula.tautological_clauses() {
        eprintln!("note: dropping tautological clause {}", j + 1);
    }
    let formula = formula.normalize();
    let reduced = reduce(&formula).map_err(|e| match e {
        ReductionError::EmptyClause(_) => fail(3, e),
        ReductionError::TooLarge(_) => fail(4, e),
        _ => fail(2, e),
    })?;
    let depth = check_forest(
        &incidence_graph(reduced.sip().matrix()),
        reduced.certificate(),
    )
    .map_err(|e| fail(4, format!("generated certificate failed validation: {e}")))?;

    let prov_path = provenance
        .map(Path::to_path_buf)
        .unwrap_or_else(|| with_suffix(out, ".provenance.json"));
    write(out, &reduced.sip().to_json())?;
    write(&prov_path, &reduced.provenance().to_json())?;
    write(cert, &reduced.certificate().to_json())?;

    println!(
        "rows={} cols={} depth={}",
        reduced.sip().rows(),
        reduced.sip().cols(),
        depth
    );
    println!("max_abs_entry={}", reduced.sip().matrix().max_abs());
    Ok(0)
}

fn cmd_analyze(path: &Path, exact_td: bool) -> CmdResult {
    let sip = load_sip(path)?;
    let a = sip.matrix();
    let stats = degree_stats(a);
    let gi = incidence_graph(a);
    println!("rows={}", a.rows());
    println!("cols={}", a.cols());
    println!("max_abs_entry={}", a.max_abs());
    println!("maxdeg_C={}", stats.max_row_support);
    println!("maxdeg_V={}", stats.max_col_support);
    println!("components_incidence={}", gi.components().len());
    println!("components_primal={}", primal_graph(a).components().len());
    println!("components_dual={}", dual_graph(a).components().len());
    if exact_td {
        let (d, _) = exact_treedepth(&gi).map_err(|e| fail(4, e))?;
        println!("td_incidence={d}");
    }
    Ok(0)
}

fn cmd_solve(
    path: &Path,
    method: Method,
    provenance: Option<&Path>,
    out: Option<&Path>,
) -> CmdResult {
    let sip = load_sip(path)?;
    let result = match method {
        Method::Brute => brute_force(&sip).map_err(|e| fail(4, e))?,
        Method::FewRows => solve_few_rows(&sip).map_err(|e| fail(4, e))?,
        Method::VertexCover => solve_vertex_cover(&sip).map_err(|e| fail(4, e))?,
        Method::ReductionY => {
            let prov_path =
                provenance.ok_or_else(|| fail(2, "method reduction-y requires --provenance"))?;
            let prov = Provenance::from_json(&read(prov_path)?)
                .map_err(|e| fail(2, format!("{}: {e}", prov_path.display())))?;
            let reduced = ReductionOutput::from_provenance(sip, &prov).map_err(|e| fail(2, e))?;
            decide_reduction(&reduced).map_err(|e| fail(4, e))?
        }
    };
    match result {
        SolveResult::Feasible(x) => {
            let out = out
                .map(Path::to_path_buf)
                .unwrap_or_else(|| with_suffix(path, ".solution.json"));
            write(&out, &solution_to_json(&x))?;
            println!("FEASIBLE");
            Ok(0)
        }
        SolveResult::Infeasible => {
            println!("INFEASIBLE");
            Ok(1)
        }
    }
}

fn cmd_verify(sip_path: &Path, solution: &Path) -> CmdResult {
    let sip = load_sip(sip_path)?;
    let x = solution_from_json(&read(solution)?)
        .map_err(|e| fail(2, format!("{}: {e}", solution.display())))?;
    if sip.evaluate(&x).map_err(|e| fail(2, e))? {
        println!("VALID");
        Ok(0)
    } else {
        println!("INVALID");
        Ok(1)
    }
}

fn cmd_check_forest(sip_path: &Path, forest: &Path, kind: GraphKind) -> CmdResult {
    let sip = load_sip(sip_path)?;
    let f = EliminationForest::from_json(&read(forest)?)
        .map_err(|e| fail(2, format!("{}: {e}", forest.display())))?;
    let g = match kind {
        GraphKind::Incidence => incidence_graph(sip.matrix()),
        GraphKind::Primal => primal_graph(sip.matrix()),
        GraphKind::Dual => dual_graph(sip.matrix()),
    };
    match check_forest(&g, &f) {
        Ok(depth) => {
            println!("depth={depth}");
            Ok(0)
        }
        Err(e) => {
            println!("violation: {e}");
            Ok(1)
        }
    }
}

fn cmd_roundtrip(vars: usize, clauses: usize, seed: u64, count: usize) -> CmdResult {
    if vars == 0 {
        return Err(fail(2, "--vars must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agree = 0;
    let mut satisfiable = 0;
    for trial in 0..count {
        let formula = CnfFormula::random_3cnf(vars, clauses, &mut rng).normalize();
        let reduced = reduce(&formula).map_err(|e| fail(4, e))?;
        let decided = decide_reduction(&reduced).map_err(|e| fail(4, e))?;
        let model = formula.brute_force_model();
        let consistent = match (&decided, &model) {
            (SolveResult::Feasible(x), Some(_)) => extract_assignment(&reduced, x)
                .map(|a| formula.is_satisfied_by(&a))
                .unwrap_or(false),
            (SolveResult::Infeasible, None) => true,
            _ => false,
        };
        if consistent {
            agree += 1;
        } else {
            eprintln!("mismatch on trial {trial}:\n{}", formula.to_dimacs());
        }
        satisfiable += usize::from(model.is_some());
    }
    eprintln!("{satisfiable} of {count} formulas satisfiable");
    println!("{agree}/{count} agree");
    Ok(if agree == count { 0 } else { 1 })
}
