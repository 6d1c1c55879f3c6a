use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

use siptd::cnf::{Assignment, CnfFormula, Literal};
use siptd::gaifman::{dual_graph, incidence_graph, primal_graph, Graph};
use siptd::numbers::{crt, nth_primes, CrtSystem};
use siptd::reduction::{extract_assignment, lift_assignment, reduce};
use siptd::sip::{ExtInt, SipInstance, SparseMatrix};
use siptd::solvers::{
    brute_force, remove_dependent_rows, solve_few_rows, solve_vertex_cover, RowBasisResult,
};
use siptd::treedepth::{
    check_forest, exact_treedepth, incidence_to_dual_forest, incidence_to_primal_forest,
};

fn dense(
    max_rows: usize,
    max_cols: usize,
    max_abs: i64,
) -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(m, n)| {
        (
            Just(n),
            prop::collection::vec(prop::collection::vec(-max_abs..=max_abs, n), m),
        )
    })
}

fn bound() -> impl Strategy<Value = ExtInt> {
    prop_oneof![
        1 => Just(ExtInt::NegInf),
        1 => Just(ExtInt::PosInf),
        4 => any::<i64>().prop_map(ExtInt::from),
        1 => "-?[1-9][0-9]{20,40}".prop_map(|s| ExtInt::Finite(s.parse().unwrap())),
    ]
}

fn any_sip() -> impl Strategy<Value = SipInstance> {
    dense(4, 5, 3).prop_flat_map(|(n, rows)| {
        let m = rows.len();
        (
            Just((n, rows)),
            prop::collection::vec(any::<i64>(), m),
            prop::collection::vec((bound(), bound()), n),
        )
            .prop_map(|((n, rows), b, bounds)| {
                let (l, u): (Vec<_>, Vec<_>) = bounds
                    .into_iter()
                    .map(|(x, y)| if x <= y { (x, y) } else { (y, x) })
                    .map(|(x, y)| match (x, y) {
                        (ExtInt::PosInf, y) => (ExtInt::NegInf, y),
                        (x, ExtInt::NegInf) => (x, ExtInt::PosInf),
                        other => other,
                    })
                    .unzip();
                SipInstance::new(
                    SparseMatrix::from_dense(n, &rows).unwrap(),
                    b.into_iter().map(BigInt::from).collect(),
                    l,
                    u,
                )
                .unwrap()
            })
    })
}

/// Small instance with finite bounds in [-3, 3].
fn box_sip() -> impl Strategy<Value = SipInstance> {
    dense(3, 5, 2).prop_flat_map(|(n, rows)| {
        let m = rows.len();
        (
            Just((n, rows)),
            prop::collection::vec(-6i64..=6, m),
            prop::collection::vec((-3i64..=3, -3i64..=3), n),
        )
            .prop_map(|((_, rows), b, bounds)| {
                let l: Vec<i64> = bounds.iter().map(|&(x, y)| x.min(y)).collect();
                let u: Vec<i64> = bounds.iter().map(|&(x, y)| x.max(y)).collect();
                SipInstance::from_dense(&rows, &b, &l, &u).unwrap()
            })
    })
}

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let k = pairs.len();
        prop::collection::vec(any::<bool>(), k).prop_map(move |keep| {
            let edges: Vec<_> = pairs
                .iter()
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|(&e, _)| e)
                .collect();
            Graph::new(n, &edges).unwrap()
        })
    })
}

fn cnf() -> impl Strategy<Value = CnfFormula> {
    (1usize..=4).prop_flat_map(|n| {
        let clause =
            prop::collection::btree_map(0..n, any::<bool>(), 1..=n.min(3)).prop_map(|lits| {
                lits.into_iter()
                    .map(|(v, pos)| {
                        if pos {
                            Literal::pos(v)
                        } else {
                            Literal::neg(v)
                        }
                    })
                    .collect::<Vec<_>>()
            });
        prop::collection::vec(clause, 0..=4).prop_map(move |cs| CnfFormula::new(n, cs).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sip_json_round_trip(sip in any_sip()) {
        let text = sip.to_json();
        prop_assert_eq!(SipInstance::from_json(&text).unwrap(), sip);
    }

    #[test]
    fn shift_preserves_membership(sip in box_sip(), seed in prop::collection::vec(-4i64..=4, 5)) {
        let (shifted, offset) = sip.shift_to_zero_lower_bounds().unwrap();
        let x: Vec<BigInt> = (0..sip.cols()).map(|i| BigInt::from(seed[i])).collect();
        let y: Vec<BigInt> = x.iter().zip(&offset).map(|(a, o)| a - o).collect();
        prop_assert_eq!(sip.evaluate(&x).unwrap(), shifted.evaluate(&y).unwrap());
        prop_assert!(shifted.lower().iter().all(|l| *l == ExtInt::from(0)));
    }

    #[test]
    fn exact_forest_certifies_its_depth(g in graph(12)) {
        let (d, f) = exact_treedepth(&g).unwrap();
        prop_assert_eq!(check_forest(&g, &f), Ok(d));
    }

    #[test]
    fn treedepth_is_monotone_under_edge_deletion(g in graph(10), pick in any::<prop::sample::Index>()) {
        let edges = g.edges();
        prop_assume!(!edges.is_empty());
        let drop = pick.index(edges.len());
        let kept: Vec<_> = edges.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &e)| e).collect();
        let h = Graph::new(g.num_vertices(), &kept).unwrap();
        let (dg, fg) = exact_treedepth(&g).unwrap();
        let (dh, _) = exact_treedepth(&h).unwrap();
        prop_assert!(dh <= dg);
        // a forest for G also works for any subgraph
        prop_assert!(check_forest(&h, &fg).is_ok());
    }

    #[test]
    fn forest_transforms_validate((n, rows) in dense(5, 5, 1)) {
        let a = SparseMatrix::from_dense(n, &rows).unwrap();
        prop_assume!(a.nnz() > 0);
        let (d, fi) = exact_treedepth(&incidence_graph(&a)).unwrap();
        let cols = a.col_supports().iter().map(Vec::len).max().unwrap();
        let rows = a.row_supports().iter().map(Vec::len).max().unwrap();
        let fd = incidence_to_dual_forest(&a, &fi).unwrap();
        let fp = incidence_to_primal_forest(&a, &fi).unwrap();
        prop_assert!(check_forest(&dual_graph(&a), &fd).unwrap() <= cols * d);
        prop_assert!(check_forest(&primal_graph(&a), &fp).unwrap() <= rows * d);
    }

    #[test]
    fn primal_of_a_is_dual_of_transpose((n, rows) in dense(5, 5, 2)) {
        let a = SparseMatrix::from_dense(n, &rows).unwrap();
        prop_assert_eq!(primal_graph(&a).edges(), dual_graph(&a.transpose()).edges());
        prop_assert_eq!(dual_graph(&a).edges(), primal_graph(&a.transpose()).edges());
    }

    #[test]
    fn crt_satisfies_every_congruence(picks in prop::collection::btree_set(0usize..40, 1..8), seed in any::<u64>()) {
        let primes = nth_primes(40);
        let moduli: Vec<u64> = picks.iter().map(|&i| primes[i]).collect();
        let residues: Vec<u64> = moduli.iter().enumerate().map(|(i, p)| seed.rotate_left(i as u32 * 7) % p).collect();
        let sys = CrtSystem::from_u64(&moduli, &residues).unwrap();
        let x = crt(&sys);
        prop_assert!(x >= BigInt::from(0) && x < sys.modulus_product());
        for (p, a) in moduli.iter().zip(&residues) {
            prop_assert_eq!(x.mod_floor(&BigInt::from(*p)), BigInt::from(*a));
        }
    }

    #[test]
    fn row_removal_keeps_full_rank_and_solutions(sip in box_sip()) {
        match remove_dependent_rows(&sip) {
            RowBasisResult::Reduced { sip: reduced, kept_rows } => {
                // eliminating again removes nothing
                match remove_dependent_rows(&reduced) {
                    RowBasisResult::Reduced { kept_rows: again, .. } => prop_assert_eq!(again.len(), kept_rows.len()),
                    RowBasisResult::Inconsistent { .. } => prop_assert!(false, "reduced system became inconsistent"),
                }
                prop_assert_eq!(
                    brute_force(&sip).unwrap().is_feasible(),
                    brute_force(&reduced).unwrap().is_feasible()
                );
            }
            RowBasisResult::Inconsistent { .. } => {
                prop_assert!(!brute_force(&sip).unwrap().is_feasible());
            }
        }
    }

    #[test]
    fn solver_witnesses_are_valid_and_agree(sip in box_sip()) {
        let oracle = brute_force(&sip).unwrap();
        for r in [oracle.clone(), solve_few_rows(&sip).unwrap(), solve_vertex_cover(&sip).unwrap()] {
            prop_assert_eq!(r.is_feasible(), oracle.is_feasible());
            if let Some(x) = r.witness() {
                prop_assert!(sip.evaluate(x).unwrap());
            }
        }
    }

    #[test]
    fn dimacs_round_trip(f in cnf()) {
        prop_assert_eq!(CnfFormula::parse_dimacs(&f.to_dimacs()).unwrap(), f);
    }

    #[test]
    fn lifted_witnesses_extract_back(f in cnf()) {
        let out = reduce(&f).unwrap();
        for a in Assignment::enumerate(f.num_vars()) {
            match lift_assignment(&out, &a) {
                Ok(x) => {
                    prop_assert!(f.is_satisfied_by(&a));
                    prop_assert!(out.sip().evaluate(&x).unwrap());
                    prop_assert_eq!(extract_assignment(&out, &x).unwrap(), a);
                }
                Err(_) => prop_assert!(!f.is_satisfied_by(&a)),
            }
        }
    }
}
