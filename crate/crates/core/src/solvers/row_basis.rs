use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::sip::SipInstance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowBasisResult {
    /// Instance restricted to a maximal independent set of rows (original
    /// indices in `kept_rows`); same solution set as the input.
    Reduced {
        sip: SipInstance,
        kept_rows: Vec<usize>,
    },
    /// Row `witness_row` of `A` is a combination of earlier rows but its
    /// right-hand side is not the same combination.
    Inconsistent { witness_row: usize },
}

/// Gaussian elimination over the rationals on `[A | b]`, row by row.
/// A row whose `A` part reduces to zero is dropped when its `b` part also
/// vanishes and reported as inconsistent otherwise.
pub fn remove_dependent_rows(sip: &SipInstance) -> RowBasisResult {
    let n = sip.cols();
    let mut dense = vec![vec![BigRational::zero(); n + 1]; sip.rows()];
    for &(r, c, v) in sip.matrix().entries() {
        dense[r][c] = BigRational::from_integer(BigInt::from(v));
    }
    for (r, b) in sip.rhs().iter().enumerate() {
        dense[r][n] = BigRational::from_integer(b.clone());
    }

    // each basis row has a unit pivot and zeros at earlier pivots
    let mut basis: Vec<(usize, Vec<BigRational>)> = Vec::new();
    let mut kept = Vec::new();
    for (r, mut row) in dense.into_iter().enumerate() {
        for (pivot, brow) in &basis {
            if row[*pivot].is_zero() {
                continue;
            }
            let factor = row[*pivot].clone();
            for (x, y) in row.iter_mut().zip(brow) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        match row[..n].iter().position(|v| !v.is_zero()) {
            Some(pivot) => {
                let inv = BigRational::one() / &row[pivot];
                for x in row.iter_mut() {
                    *x *= &inv;
                }
                basis.push((pivot, row));
                kept.push(r);
            }
            None if row[n].is_zero() => {}
            None => return RowBasisResult::Inconsistent { witness_row: r },
        }
    }
    RowBasisResult::Reduced {
        sip: sip.select_rows(&kept),
        kept_rows: kept,
    }
}
