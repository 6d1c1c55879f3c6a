use indexmap::IndexMap;
use num_integer::Integer;

use super::{certify, prepare, Preparation, SolverError};
use crate::sip::{SipInstance, SolveResult};

/// Budget on DP states plus enumerated column values.
pub const FEW_ROWS_MAX_STATES: usize = 5_000_000;

/// Exact feasibility by a column-by-column dynamic program.
///
/// After shifting lower bounds to zero, the states after `t` columns are the
/// reachable partial sums `Σ_{c<t} A_c x_c`. Each coordinate is kept inside
/// `[b_r - maxfuture_r, b_r - minfuture_r]`, the range from which the
/// remaining columns can still reach `b_r`. An unbounded column is allowed
/// when some row it touches has a finite limit on the side it grows
/// towards; that limit caps the column's useful values.
pub fn solve_few_rows(sip: &SipInstance) -> Result<SolveResult, SolverError> {
    let p = match prepare(sip)? {
        Preparation::Ready(p) => p,
        Preparation::Infeasible => return Ok(SolveResult::Infeasible),
    };
    let n = p.columns.len();
    let m = p.rows;

    // Extremes of Σ_{c>=t} A_rc x_c; None means unbounded in that direction.
    let mut min_future = vec![vec![Some(0i128); m]; n + 1];
    let mut max_future = vec![vec![Some(0i128); m]; n + 1];
    for c in (0..n).rev() {
        let (mut lo, mut hi) = (min_future[c + 1].clone(), max_future[c + 1].clone());
        for &(r, a) in &p.columns[c] {
            match p.upper[c] {
                Some(u) => {
                    let v = a as i128 * u as i128;
                    if v > 0 {
                        hi[r] = hi[r].map(|h| h + v);
                    } else {
                        lo[r] = lo[r].map(|l| l + v);
                    }
                }
                None if a > 0 => hi[r] = None,
                None => lo[r] = None,
            }
        }
        min_future[c] = lo;
        max_future[c] = hi;
    }
    let window = |t: usize, r: usize| {
        (
            max_future[t][r].map(|mx| p.rhs[r] - mx),
            min_future[t][r].map(|mn| p.rhs[r] - mn),
        )
    };

    for c in 0..n {
        if p.upper[c].is_none()
            && !p.columns[c].is_empty()
            && !p.columns[c].iter().any(|&(r, a)| {
                let (lo, hi) = window(c + 1, r);
                (a > 0 && hi.is_some()) || (a < 0 && lo.is_some())
            })
        {
            return Err(SolverError::UnprunableUnboundedVariable(c));
        }
    }

    let start = vec![0i128; m];
    if (0..m).any(|r| {
        let (lo, hi) = window(0, r);
        lo.is_some_and(|l| 0 < l) || hi.is_some_and(|h| 0 > h)
    }) {
        return Ok(SolveResult::Infeasible);
    }

    // layer t maps state -> (index of predecessor in layer t-1, value of x_{t-1})
    let mut layers: Vec<IndexMap<Vec<i128>, (usize, i64)>> = Vec::with_capacity(n + 1);
    layers.push(IndexMap::from([(start, (usize::MAX, 0))]));
    let mut work = 0usize;

    for c in 0..n {
        let col = &p.columns[c];
        let mut next: IndexMap<Vec<i128>, (usize, i64)> = IndexMap::new();
        for (idx, state) in layers[c].keys().enumerate() {
            let mut x_min: i128 = 0;
            let mut x_max: Option<i128> = if col.is_empty() {
                Some(0)
            } else {
                p.upper[c].map(i128::from)
            };
            for &(r, a) in col {
                let (lo, hi) = window(c + 1, r);
                let s = state[r];
                let a = a as i128;
                let (cap, floor_) = if a > 0 {
                    (
                        hi.map(|h| Integer::div_floor(&(h - s), &a)),
                        lo.map(|l| Integer::div_ceil(&(l - s), &a)),
                    )
                } else {
                    let b = -a;
                    (
                        lo.map(|l| Integer::div_floor(&(s - l), &b)),
                        hi.map(|h| Integer::div_ceil(&(s - h), &b)),
                    )
                };
                if let Some(cap) = cap {
                    x_max = Some(x_max.map_or(cap, |x| x.min(cap)));
                }
                if let Some(f) = floor_ {
                    x_min = x_min.max(f);
                }
            }
            let x_max = x_max.expect("unbounded columns were checked for a finite cap");
            if x_min > x_max {
                continue;
            }
            work = work.saturating_add((x_max - x_min + 1).try_into().unwrap_or(usize::MAX));
            if work > FEW_ROWS_MAX_STATES {
                return Err(SolverError::SearchSpaceTooLarge);
            }
            for x in x_min..=x_max {
                let mut s = state.clone();
                for &(r, a) in col {
                    s[r] += a as i128 * x;
                }
                next.entry(s).or_insert((idx, x as i64));
            }
        }
        if next.is_empty() {
            return Ok(SolveResult::Infeasible);
        }
        layers.push(next);
    }

    let last = &layers[n];
    let Some(end) = last.get_index_of(&p.rhs) else {
        return Ok(SolveResult::Infeasible);
    };
    let mut x = vec![0i64; n];
    let mut idx = end;
    for t in (1..=n).rev() {
        let (_, &(pred, value)) = layers[t]
            .get_index(idx)
            .expect("predecessor indices are valid");
        x[t - 1] = value;
        idx = pred;
    }
    certify(sip, p.unshift(&x))
}
