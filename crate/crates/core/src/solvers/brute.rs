use super::{certify, prepare, Preparation, SolverError};
use crate::sip::{SipInstance, SolveResult};

/// Largest box (number of integer points) [`brute_force`] will scan.
pub const BRUTE_FORCE_MAX_POINTS: u64 = 10_000_000;

/// Scans every integer point of the box in lexicographic order and returns
/// the first solution.
pub fn brute_force(sip: &SipInstance) -> Result<SolveResult, SolverError> {
    if let Some(i) = sip
        .lower()
        .iter()
        .zip(sip.upper())
        .position(|(l, u)| !l.is_finite() || !u.is_finite())
    {
        return Err(SolverError::UnboundedVariable(i));
    }
    let p = match prepare(sip)? {
        Preparation::Ready(p) => p,
        Preparation::Infeasible => return Ok(SolveResult::Infeasible),
    };
    let widths: Vec<i64> = p
        .upper
        .iter()
        .map(|u| u.ok_or(SolverError::SearchSpaceTooLarge))
        .collect::<Result<_, _>>()?;
    let points = widths.iter().try_fold(1u64, |acc, &w| {
        acc.checked_mul(w as u64 + 1)
            .filter(|&n| n <= BRUTE_FORCE_MAX_POINTS)
    });
    if points.is_none() {
        return Err(SolverError::SearchSpaceTooLarge);
    }

    let n = widths.len();
    let mut x = vec![0i64; n];
    let mut sum = vec![0i128; p.rows];
    loop {
        if sum == p.rhs {
            return certify(sip, p.unshift(&x));
        }
        // odometer step, last coordinate fastest
        let mut c = n;
        loop {
            if c == 0 {
                return Ok(SolveResult::Infeasible);
            }
            c -= 1;
            if x[c] < widths[c] {
                x[c] += 1;
                for &(r, a) in &p.columns[c] {
                    sum[r] += a as i128;
                }
                break;
            }
            for &(r, a) in &p.columns[c] {
                sum[r] -= a as i128 * x[c] as i128;
            }
            x[c] = 0;
        }
    }
}
