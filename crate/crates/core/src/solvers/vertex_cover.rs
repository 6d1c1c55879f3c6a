use super::{remove_dependent_rows, solve_few_rows, RowBasisResult, SolverError};
use crate::gaifman::{incidence_graph, Graph};
use crate::sip::{SipInstance, SolveResult};

/// Largest cover [`min_vertex_cover`] searches for.
pub const MAX_COVER_SIZE: usize = 25;
/// Largest graph [`min_vertex_cover`] accepts.
pub const MAX_COVER_VERTICES: usize = 10_000;

/// Minimum vertex cover by a bounded search tree with iterative deepening
/// on the budget.
///
/// Isolated vertices are ignored and a degree-1 vertex always yields its
/// neighbour. Otherwise the search takes the highest-degree vertex `u`
/// (smallest index on ties) and branches over the edges at `u`: either `u`
/// is in the cover, or every neighbour of `u` is.
pub fn min_vertex_cover(g: &Graph) -> Result<Vec<usize>, SolverError> {
    let n = g.num_vertices();
    if n > MAX_COVER_VERTICES {
        return Err(SolverError::GraphTooLarge(n));
    }
    let mut search = CoverSearch {
        g,
        removed: vec![false; n],
        degree: (0..n).map(|v| g.degree(v)).collect(),
        cover: Vec::new(),
    };
    for budget in 0..=MAX_COVER_SIZE {
        if search.run(budget) {
            let mut cover = search.cover;
            cover.sort_unstable();
            return Ok(cover);
        }
    }
    Err(SolverError::BudgetExceeded)
}

struct CoverSearch<'a> {
    g: &'a Graph,
    removed: Vec<bool>,
    degree: Vec<usize>,
    cover: Vec<usize>,
}

impl CoverSearch<'_> {
    fn take(&mut self, v: usize) {
        self.removed[v] = true;
        self.cover.push(v);
        for &w in self.g.neighbors(v) {
            if !self.removed[w] {
                self.degree[w] -= 1;
            }
        }
    }

    fn undo_to(&mut self, len: usize) {
        while self.cover.len() > len {
            let v = self.cover.pop().expect("cover is longer than len");
            for &w in self.g.neighbors(v) {
                if !self.removed[w] {
                    self.degree[w] += 1;
                }
            }
            self.removed[v] = false;
        }
    }

    /// Tries to cover the remaining edges with at most `budget` more
    /// vertices; on success the cover is left in `self.cover`.
    fn run(&mut self, budget: usize) -> bool {
        let mark = self.cover.len();
        let mut budget = budget;
        // degree-1 rule
        while let Some(v) =
            (0..self.degree.len()).find(|&v| !self.removed[v] && self.degree[v] == 1)
        {
            if budget == 0 {
                self.undo_to(mark);
                return false;
            }
            let w = *self
                .g
                .neighbors(v)
                .iter()
                .find(|&&w| !self.removed[w])
                .expect("degree-1 vertex has a live neighbour");
            self.take(w);
            budget -= 1;
        }

        let Some(u) = (0..self.degree.len())
            .filter(|&v| !self.removed[v])
            .max_by_key(|&v| (self.degree[v], std::cmp::Reverse(v)))
            .filter(|&v| self.degree[v] > 0)
        else {
            return true;
        };
        if budget == 0 {
            self.undo_to(mark);
            return false;
        }

        let inner = self.cover.len();
        self.take(u);
        if self.run(budget - 1) {
            return true;
        }
        self.undo_to(inner);

        let live: Vec<usize> = self
            .g
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&w| !self.removed[w])
            .collect();
        if live.len() <= budget {
            for &w in &live {
                self.take(w);
            }
            if self.run(budget - live.len()) {
                return true;
            }
        }
        self.undo_to(mark);
        false
    }
}

/// Removes dependent rows, checks that at most `2k` rows remain for a
/// minimum vertex cover of size `k` of the incidence graph, and hands the
/// reduced instance to [`solve_few_rows`].
pub fn solve_vertex_cover(sip: &SipInstance) -> Result<SolveResult, SolverError> {
    if let Some(i) = sip.lower().iter().position(|l| !l.is_finite()) {
        return Err(SolverError::InfiniteLowerBound(i));
    }
    let reduced = match remove_dependent_rows(sip) {
        RowBasisResult::Inconsistent { .. } => return Ok(SolveResult::Infeasible),
        RowBasisResult::Reduced { sip, .. } => sip,
    };
    let cover = min_vertex_cover(&incidence_graph(reduced.matrix()))?;
    if reduced.rows() > 2 * cover.len() {
        return Err(SolverError::RowBoundViolated {
            rows: reduced.rows(),
            cover: cover.len(),
        });
    }
    // same columns and bounds, so a witness of the reduced instance is one
    // of the original
    match solve_few_rows(&reduced)? {
        SolveResult::Feasible(x) => super::certify(sip, x),
        SolveResult::Infeasible => Ok(SolveResult::Infeasible),
    }
}
