//! Elimination forests, exact treedepth for small graphs, and the
//! conversion of incidence-graph forests into dual/primal forests.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaifman::{incidence_graph, Graph};
use crate::sip::SparseMatrix;

/// Largest graph accepted by [`exact_treedepth`].
pub const EXACT_TREEDEPTH_MAX_VERTICES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("forest has {found} slots but the graph has {expected} vertices")]
    SizeMismatch { expected: usize, found: usize },
    #[error("parent of vertex {0} is out of range")]
    ParentOutOfRange(usize),
    #[error("parent pointers contain a cycle through vertex {0}")]
    NotAForest(usize),
    #[error("edge ({0}, {1}) does not join an ancestor-descendant pair")]
    UncoveredEdge(usize, usize),
    #[error("edge ({0}, {1}) joins two different trees")]
    CrossTreeEdge(usize, usize),
    #[error("malformed forest JSON: {0}")]
    Json(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreedepthError {
    #[error("graph has {0} vertices; exact treedepth is capped at {EXACT_TREEDEPTH_MAX_VERTICES}")]
    TooLarge(usize),
    #[error("input forest is not a valid elimination forest of the incidence graph: {0}")]
    InvalidInputForest(ForestError),
}

/// Rooted forest given by parent pointers (`None` for roots).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EliminationForest {
    parent: Vec<Option<usize>>,
}

impl EliminationForest {
    pub fn new(parent: Vec<Option<usize>>) -> Self {
        EliminationForest { parent }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    /// Per-vertex depth (roots have depth 1) and root. Fails on cycles or
    /// out-of-range parents.
    pub fn depths_and_roots(&self) -> Result<(Vec<usize>, Vec<usize>), ForestError> {
        let n = self.parent.len();
        let mut depth = vec![0usize; n];
        let mut root = vec![usize::MAX; n];
        // 0 = unvisited, 1 = on current walk, 2 = done
        let mut state = vec![0u8; n];
        let mut walk = Vec::new();
        for start in 0..n {
            if state[start] == 2 {
                continue;
            }
            walk.clear();
            let mut v = start;
            let (mut d, r) = loop {
                if state[v] == 2 {
                    break (depth[v], root[v]);
                }
                if state[v] == 1 {
                    return Err(ForestError::NotAForest(v));
                }
                state[v] = 1;
                walk.push(v);
                match self.parent[v] {
                    None => break (0, v),
                    Some(p) if p >= n => return Err(ForestError::ParentOutOfRange(v)),
                    Some(p) => v = p,
                }
            };
            while let Some(w) = walk.pop() {
                d += 1;
                depth[w] = d;
                root[w] = r;
                state[w] = 2;
            }
        }
        Ok((depth, root))
    }

    /// Number of vertices on the longest root-to-leaf path (0 if empty).
    pub fn depth(&self) -> Result<usize, ForestError> {
        let (depth, _) = self.depths_and_roots()?;
        Ok(depth.into_iter().max().unwrap_or(0))
    }

    /// `{"parent":[...]}` with `-1` for roots.
    pub fn to_json(&self) -> String {
        let doc = ForestJson {
            parent: self
                .parent
                .iter()
                .map(|p| p.map_or(-1, |p| p as i64))
                .collect(),
        };
        serde_json::to_string(&doc).expect("forest documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ForestError> {
        let doc: ForestJson =
            serde_json::from_str(text).map_err(|e| ForestError::Json(e.to_string()))?;
        let parent = doc
            .parent
            .iter()
            .enumerate()
            .map(|(v, &p)| match p {
                -1 => Ok(None),
                p if p >= 0 => Ok(Some(p as usize)),
                _ => Err(ForestError::ParentOutOfRange(v)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EliminationForest { parent })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ForestJson {
    parent: Vec<i64>,
}

/// Validates `f` as an elimination forest of `g` and returns its depth.
pub fn check_forest(g: &Graph, f: &EliminationForest) -> Result<usize, ForestError> {
    if f.len() != g.num_vertices() {
        return Err(ForestError::SizeMismatch {
            expected: g.num_vertices(),
            found: f.len(),
        });
    }
    let (depth, root) = f.depths_and_roots()?;
    for (u, v) in g.edges() {
        if root[u] != root[v] {
            return Err(ForestError::CrossTreeEdge(u, v));
        }
        let (hi, mut lo) = if depth[u] <= depth[v] { (u, v) } else { (v, u) };
        for _ in depth[hi]..depth[lo] {
            lo = f.parent[lo].expect("non-root vertices have parents");
        }
        if lo != hi {
            return Err(ForestError::UncoveredEdge(u, v));
        }
    }
    Ok(depth.into_iter().max().unwrap_or(0))
}

/// Exact treedepth with an optimal elimination forest.
///
/// Memoizes over connected vertex subsets (bitmasks). Among optimal
/// choices the smallest vertex index is eliminated first.
pub fn exact_treedepth(g: &Graph) -> Result<(usize, EliminationForest), TreedepthError> {
    let n = g.num_vertices();
    if n > EXACT_TREEDEPTH_MAX_VERTICES {
        return Err(TreedepthError::TooLarge(n));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let mut solver = ExactSolver {
        adj,
        memo: HashMap::new(),
    };
    let all: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut parent = vec![None; n];
    let mut depth = 0;
    for comp in solver.components(all) {
        depth = depth.max(solver.connected(comp).0);
        solver.build(comp, None, &mut parent);
    }
    Ok((depth, EliminationForest::new(parent)))
}

struct ExactSolver {
    adj: Vec<u32>,
    // connected subset -> (treedepth, vertex to eliminate)
    memo: HashMap<u32, (usize, usize)>,
}

impl ExactSolver {
    fn components(&self, mut mask: u32) -> Vec<u32> {
        let mut out = Vec::new();
        while mask != 0 {
            let seed = mask & mask.wrapping_neg();
            let mut comp = seed;
            let mut frontier = seed;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = self.adj[v] & mask & !comp;
                comp |= fresh;
                frontier |= fresh;
            }
            mask &= !comp;
            out.push(comp);
        }
        out
    }

    fn connected(&mut self, mask: u32) -> (usize, usize) {
        if mask.count_ones() == 1 {
            return (1, mask.trailing_zeros() as usize);
        }
        if let Some(&hit) = self.memo.get(&mask) {
            return hit;
        }
        let mut best = (usize::MAX, usize::MAX);
        let mut rest_bits = mask;
        while rest_bits != 0 {
            let v = rest_bits.trailing_zeros() as usize;
            rest_bits &= rest_bits - 1;
            let rest = mask & !(1 << v);
            let mut worst = 0;
            for comp in self.components(rest) {
                worst = worst.max(self.connected(comp).0);
                if worst + 1 >= best.0 {
                    break;
                }
            }
            if worst + 1 < best.0 {
                best = (worst + 1, v);
            }
        }
        self.memo.insert(mask, best);
        best
    }

    fn build(&mut self, mask: u32, parent_of_top: Option<usize>, parent: &mut [Option<usize>]) {
        let (_, v) = self.connected(mask);
        parent[v] = parent_of_top;
        for comp in self.components(mask & !(1 << v)) {
            self.build(comp, Some(v), parent);
        }
    }
}

/// Converts an elimination forest of the incidence graph of `a` into one of
/// the dual graph (vertices = rows).
///
/// Works top-down over connected pieces of the incidence graph. The highest
/// vertex of each piece (in `f_incidence`) is eliminated: a row becomes a
/// node of the output, a column is replaced by the chain of its still
/// present rows in ascending order.
pub fn incidence_to_dual_forest(
    a: &SparseMatrix,
    f_incidence: &EliminationForest,
) -> Result<EliminationForest, TreedepthError> {
    let g = incidence_graph(a);
    check_forest(&g, f_incidence).map_err(TreedepthError::InvalidInputForest)?;
    let (depth, _) = f_incidence
        .depths_and_roots()
        .map_err(TreedepthError::InvalidInputForest)?;

    let m = a.rows();
    let mut present = vec![true; g.num_vertices()];
    let mut out = vec![None; m];
    let mut work: Vec<(Vec<usize>, Option<usize>)> = vec![((0..g.num_vertices()).collect(), None)];

    while let Some((vertices, attach)) = work.pop() {
        for comp in components_within(&g, &vertices, &present) {
            let top = *comp
                .iter()
                .min_by_key(|&&v| (depth[v], v))
                .expect("components are non-empty");
            present[top] = false;
            let mut tail = attach;
            if top < m {
                out[top] = tail;
                tail = Some(top);
            } else {
                for &r in g.neighbors(top) {
                    if present[r] {
                        present[r] = false;
                        out[r] = tail;
                        tail = Some(r);
                    }
                }
            }
            let rest: Vec<usize> = comp.into_iter().filter(|&v| present[v]).collect();
            if !rest.is_empty() {
                work.push((rest, tail));
            }
        }
    }
    Ok(EliminationForest::new(out))
}

/// Converts an elimination forest of the incidence graph of `a` into one of
/// the primal graph (vertices = columns), by running the dual conversion on
/// the transpose.
pub fn incidence_to_primal_forest(
    a: &SparseMatrix,
    f_incidence: &EliminationForest,
) -> Result<EliminationForest, TreedepthError> {
    let (m, n) = (a.rows(), a.cols());
    if f_incidence.len() != m + n {
        return Err(TreedepthError::InvalidInputForest(
            ForestError::SizeMismatch {
                expected: m + n,
                found: f_incidence.len(),
            },
        ));
    }
    // Incidence numbering of the transpose: its rows (our columns) first.
    let to_t = |v: usize| if v < m { n + v } else { v - m };
    let mut parent = vec![None; m + n];
    for v in 0..m + n {
        parent[to_t(v)] = match f_incidence.parent(v) {
            Some(p) if p < m + n => Some(to_t(p)),
            Some(_) => {
                return Err(TreedepthError::InvalidInputForest(
                    ForestError::ParentOutOfRange(v),
                ))
            }
            None => None,
        };
    }
    incidence_to_dual_forest(&a.transpose(), &EliminationForest::new(parent))
}

fn components_within(g: &Graph, vertices: &[usize], present: &[bool]) -> Vec<Vec<usize>> {
    let mut seen: HashMap<usize, bool> = vertices.iter().map(|&v| (v, false)).collect();
    let mut out = Vec::new();
    for &start in vertices {
        if !present[start] || seen[&start] {
            continue;
        }
        seen.insert(start, true);
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if present[w] && seen.get(&w) == Some(&false) {
                    seen.insert(w, true);
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}
