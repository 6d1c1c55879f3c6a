//! Incidence, primal and dual Gaifman graphs of a constraint matrix.
//!
//! Vertex numbering for the incidence graph is fixed: rows `0..m`, then
//! columns `m..m+n`. Primal graphs number columns `0..n`, dual graphs rows
//! `0..m`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sip::SparseMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) references a vertex outside the graph")]
    VertexOutOfRange(usize, usize),
    #[error("label count {found} does not match vertex count {expected}")]
    LabelCount { expected: usize, found: usize },
    #[error("bad label {0:?}")]
    BadLabel(String),
    #[error("malformed graph JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexLabel {
    Row(usize),
    Col(usize),
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Row(i) => write!(f, "r{i}"),
            VertexLabel::Col(j) => write!(f, "c{j}"),
        }
    }
}

impl std::str::FromStr for VertexLabel {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::BadLabel(s.to_string());
        let (kind, idx) = s.split_at(s.len().min(1));
        let idx: usize = idx.parse().map_err(|_| bad())?;
        match kind {
            "r" => Ok(VertexLabel::Row(idx)),
            "c" => Ok(VertexLabel::Col(idx)),
            _ => Err(bad()),
        }
    }
}

/// Simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    labels: Option<Vec<VertexLabel>>,
}

impl Graph {
    /// Builds a graph from an edge list. Parallel edges collapse.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut sets = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u, v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            sets[u].insert(v);
            sets[v].insert(u);
        }
        Ok(Graph {
            adj: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<VertexLabel>) -> Result<Self, GraphError> {
        if labels.len() != self.adj.len() {
            return Err(GraphError::LabelCount {
                expected: self.adj.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::new(n, &edges).expect("complete graph edges are in range")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::new(n, &edges).expect("path edges are in range")
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn label(&self, v: usize) -> Option<VertexLabel> {
        self.labels.as_ref().map(|l| l[v])
    }

    pub fn labels(&self) -> Option<&[VertexLabel]> {
        self.labels.as_deref()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect()
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.adj.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
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

    /// Subgraph induced by `keep`, renumbered in the given order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.adj.len()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in keep.iter().enumerate() {
            for &w in &self.adj[v] {
                if index[w] != usize::MAX && i < index[w] {
                    edges.push((i, index[w]));
                }
            }
        }
        let g = Graph::new(keep.len(), &edges).expect("induced edges are in range");
        match &self.labels {
            Some(l) => g
                .with_labels(keep.iter().map(|&v| l[v]).collect())
                .expect("label count matches"),
            None => g,
        }
    }

    /// `{"n":k,"labels":[...],"edges":[[u,v],...]}`. Unlabelled vertices
    /// are written as `v<i>`.
    pub fn to_json(&self) -> String {
        let labels = (0..self.adj.len())
            .map(|v| match self.label(v) {
                Some(l) => l.to_string(),
                None => format!("v{v}"),
            })
            .collect();
        let doc = GraphJson {
            n: self.adj.len(),
            labels,
            edges: self.edges(),
        };
        serde_json::to_string(&doc).expect("graph documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphJson =
            serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        let g = Graph::new(doc.n, &doc.edges)?;
        if doc.labels.iter().all(|l| l.starts_with('v')) {
            if doc.labels.len() != doc.n {
                return Err(GraphError::LabelCount {
                    expected: doc.n,
                    found: doc.labels.len(),
                });
            }
            return Ok(g);
        }
        let labels = doc
            .labels
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<_>, _>>()?;
        g.with_labels(labels)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
}

/// Bipartite graph with a vertex per row and per column; edges at non-zeros.
pub fn incidence_graph(a: &SparseMatrix) -> Graph {
    let m = a.rows();
    let edges: Vec<_> = a.entries().iter().map(|&(r, c, _)| (r, m + c)).collect();
    let labels = (0..m)
        .map(VertexLabel::Row)
        .chain((0..a.cols()).map(VertexLabel::Col))
        .collect();
    Graph::new(m + a.cols(), &edges)
        .and_then(|g| g.with_labels(labels))
        .expect("incidence graph is well-formed")
}

/// Columns joined when some row has non-zeros in both.
pub fn primal_graph(a: &SparseMatrix) -> Graph {
    let labels = (0..a.cols()).map(VertexLabel::Col).collect();
    clique_union(a.cols(), &a.row_supports())
        .with_labels(labels)
        .expect("label count matches")
}

/// Rows joined when some column has non-zeros in both.
pub fn dual_graph(a: &SparseMatrix) -> Graph {
    let labels = (0..a.rows()).map(VertexLabel::Row).collect();
    clique_union(a.rows(), &a.col_supports())
        .with_labels(labels)
        .expect("label count matches")
}

fn clique_union(n: usize, groups: &[Vec<usize>]) -> Graph {
    let mut edges = Vec::new();
    for g in groups {
        for (i, &u) in g.iter().enumerate() {
            edges.extend(g[i + 1..].iter().map(|&v| (u, v)));
        }
    }
    Graph::new(n, &edges).expect("supports are in range and distinct")
}

/// Maximum row support (constraint arity) and column support (variable
/// occurrence count).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeStats {
    pub max_row_support: usize,
    pub max_col_support: usize,
}

pub fn degree_stats(a: &SparseMatrix) -> DegreeStats {
    let max_len = |s: Vec<Vec<usize>>| s.iter().map(Vec::len).max().unwrap_or(0);
    DegreeStats {
        max_row_support: max_len(a.row_supports()),
        max_col_support: max_len(a.col_supports()),
    }
}
