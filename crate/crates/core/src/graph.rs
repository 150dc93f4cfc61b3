//! Undirected simple graphs with 1-based vertex labels.
//!
//! Edges are stored canonically as `(i, j)` with `i < j`, sorted
//! lexicographically. That order is the "canonical edge order" used for the
//! rows of the incidence and rigidity matrices and for the columns of the edge
//! Gram matrix.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// An undirected graph on vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;

    fn try_from(repr: GraphRepr) -> Result<Self> {
        Graph::new(repr.n, repr.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            n: g.n,
            edges: g.edges.into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl Graph {
    /// Builds a graph, canonicalizing every edge to `(min, max)`.
    ///
    /// Rejects self-loops, duplicate edges (in either orientation) and
    /// endpoints outside `1..=n`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("graph needs at least one vertex".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Input(format!("self-loop at vertex {a}")));
            }
            for v in [a, b] {
                if v < 1 || v > n {
                    return Err(Error::Input(format!(
                        "edge ({a},{b}) has endpoint {v} outside 1..={n}"
                    )));
                }
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::Input(format!("duplicate edge ({a},{b})")));
            }
        }
        Ok(Graph {
            n,
            edges: set.into_iter().collect(),
        })
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i, i + 1))).expect("path graph is valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Graph::new(n, (1..=n).map(|i| (i, i % n + 1))).expect("cycle graph is valid")
    }

    /// Star with centre 1 and leaves `2..=n`.
    pub fn star(n: usize) -> Self {
        Graph::new(n, (2..=n).map(|j| (1, j))).expect("star graph is valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j)));
        Graph::new(n, edges).expect("complete graph is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical order, each as `(i, j)` with `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    /// Position of edge `{a, b}` in canonical order.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    pub fn check_vertex(&self, i: usize) -> Result<()> {
        if i < 1 || i > self.n {
            Err(Error::Input(format!("vertex {i} outside 1..={}", self.n)))
        } else {
            Ok(())
        }
    }

    pub fn neighbors(&self, i: usize) -> Result<BTreeSet<usize>> {
        self.check_vertex(i)?;
        Ok(self.neighbors_unchecked(i))
    }

    pub(crate) fn neighbors_unchecked(&self, i: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match (a == i, b == i) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == i || b == i)
            .count()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Connected components, each as a sorted list of vertices; ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n + 1];
        let mut out = Vec::new();
        for start in 1..=self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
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

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    pub fn is_tree(&self) -> bool {
        self.m() + 1 == self.n && self.is_connected()
    }

    /// True if `self` is a tree on the same vertex set using only edges of `g`.
    pub fn is_spanning_tree_of(&self, g: &Graph) -> bool {
        self.n == g.n && self.is_tree() && self.edges.iter().all(|&(a, b)| g.has_edge(a, b))
    }

    /// BFS spanning tree rooted at vertex 1, neighbours visited in ascending order.
    pub fn spanning_tree(&self) -> Result<Graph> {
        if !self.is_connected() {
            return Err(Error::Domain(
                "spanning tree of a disconnected graph".into(),
            ));
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n + 1];
        let mut queue = VecDeque::from([1]);
        seen[1] = true;
        let mut tree = Vec::with_capacity(self.n - 1);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    tree.push((v, w));
                    queue.push_back(w);
                }
            }
        }
        Graph::new(self.n, tree)
    }

    /// Incidence matrix with edge `{i, j}` (i < j) oriented `i -> j`.
    pub fn incidence(&self) -> IncidenceMatrix {
        let mut h = DMatrix::zeros(self.m(), self.n);
        for (row, &(a, b)) in self.edges.iter().enumerate() {
            h[(row, a - 1)] = -1.0;
            h[(row, b - 1)] = 1.0;
        }
        IncidenceMatrix { matrix: h }
    }
}

/// Signed edge-vertex incidence matrix, `m x n` with one `-1` and one `+1` per row.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidenceMatrix {
    matrix: DMatrix<f64>,
}

impl IncidenceMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        linalg::numerical_rank(&self.matrix)
    }

    /// `H ⊗ I_d`, mapping stacked positions to stacked edge vectors `p_j - p_i`.
    pub fn kron_identity(&self, d: usize) -> DMatrix<f64> {
        self.matrix.kronecker(&DMatrix::<f64>::identity(d, d))
    }
}
