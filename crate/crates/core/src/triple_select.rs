//! Planar graphical test for infinitesimal weak rigidity and the construction
//! of a minimal triple set (spanning-tree growth followed by per-vertex
//! angle selection).

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::framework::{Configuration, Framework, Triple, TripleSet};
use crate::graph::Graph;
use crate::linalg::collinear;
use crate::sampling;

/// Outcome of the planar graphical test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphicalReport {
    pub connected: bool,
    /// Vertices of degree >= 2 whose incident edge vectors are all collinear.
    pub collinear_vertices: Vec<usize>,
}

impl GraphicalReport {
    pub fn holds(&self) -> bool {
        self.connected && self.collinear_vertices.is_empty()
    }
}

fn require_planar(f: &Framework) -> Result<()> {
    if f.d() != 2 {
        return Err(Error::UnsupportedDimension {
            d: f.d(),
            reason: "graphical construction is planar-only",
        });
    }
    Ok(())
}

/// True if some pair of the given neighbours of `i` spans a plane at `p_i`.
fn has_noncollinear_pair(c: &Configuration, i: usize, neighbors: &BTreeSet<usize>) -> bool {
    let vecs: Vec<Vec<f64>> = neighbors.iter().map(|&j| c.edge_vector(i, j)).collect();
    vecs.iter()
        .enumerate()
        .any(|(a, u)| vecs[a + 1..].iter().any(|v| !collinear(u, v)))
}

/// Connectivity plus, at every vertex with two or more neighbours, a pair of
/// non-collinear incident edges. In the plane this is equivalent to
/// infinitesimal weak rigidity for a suitable triple set.
pub fn planar_graphical_report(f: &Framework) -> Result<GraphicalReport> {
    require_planar(f)?;
    if f.n() < 3 {
        return Err(Error::UnsupportedRegime { n: f.n(), d: f.d() });
    }
    let g = f.graph();
    let collinear_vertices = (1..=f.n())
        .filter(|&i| {
            let nb = g.neighbors_unchecked(i);
            nb.len() >= 2 && !has_noncollinear_pair(f.config(), i, &nb)
        })
        .collect();
    Ok(GraphicalReport {
        connected: g.is_connected(),
        collinear_vertices,
    })
}

/// Connected, and every vertex with two or more neighbors has a non-collinear
/// pair of incident edges. Matches the rank test at generic configurations.
/// At special ones the rank test can still pass when this returns `false`:
/// a vertex whose own edges are collinear may be pinned by angle rows at its
/// neighbors (see `non_generic_collinear_vertex_can_be_pinned`).
pub fn check_planar_graphical_condition(f: &Framework) -> Result<bool> {
    Ok(planar_graphical_report(f)?.holds())
}

/// Upper bound on partial trees explored before giving up.
const TREE_SEARCH_BUDGET: usize = 1_000_000;

struct TreeSearch<'a> {
    graph: &'a Graph,
    config: &'a Configuration,
    in_tree: Vec<bool>,
    tree_edges: Vec<(usize, usize)>,
    budget: usize,
    // Deepest point reached, for the error report.
    best: (usize, usize),
}

impl TreeSearch<'_> {
    /// Edge `{i, j}` with `i` in the tree and `j` outside may join when some
    /// tree edge `{i, k}` is not collinear with it.
    fn admissible(&self, i: usize, j: usize) -> bool {
        let eij = self.config.edge_vector(i, j);
        self.tree_edges
            .iter()
            .filter_map(|&(a, b)| match (a == i, b == i) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .any(|k| !collinear(&eij, &self.config.edge_vector(i, k)))
    }

    fn candidates(&self) -> Vec<(usize, usize)> {
        self.graph
            .edges()
            .iter()
            .filter_map(|&(a, b)| match (self.in_tree[a], self.in_tree[b]) {
                (true, false) => Some((a, b)),
                (false, true) => Some((b, a)),
                _ => None,
            })
            .filter(|&(i, j)| self.admissible(i, j))
            .collect()
    }

    fn grow(&mut self, reached: usize) -> bool {
        if reached == self.graph.n() {
            return true;
        }
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        let candidates = self.candidates();
        if candidates.is_empty() && reached > self.best.0 {
            let stalled = self.tree_edges.last().map_or(1, |&(_, j)| j);
            self.best = (reached, stalled);
        }
        for (i, j) in candidates {
            self.in_tree[j] = true;
            self.tree_edges.push((i, j));
            if self.grow(reached + 1) {
                return true;
            }
            self.tree_edges.pop();
            self.in_tree[j] = false;
        }
        false
    }
}

/// Grows a spanning tree `T_r` such that `(T_r, p)` is minimally
/// infinitesimally weakly rigid.
///
/// Starts from the lexicographically smallest edge and repeatedly adds the
/// first admissible edge in canonical order. If that greedy choice dead-ends,
/// earlier choices are revisited in the same order.
pub fn algorithm1_min_iwr_subframework(f: &Framework) -> Result<Graph> {
    require_planar(f)?;
    let g = f.graph();
    let n = g.n();
    let Some(&(a, b)) = g.edges().first() else {
        return Err(Error::NoValidExtension {
            reached: 1,
            n,
            vertex: 1,
        });
    };
    let mut in_tree = vec![false; n + 1];
    in_tree[a] = true;
    in_tree[b] = true;
    let mut search = TreeSearch {
        graph: g,
        config: f.config(),
        in_tree,
        tree_edges: vec![(a, b)],
        budget: TREE_SEARCH_BUDGET,
        best: (2, b),
    };
    if search.grow(2) {
        Graph::new(n, search.tree_edges)
    } else {
        Err(Error::NoValidExtension {
            reached: search.best.0,
            n,
            vertex: search.best.1,
        })
    }
}

/// Builds `T†` with exactly `2n - 3` triples for a minimally infinitesimally
/// weakly rigid planar tree: every edge's distance plus `|N_i| - 1` angle
/// triples at each internal vertex.
pub fn algorithm2_construct_tdagger(tree: &Graph, c: &Configuration) -> Result<TripleSet> {
    if c.d() != 2 {
        return Err(Error::UnsupportedDimension {
            d: c.d(),
            reason: "graphical construction is planar-only",
        });
    }
    if tree.n() != c.n() {
        return Err(Error::Input(format!(
            "tree has {} vertices but configuration has {} points",
            tree.n(),
            c.n()
        )));
    }
    if !tree.is_tree() {
        return Err(Error::Domain("triple-set construction needs a tree".into()));
    }
    let mut out: Vec<Triple> = tree
        .edges()
        .iter()
        .map(|&(a, b)| Triple::distance(a, b))
        .collect();
    for i in 1..=tree.n() {
        let nb = tree.neighbors_unchecked(i);
        if nb.len() < 2 {
            continue;
        }
        let ji = *nb.first().expect("two or more neighbours");
        let e_ji = c.edge_vector(i, ji);
        let (hat, check): (Vec<usize>, Vec<usize>) = nb
            .iter()
            .partition(|&&k| k == ji || collinear(&e_ji, &c.edge_vector(i, k)));
        let Some(&ki) = check.first() else {
            return Err(Error::Construction { vertex: i });
        };
        out.extend(check.iter().map(|&k| Triple::new(i, ji, k)));
        out.extend(
            hat.iter()
                .filter(|&&j| j != ji)
                .map(|&j| Triple::new(i, j, ki)),
        );
    }
    TripleSet::new(out)
}

/// Runs the tree growth and the triple construction back to back.
pub fn minimal_triple_set(f: &Framework) -> Result<(Graph, TripleSet)> {
    let tree = algorithm1_min_iwr_subframework(f)?;
    let t = algorithm2_construct_tdagger(&tree, f.config())?;
    Ok((tree, t))
}

/// Every `(i, j, k)` with `{i,j}, {i,k}` edges and `j <= k`; each distance
/// constraint appears once in canonical form. Sorted lexicographically.
pub fn full_triple_set(g: &Graph) -> TripleSet {
    let mut set = BTreeSet::new();
    for i in 1..=g.n() {
        let nb: Vec<usize> = g.neighbors_unchecked(i).into_iter().collect();
        for (a, &j) in nb.iter().enumerate() {
            set.insert(Triple::distance(i, j));
            for &k in &nb[a + 1..] {
                set.insert(Triple::new(i, j, k));
            }
        }
    }
    TripleSet::new(set).expect("set has no duplicates")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub iwr_count: usize,
    pub total: usize,
}

/// Samples `trials` configurations with coordinates uniform on `[-1, 1]` and
/// counts how many are infinitesimally weakly rigid under the full triple
/// set. Trial `t` uses the generator seeded with `seed + t`.
pub fn generic_rigidity_probe(
    g: &Graph,
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(Error::Input("probe needs at least one trial".into()));
    }
    let t = full_triple_set(g);
    let mut iwr_count = 0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let c = sampling::uniform_configuration(&mut rng, g.n(), d, -1.0, 1.0);
        let f = Framework::new(g.clone(), c)?;
        if f.is_infinitesimally_weakly_rigid(&t)? {
            iwr_count += 1;
        }
    }
    Ok(ProbeReport {
        iwr_count,
        total: trials,
    })
}
