//! Frameworks, constraint triples and the (weak) rigidity matrices.
//!
//! A [`Triple`] `(i, j, k)` names the scalar `e_ij · e_ik` with
//! `e_ij = p_i - p_j`. When `j == k` it is the squared length of edge `{i, j}`.
//! Stacked positions use the layout `p = (p_1, ..., p_n)`, so agent `i`
//! occupies columns `(i-1)d .. i d` of every matrix below.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg;

/// Number of independent trivial motions in dimension `d`: `d(d+1)/2`.
pub fn trivial_motion_count(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Stacked point coordinates `p ∈ R^{nd}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigRepr", into = "ConfigRepr")]
pub struct Configuration {
    d: usize,
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ConfigRepr {
    d: usize,
    points: Vec<Vec<f64>>,
}

impl TryFrom<ConfigRepr> for Configuration {
    type Error = Error;
    fn try_from(r: ConfigRepr) -> Result<Self> {
        Configuration::new(r.d, r.points)
    }
}

impl From<Configuration> for ConfigRepr {
    fn from(c: Configuration) -> Self {
        ConfigRepr {
            d: c.d,
            points: c.points().map(<[f64]>::to_vec).collect(),
        }
    }
}

impl Configuration {
    pub fn new(d: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if let Some((idx, p)) = points.iter().enumerate().find(|(_, p)| p.len() != d) {
            return Err(Error::Input(format!(
                "point {} has {} coordinates, expected d = {d}",
                idx + 1,
                p.len()
            )));
        }
        Configuration::from_flat(d, points.into_iter().flatten().collect())
    }

    pub fn from_flat(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Input("dimension d must be at least 1".into()));
        }
        if coords.is_empty() || coords.len() % d != 0 {
            return Err(Error::Input(format!(
                "{} coordinates do not form points in dimension {d}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::Input(format!(
                "coordinate {} of point {} is not finite",
                pos % d + 1,
                pos / d + 1
            )));
        }
        Ok(Configuration { d, coords })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coords)
    }

    /// Point `i` (1-based).
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[(i - 1) * self.d..i * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    /// `e_ij = p_i - p_j`.
    pub fn edge_vector(&self, i: usize, j: usize) -> Vec<f64> {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| a - b)
            .collect()
    }

    /// The `d x n` matrix `P = (p_1, ..., p_n)`.
    pub fn point_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.d, self.n(), &self.coords)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.d];
        for p in self.points() {
            for (acc, x) in c.iter_mut().zip(p) {
                *acc += x;
            }
        }
        let n = self.n() as f64;
        c.iter_mut().for_each(|x| *x /= n);
        c
    }

    /// `q_i = A p_i + c` for every point.
    pub fn transformed(&self, a: &DMatrix<f64>, c: &[f64]) -> Configuration {
        assert_eq!(a.shape(), (self.d, self.d));
        let p = self.point_matrix();
        let mut q = a * p;
        for mut col in q.column_iter_mut() {
            for (x, shift) in col.iter_mut().zip(c) {
                *x += shift;
            }
        }
        Configuration {
            d: self.d,
            coords: q.as_slice().to_vec(),
        }
    }

    /// True when the points are affinely independent enough to span `R^d`,
    /// i.e. the `n x (d+1)` matrix `(1_n, P^T)` has rank `d + 1`.
    pub fn spans_full_dimension(&self) -> Result<bool> {
        let (n, d) = (self.n(), self.d);
        if n <= d {
            return Err(Error::UnsupportedRegime { n, d });
        }
        let mut m = DMatrix::from_element(n, d + 1, 1.0);
        for (i, p) in self.points().enumerate() {
            for (c, x) in p.iter().enumerate() {
                m[(i, c + 1)] = *x;
            }
        }
        Ok(linalg::numerical_rank(&m) == d + 1)
    }

    /// Orthonormal basis of the trivial motion space: `d` translations
    /// followed by `d(d-1)/2` infinitesimal rotations `(I_n ⊗ A) p`.
    pub fn trivial_motion_basis(&self) -> Result<MotionBasis> {
        let (n, d) = (self.n(), self.d);
        let mut cols = DMatrix::zeros(n * d, trivial_motion_count(d));
        for axis in 0..d {
            for agent in 0..n {
                cols[(agent * d + axis, axis)] = 1.0;
            }
        }
        let mut c = d;
        for a in 0..d {
            for b in a + 1..d {
                // A = E_ba - E_ab, so (A p_i)_a = -p_i[b] and (A p_i)_b = p_i[a].
                for (agent, p) in self.points().enumerate() {
                    cols[(agent * d + a, c)] = -p[b];
                    cols[(agent * d + b, c)] = p[a];
                }
                c += 1;
            }
        }
        let q = linalg::orthonormalize_columns(&cols, 1e-10).ok_or_else(|| {
            Error::DegenerateConfiguration(
                "translation and rotation generators are linearly dependent".into(),
            )
        })?;
        Ok(MotionBasis { basis: q })
    }
}

/// Columns spanning the trivial (rigid-body) infinitesimal motions.
#[derive(Clone, Debug)]
pub struct MotionBasis {
    basis: DMatrix<f64>,
}

impl MotionBasis {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// One component `e_ij · e_ik` of the weak rigidity function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub apex: usize,
    pub j: usize,
    pub k: usize,
}

impl Triple {
    /// Builds `(i, j, k)`, ordering the legs so that `j <= k`.
    pub fn new(apex: usize, j: usize, k: usize) -> Self {
        Triple {
            apex,
            j: j.min(k),
            k: j.max(k),
        }
    }

    /// Canonical squared-length constraint of edge `{a, b}`: apex is the larger label.
    pub fn distance(a: usize, b: usize) -> Self {
        Triple::new(a.max(b), a.min(b), a.min(b))
    }

    pub fn is_distance(&self) -> bool {
        self.j == self.k
    }

    /// Rewrites a distance triple into canonical form; angle triples are unchanged.
    pub fn canonical(&self) -> Self {
        if self.is_distance() {
            Triple::distance(self.apex, self.j)
        } else {
            *self
        }
    }

    pub fn involves(&self, v: usize) -> bool {
        self.apex == v || self.j == v || self.k == v
    }

    /// Checks that the legs are edges of `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        for leg in [self.j, self.k] {
            if !g.has_edge(self.apex, leg) {
                return Err(Error::Input(format!(
                    "triple {self} uses ({},{leg}), which is not an edge",
                    self.apex
                )));
            }
        }
        Ok(())
    }

    /// `e_ij · e_ik` evaluated on `c`.
    pub fn value(&self, c: &Configuration) -> f64 {
        linalg::dot(
            &c.edge_vector(self.apex, self.j),
            &c.edge_vector(self.apex, self.k),
        )
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.apex, self.j, self.k)
    }
}

/// Ordered, duplicate-free list of triples. The order fixes the row order of
/// `R_w` and the component order of the weak rigidity function.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "TripleSetRepr", into = "TripleSetRepr")]
pub struct TripleSet {
    triples: Vec<Triple>,
}

#[derive(Serialize, Deserialize)]
struct TripleSetRepr {
    triples: Vec<[usize; 3]>,
}

impl TryFrom<TripleSetRepr> for TripleSet {
    type Error = Error;
    fn try_from(r: TripleSetRepr) -> Result<Self> {
        TripleSet::new(r.triples.into_iter().map(|[i, j, k]| Triple::new(i, j, k)))
    }
}

impl From<TripleSet> for TripleSetRepr {
    fn from(t: TripleSet) -> Self {
        TripleSetRepr {
            triples: t.triples.iter().map(|t| [t.apex, t.j, t.k]).collect(),
        }
    }
}

impl TripleSet {
    /// Rejects repeated triples, including the same distance constraint written
    /// with either endpoint as apex.
    pub fn new(triples: impl IntoIterator<Item = Triple>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for t in triples {
            if t.apex == t.j || t.apex == t.k {
                return Err(Error::Input(format!(
                    "triple {t} repeats its apex as a leg"
                )));
            }
            if !seen.insert(t.canonical()) {
                return Err(Error::Input(format!("duplicate triple {t}")));
            }
            out.push(t);
        }
        Ok(TripleSet { triples: out })
    }

    /// Canonical distance triples of every edge, in canonical edge order.
    pub fn distances(g: &Graph) -> Self {
        TripleSet {
            triples: g
                .edges()
                .iter()
                .map(|&(a, b)| Triple::distance(a, b))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Triple> {
        self.triples.iter()
    }

    pub fn as_slice(&self) -> &[Triple] {
        &self.triples
    }

    pub fn contains(&self, t: &Triple) -> bool {
        let c = t.canonical();
        self.triples.iter().any(|x| x.canonical() == c)
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        self.triples.iter().try_for_each(|t| t.validate(g))
    }

    /// Same triples as a set, ignoring order and distance-apex choice.
    pub fn same_set(&self, other: &TripleSet) -> bool {
        let a: BTreeSet<_> = self.triples.iter().map(Triple::canonical).collect();
        let b: BTreeSet<_> = other.triples.iter().map(Triple::canonical).collect();
        a == b
    }
}

impl<'a> IntoIterator for &'a TripleSet {
    type Item = &'a Triple;
    type IntoIter = std::slice::Iter<'a, Triple>;
    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

/// Result of a rank-based rigidity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankCheck {
    pub rank: usize,
    pub required: usize,
}

impl RankCheck {
    pub fn holds(&self) -> bool {
        self.rank == self.required
    }
}

/// `R_e^{tr}` for a spanning tree, together with the triples it was built from.
#[derive(Clone, Debug)]
pub struct TreeRigidity {
    pub matrix: DMatrix<f64>,
    pub triples: TripleSet,
    /// Max abs entry of `R_e^{tr} (∂e/∂p) - R_w^{tr}`; should be round-off.
    pub chain_rule_residual: f64,
}

/// A graph together with a configuration of its vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameworkRepr", into = "FrameworkRepr")]
pub struct Framework {
    graph: Graph,
    config: Configuration,
}

#[derive(Serialize, Deserialize)]
struct FrameworkRepr {
    #[serde(flatten)]
    graph: Graph,
    #[serde(flatten)]
    config: Configuration,
}

impl TryFrom<FrameworkRepr> for Framework {
    type Error = Error;
    fn try_from(r: FrameworkRepr) -> Result<Self> {
        Framework::new(r.graph, r.config)
    }
}

impl From<Framework> for FrameworkRepr {
    fn from(f: Framework) -> Self {
        FrameworkRepr {
            graph: f.graph,
            config: f.config,
        }
    }
}

impl Framework {
    pub fn new(graph: Graph, config: Configuration) -> Result<Self> {
        if graph.n() != config.n() {
            return Err(Error::Input(format!(
                "graph has {} vertices but configuration has {} points",
                graph.n(),
                config.n()
            )));
        }
        Ok(Framework { graph, config })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn d(&self) -> usize {
        self.config.d()
    }

    pub fn with_config(&self, config: Configuration) -> Result<Framework> {
        Framework::new(self.graph.clone(), config)
    }

    /// `nd - d(d+1)/2`, the rank required for infinitesimal (weak) rigidity.
    pub fn required_rank(&self) -> usize {
        (self.n() * self.d()).saturating_sub(trivial_motion_count(self.d()))
    }

    fn check_regime(&self) -> Result<()> {
        let (n, d) = (self.n(), self.d());
        if n <= d {
            Err(Error::UnsupportedRegime { n, d })
        } else {
            Ok(())
        }
    }

    /// Squared edge lengths in canonical edge order.
    pub fn rigidity_function(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.graph.m(),
            self.graph.edges().iter().map(|&(a, b)| {
                let e = self.config.edge_vector(a, b);
                linalg::dot(&e, &e)
            }),
        )
    }

    pub fn weak_rigidity_function(&self, t: &TripleSet) -> Result<DVector<f64>> {
        t.validate(&self.graph)?;
        Ok(DVector::from_iterator(
            t.len(),
            t.iter().map(|tr| tr.value(&self.config)),
        ))
    }

    /// `R(p) = ∂g/∂p`, one row per edge.
    pub fn rigidity_matrix(&self) -> DMatrix<f64> {
        let d = self.d();
        let mut r = DMatrix::zeros(self.graph.m(), self.n() * d);
        for (row, &(a, b)) in self.graph.edges().iter().enumerate() {
            let e = self.config.edge_vector(a, b);
            for c in 0..d {
                r[(row, (a - 1) * d + c)] = 2.0 * e[c];
                r[(row, (b - 1) * d + c)] = -2.0 * e[c];
            }
        }
        r
    }

    /// `R_w(p) = ∂r/∂p` for the triple set `t`.
    pub fn weak_rigidity_matrix(&self, t: &TripleSet) -> Result<DMatrix<f64>> {
        t.validate(&self.graph)?;
        Ok(weak_rigidity_rows(&self.config, t, false))
    }

    /// `R_e^{tr} = ∂r_{T_r}/∂e_{tr}` over the triples of `t` whose legs are
    /// both tree edges. Columns follow the tree's canonical edge order, with
    /// `e_ab = p_a - p_b` for a tree edge `(a, b)`, `a < b`.
    pub fn edge_weak_rigidity_matrix(&self, tree: &Graph, t: &TripleSet) -> Result<TreeRigidity> {
        t.validate(&self.graph)?;
        if !tree.is_spanning_tree_of(&self.graph) {
            return Err(Error::Domain(
                "not a spanning tree of the framework graph".into(),
            ));
        }
        let d = self.d();
        let kept = TripleSet {
            triples: t
                .iter()
                .filter(|tr| tree.has_edge(tr.apex, tr.j) && tree.has_edge(tr.apex, tr.k))
                .copied()
                .collect(),
        };
        let mut re = DMatrix::zeros(kept.len(), tree.m() * d);
        for (row, tr) in kept.iter().enumerate() {
            let eij = self.config.edge_vector(tr.apex, tr.j);
            let eik = self.config.edge_vector(tr.apex, tr.k);
            // d(e_ij . e_ik) = sign_ij e_ik . d(e_edge(ij)) + sign_ik e_ij . d(e_edge(ik))
            for (leg, other) in [(tr.j, &eik), (tr.k, &eij)] {
                let col = tree.edge_index(tr.apex, leg).expect("leg is a tree edge");
                let sign = if tr.apex < leg { 1.0 } else { -1.0 };
                for c in 0..d {
                    re[(row, col * d + c)] += sign * other[c];
                }
            }
        }
        // ∂e/∂p = -(H ⊗ I_d) under the i -> j incidence orientation.
        let edge_jacobian: DMatrix<f64> = -tree.incidence().kron_identity(d);
        let reconstructed: DMatrix<f64> = &re * edge_jacobian;
        let direct = weak_rigidity_rows(&self.config, &kept, false);
        let chain_rule_residual = (reconstructed - direct).amax();
        Ok(TreeRigidity {
            matrix: re,
            triples: kept,
            chain_rule_residual,
        })
    }

    pub fn infinitesimal_rigidity(&self) -> Result<RankCheck> {
        self.check_regime()?;
        Ok(RankCheck {
            rank: linalg::numerical_rank(&self.rigidity_matrix()),
            required: self.required_rank(),
        })
    }

    pub fn is_infinitesimally_rigid(&self) -> Result<bool> {
        Ok(self.infinitesimal_rigidity()?.holds())
    }

    pub fn infinitesimal_weak_rigidity(&self, t: &TripleSet) -> Result<RankCheck> {
        self.check_regime()?;
        Ok(RankCheck {
            rank: linalg::numerical_rank(&self.weak_rigidity_matrix(t)?),
            required: self.required_rank(),
        })
    }

    pub fn is_infinitesimally_weakly_rigid(&self, t: &TripleSet) -> Result<bool> {
        Ok(self.infinitesimal_weak_rigidity(t)?.holds())
    }

    /// Sufficient test through a spanning tree: `rank(R_e^{tr}) = nd - d(d+1)/2`.
    /// A negative answer is inconclusive for `d >= 3`.
    pub fn tree_weak_rigidity(&self, tree: &Graph, t: &TripleSet) -> Result<RankCheck> {
        self.check_regime()?;
        let tr = self.edge_weak_rigidity_matrix(tree, t)?;
        Ok(RankCheck {
            rank: linalg::numerical_rank(&tr.matrix),
            required: self.required_rank(),
        })
    }

    pub fn check_iwr_via_spanning_tree(&self, tree: &Graph, t: &TripleSet) -> Result<bool> {
        Ok(self.tree_weak_rigidity(tree, t)?.holds())
    }
}

/// Rows of `R_w` (or of `R̄_w` when `apex_only_angles`) for an already validated triple set.
pub(crate) fn weak_rigidity_rows(
    c: &Configuration,
    t: &TripleSet,
    apex_only_angles: bool,
) -> DMatrix<f64> {
    let d = c.d();
    let mut r = DMatrix::zeros(t.len(), c.n() * d);
    for (row, tr) in t.iter().enumerate() {
        let eij = c.edge_vector(tr.apex, tr.j);
        let eik = c.edge_vector(tr.apex, tr.k);
        let (ci, cj, ck) = ((tr.apex - 1) * d, (tr.j - 1) * d, (tr.k - 1) * d);
        for x in 0..d {
            r[(row, ci + x)] += eij[x] + eik[x];
            if !(apex_only_angles && !tr.is_distance()) {
                r[(row, cj + x)] -= eik[x];
                r[(row, ck + x)] -= eij[x];
            }
        }
    }
    r
}
