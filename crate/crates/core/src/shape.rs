//! Distance and Gram matrices, congruence tests, Procrustes alignment and
//! recovery of a configuration from an edge Gram matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::framework::{Configuration, Framework};
use crate::graph::Graph;
use crate::io::fmt_num;
use crate::linalg;

/// Relative clamp for negative eigenvalues of a Gram matrix.
pub const PSD_RTOL: f64 = 1e-10;

/// `d x m` matrix whose columns are the edge vectors `e_ij = p_i - p_j`, `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeVectorMatrix {
    matrix: DMatrix<f64>,
}

impl EdgeVectorMatrix {
    pub fn new(f: &Framework) -> Self {
        let d = f.d();
        let edges = f.graph().edges();
        let mut matrix = DMatrix::zeros(d, edges.len());
        for (col, &(a, b)) in edges.iter().enumerate() {
            let e = f.config().edge_vector(a, b);
            matrix.column_mut(col).copy_from_slice(&e);
        }
        EdgeVectorMatrix { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Edge Gram matrix `E^T E`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    matrix: DMatrix<f64>,
}

impl GramMatrix {
    /// Accepts any finite symmetric matrix (to `1e-12` relative). Positive
    /// semidefiniteness is checked separately by [`GramMatrix::is_psd`].
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Input(format!(
                "Gram matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("Gram matrix has non-finite entries".into()));
        }
        let scale = matrix.amax().max(1.0);
        if (&matrix - matrix.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Input("Gram matrix is not symmetric".into()));
        }
        Ok(GramMatrix { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Minimum eigenvalue at least `-PSD_RTOL * max eigenvalue`.
    pub fn is_psd(&self) -> bool {
        let ev = self.eigenvalues();
        match (ev.first(), ev.last()) {
            (Some(&top), Some(&low)) => low >= -PSD_RTOL * top.max(0.0),
            _ => true,
        }
    }

    pub fn rank(&self) -> usize {
        linalg::numerical_rank(&self.matrix)
    }

    /// Row-major CSV with edge labels `i-j` as header.
    pub fn to_csv(&self, g: &Graph) -> String {
        let labels: Vec<String> = g.edges().iter().map(|(a, b)| format!("{a}-{b}")).collect();
        matrix_csv(&self.matrix, &labels)
    }
}

/// Matrix of squared pairwise distances.
#[derive(Clone, Debug, PartialEq)]
pub struct Edm {
    matrix: DMatrix<f64>,
}

impl Edm {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Row-major CSV with vertex labels as header.
    pub fn to_csv(&self) -> String {
        let labels: Vec<String> = (1..=self.matrix.nrows()).map(|i| i.to_string()).collect();
        matrix_csv(&self.matrix, &labels)
    }
}

fn matrix_csv(m: &DMatrix<f64>, labels: &[String]) -> String {
    let mut out = format!(",{}\n", labels.join(","));
    for (r, label) in labels.iter().enumerate() {
        let row: Vec<String> = m.row(r).iter().map(|&x| fmt_num(x)).collect();
        out.push_str(&format!("{label},{}\n", row.join(",")));
    }
    out
}

pub fn edm(c: &Configuration) -> Edm {
    let n = c.n();
    let matrix = DMatrix::from_fn(n, n, |a, b| {
        let e = c.edge_vector(a + 1, b + 1);
        linalg::dot(&e, &e)
    });
    Edm { matrix }
}

pub fn gram(f: &Framework) -> GramMatrix {
    let e = EdgeVectorMatrix::new(f);
    GramMatrix {
        matrix: e.matrix.transpose() * &e.matrix,
    }
}

fn same_shape(p: &Configuration, q: &Configuration) -> Result<()> {
    if p.n() != q.n() || p.d() != q.d() {
        return Err(Error::Input(format!(
            "configurations differ in shape: {} points in R^{} vs {} points in R^{}",
            p.n(),
            p.d(),
            q.n(),
            q.d()
        )));
    }
    Ok(())
}

/// Equal pairwise distances: every EDM entry agrees within `tol`.
pub fn congruent(p: &Configuration, q: &Configuration, tol: f64) -> Result<bool> {
    same_shape(p, q)?;
    Ok((edm(p).matrix - edm(q).matrix).amax() <= tol)
}

/// Equal inner products `(p_i - p_j) · (p_i - p_k)` for every triple of vertices.
pub fn weakly_congruent(p: &Configuration, q: &Configuration, tol: f64) -> Result<bool> {
    same_shape(p, q)?;
    let n = p.n();
    for i in 1..=n {
        for j in 1..=n {
            let (pj, qj) = (p.edge_vector(i, j), q.edge_vector(i, j));
            for k in j..=n {
                let a = linalg::dot(&pj, &p.edge_vector(i, k));
                let b = linalg::dot(&qj, &q.edge_vector(i, k));
                if (a - b).abs() > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Orthogonal map and shift taking `q` onto `p` in the least-squares sense.
#[derive(Clone, Debug)]
pub struct Alignment {
    /// Orthogonal `d x d`, possibly a reflection.
    pub a: DMatrix<f64>,
    pub c: Vec<f64>,
    /// `sqrt(min sum_i |p_i - (A q_i + c)|^2)`.
    pub residual: f64,
}

pub fn align(p: &Configuration, q: &Configuration) -> Result<Alignment> {
    same_shape(p, q)?;
    let (pc, qc) = (p.centroid(), q.centroid());
    let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
    let id = DMatrix::identity(p.d(), p.d());
    let p0 = p.transformed(&id, &neg(&pc)).point_matrix();
    let q0 = q.transformed(&id, &neg(&qc)).point_matrix();
    let svd = (&p0 * q0.transpose()).svd(true, true);
    let a = svd.u.expect("requested U") * svd.v_t.expect("requested V^T");
    let aq = &a * DMatrix::from_column_slice(p.d(), 1, &qc);
    let c: Vec<f64> = pc.iter().zip(aq.iter()).map(|(x, y)| x - y).collect();
    let residual = (p0 - &a * q0).norm();
    Ok(Alignment { a, c, residual })
}

/// Procrustes residual allowing reflections; zero exactly for congruent pairs.
pub fn shape_distance(p: &Configuration, q: &Configuration) -> Result<f64> {
    Ok(align(p, q)?.residual)
}

/// Rebuilds positions from an edge Gram matrix: factor `G = E'^T E'` with the
/// top `d` eigenpairs, then walk a spanning tree from `p_1 = 0`.
pub fn recover_shape(g: &GramMatrix, graph: &Graph, d: usize) -> Result<Configuration> {
    let m = graph.m();
    if g.matrix.nrows() != m {
        return Err(Error::Input(format!(
            "Gram matrix is {0}x{0} but the graph has {m} edges",
            g.matrix.nrows()
        )));
    }
    if d == 0 {
        return Err(Error::Input("dimension d must be at least 1".into()));
    }
    if !graph.is_connected() {
        return Err(Error::Domain(
            "positions are only determined per connected component".into(),
        ));
    }
    let mut e = DMatrix::zeros(d, m);
    if m > 0 {
        let eig = g.matrix.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let top = eig.eigenvalues[order[0]].max(0.0);
        let lowest = eig.eigenvalues[order[m - 1]];
        if lowest < -PSD_RTOL * top {
            return Err(Error::Input(format!(
                "Gram matrix is not positive semidefinite (eigenvalue {lowest:e})"
            )));
        }
        let tol = linalg::rank_tolerance(m, m, top);
        let rank = order.iter().filter(|&&i| eig.eigenvalues[i] > tol).count();
        if rank > d {
            return Err(Error::NotRealizable { rank, d });
        }
        for (row, &idx) in order.iter().take(rank).enumerate() {
            let s = eig.eigenvalues[idx].sqrt();
            for col in 0..m {
                e[(row, col)] = s * eig.eigenvectors[(col, idx)];
            }
        }
    }
    let tree = graph.spanning_tree()?;
    let mut pos: Vec<Option<Vec<f64>>> = vec![None; graph.n() + 1];
    pos[1] = Some(vec![0.0; d]);
    let mut queue = std::collections::VecDeque::from([1usize]);
    while let Some(v) = queue.pop_front() {
        let pv = pos[v].clone().expect("visited");
        for w in tree.neighbors_unchecked(v) {
            if pos[w].is_some() {
                continue;
            }
            // Column of {a,b}, a < b, holds p_a - p_b.
            let col = graph.edge_index(v, w).expect("tree edge belongs to graph");
            let sign = if v < w { -1.0 } else { 1.0 };
            pos[w] = Some((0..d).map(|x| pv[x] + sign * e[(x, col)]).collect());
            queue.push_back(w);
        }
    }
    Configuration::new(
        d,
        pos.into_iter()
            .skip(1)
            .map(|p| p.expect("tree spans"))
            .collect(),
    )
}
