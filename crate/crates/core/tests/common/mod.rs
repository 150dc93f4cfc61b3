//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's rank or derivative routines.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use weakrig::{Configuration, Graph, Triple, TripleSet};

/// Rank from the diagonal of a column-pivoted QR factorization.
pub fn qr_rank(a: &DMatrix<f64>) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let r = a.clone().col_piv_qr().r();
    let diag: Vec<f64> = (0..r.nrows().min(r.ncols()))
        .map(|i| r[(i, i)].abs())
        .collect();
    let top = diag.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    let tol = 1e-8 * top * a.nrows().max(a.ncols()) as f64;
    diag.iter().filter(|&&x| x > tol).count()
}

/// Central-difference Jacobian of `f` at `x`.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> DMatrix<f64> {
    let m = f(x).len();
    let mut jac = DMatrix::zeros(m, x.len());
    let mut xp = x.to_vec();
    for c in 0..x.len() {
        xp[c] = x[c] + h;
        let fp = f(&xp);
        xp[c] = x[c] - h;
        let fm = f(&xp);
        xp[c] = x[c];
        for r in 0..m {
            jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    jac
}

pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> DVector<f64> {
    let j = fd_jacobian(|y| vec![f(y)], x, h);
    DVector::from_iterator(x.len(), j.row(0).iter().copied())
}

/// `|a - b| / max(|b|, floor)` in the Euclidean norm.
pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-12)
}

/// Inner product `(p_i - p_j) · (p_i - p_k)` written out directly.
pub fn inner(x: &[f64], d: usize, i: usize, j: usize, k: usize) -> f64 {
    (0..d)
        .map(|c| {
            (x[(i - 1) * d + c] - x[(j - 1) * d + c]) * (x[(i - 1) * d + c] - x[(k - 1) * d + c])
        })
        .sum()
}

pub fn triple_values(x: &[f64], d: usize, t: &TripleSet) -> Vec<f64> {
    t.iter()
        .map(|tr| inner(x, d, tr.apex, tr.j, tr.k))
        .collect()
}

/// Every spanning tree of `g`, by brute force over `(n-1)`-subsets of edges.
pub fn spanning_trees(g: &Graph) -> Vec<Graph> {
    let edges = g.edges().to_vec();
    let need = g.n() - 1;
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn rec(
        start: usize,
        need: usize,
        n: usize,
        edges: &[(usize, usize)],
        pick: &mut Vec<(usize, usize)>,
        out: &mut Vec<Graph>,
    ) {
        if pick.len() == need {
            let t = Graph::new(n, pick.iter().copied()).unwrap();
            if t.is_connected() {
                out.push(t);
            }
            return;
        }
        for i in start..edges.len() {
            pick.push(edges[i]);
            rec(i + 1, need, n, edges, pick, out);
            pick.pop();
        }
    }
    rec(0, need, g.n(), &edges, &mut pick, &mut out);
    out
}

/// Every valid triple written out from the adjacency lists.
pub fn all_triples(g: &Graph) -> Vec<Triple> {
    let mut out = Vec::new();
    for i in 1..=g.n() {
        let nb: Vec<usize> = (1..=g.n()).filter(|&j| g.has_edge(i, j)).collect();
        for (a, &j) in nb.iter().enumerate() {
            if j < i {
                out.push(Triple::new(i, j, j));
            }
            for &k in &nb[a + 1..] {
                out.push(Triple::new(i, j, k));
            }
        }
    }
    out
}

/// Random nonempty subset of the valid triples.
pub fn random_triple_subset<R: Rng>(rng: &mut R, g: &Graph) -> TripleSet {
    let all = all_triples(g);
    loop {
        let pick: Vec<Triple> = all
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.6))
            .collect();
        if !pick.is_empty() {
            return TripleSet::new(pick).unwrap();
        }
    }
}

pub fn random_point_set<R: Rng>(rng: &mut R, n: usize, d: usize) -> Configuration {
    let coords = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    Configuration::from_flat(d, coords).unwrap()
}
