//! Small dense linear-algebra helpers shared by the rank tests.

use nalgebra::{DMatrix, DVector};

/// Relative factor in the rank tolerance `max(rows, cols) * sigma_max * RANK_RTOL`.
pub const RANK_RTOL: f64 = 1e-10;
/// Absolute tolerance used when the matrix is exactly zero.
pub const RANK_FLOOR: f64 = 1e-12;
/// Relative factor for the collinearity test on two edge vectors.
pub const COLLINEAR_RTOL: f64 = 1e-9;

/// Singular values in descending order. Empty matrices have none.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Threshold below which a singular value counts as zero.
pub fn rank_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    if sigma_max == 0.0 {
        RANK_FLOOR
    } else {
        rows.max(cols) as f64 * sigma_max * RANK_RTOL
    }
}

pub fn numerical_rank(a: &DMatrix<f64>) -> usize {
    let sv = singular_values(a);
    let Some(&top) = sv.first() else { return 0 };
    let tol = rank_tolerance(a.nrows(), a.ncols(), top);
    sv.iter().filter(|&&s| s > tol).count()
}

/// Scale-invariant collinearity test; a zero vector is collinear with everything.
pub fn collinear(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return true;
    }
    // Norm of the wedge product, summed over coordinate planes. Avoids the
    // cancellation in |a|^2 |b|^2 - (a.b)^2.
    let mut wedge_sq = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let w = a[i] * b[j] - a[j] * b[i];
            wedge_sq += w * w;
        }
    }
    wedge_sq.sqrt() <= COLLINEAR_RTOL * na * nb
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Modified Gram-Schmidt on the columns of `a`. Returns `None` when a column
/// collapses below `tol` relative to its original norm (linear dependence).
pub fn orthonormalize_columns(a: &DMatrix<f64>, tol: f64) -> Option<DMatrix<f64>> {
    let mut q = a.clone();
    for c in 0..q.ncols() {
        let original = q.column(c).norm();
        for prev in 0..c {
            let proj = q.column(prev).dot(&q.column(c));
            let prev_col: DVector<f64> = q.column(prev).into_owned();
            let mut col = q.column_mut(c);
            col.axpy(-proj, &prev_col, 1.0);
        }
        let remaining = q.column(c).norm();
        if original == 0.0 || remaining <= tol * original {
            return None;
        }
        q.column_mut(c).scale_mut(1.0 / remaining);
    }
    Some(q)
}
