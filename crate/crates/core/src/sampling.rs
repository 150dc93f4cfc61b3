//! Seeded random frameworks, graphs and rigid motions.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::framework::Configuration;
use crate::graph::Graph;

/// Coordinates i.i.d. uniform on `[lo, hi)`.
pub fn uniform_configuration<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    d: usize,
    lo: f64,
    hi: f64,
) -> Configuration {
    let coords = (0..n * d).map(|_| rng.random_range(lo..hi)).collect();
    Configuration::from_flat(d, coords).expect("finite coordinates")
}

/// `c` with every coordinate shifted by an independent draw from
/// `[-amplitude, amplitude]`, using the generator seeded with `seed`.
pub fn perturb(c: &Configuration, amplitude: f64, seed: u64) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = c
        .as_slice()
        .iter()
        .map(|x| x + rng.random_range(-amplitude..=amplitude))
        .collect();
    Configuration::from_flat(c.d(), coords).expect("finite coordinates")
}

/// Distinct points drawn from the integer grid `{0, .., side-1}^d`.
/// Produces many collinear triples, which exercises the degenerate branches
/// of the planar tests.
pub fn grid_configuration<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    d: usize,
    side: usize,
) -> Configuration {
    let cells = side.pow(d as u32);
    assert!(n <= cells, "grid too small for {n} distinct points");
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    while chosen.len() < n {
        let c = rng.random_range(0..cells);
        if !chosen.contains(&c) {
            chosen.push(c);
        }
    }
    let coords = chosen
        .into_iter()
        .flat_map(|mut c| {
            (0..d).map(move |_| {
                let x = (c % side) as f64;
                c /= side;
                x
            })
        })
        .collect();
    Configuration::from_flat(d, coords).expect("finite coordinates")
}

/// Random tree (each vertex `v > 1` attaches to a uniform earlier vertex)
/// plus every other pair independently with probability `extra`.
pub fn random_connected_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, extra: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 2..=n {
        edges.push((rng.random_range(1..v), v));
    }
    for a in 1..=n {
        for b in a + 1..=n {
            if !edges.contains(&(a, b)) && rng.random_bool(extra) {
                edges.push((a, b));
            }
        }
    }
    Graph::new(n, edges).expect("random graph is simple")
}

/// Random orthogonal matrix (QR of a Gaussian-like matrix), optionally forced to `det = +1`.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, d: usize, proper: bool) -> DMatrix<f64> {
    loop {
        let m = DMatrix::<f64>::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        if m.determinant().abs() < 1e-3 {
            continue;
        }
        let qr = m.qr();
        let mut q = qr.q();
        let r = qr.r();
        for c in 0..d {
            if r[(c, c)] < 0.0 {
                q.column_mut(c).neg_mut();
            }
        }
        if proper && q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        return q;
    }
}
