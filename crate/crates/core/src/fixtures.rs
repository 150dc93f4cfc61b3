//! Reference frameworks used by the examples, the CLI tests and the acceptance suite.

use nalgebra::DMatrix;

use crate::control::{FormationTarget, GainMatrix};
use crate::framework::{Configuration, Framework, Triple, TripleSet};
use crate::graph::Graph;

/// Path graph `1-2-3-4-5` plus edge `{1,6}`; a tree on six vertices.
pub fn hexagon_graph() -> Graph {
    Graph::new(6, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 6)]).expect("static graph")
}

/// Regular hexagon with side 2.
pub fn hexagon_config() -> Configuration {
    let s = 3f64.sqrt();
    Configuration::from_flat(
        2,
        vec![
            2.0,
            0.0,
            4.0,
            0.0,
            5.0,
            s,
            4.0,
            2.0 * s,
            2.0,
            2.0 * s,
            1.0,
            s,
        ],
    )
    .expect("static configuration")
}

pub fn hexagon_framework() -> Framework {
    Framework::new(hexagon_graph(), hexagon_config()).expect("sizes agree")
}

/// The four angle triples followed by the canonical distance triples of the five edges.
pub fn hexagon_triples() -> TripleSet {
    let angles = [(1, 2, 6), (2, 1, 3), (3, 2, 4), (4, 3, 5)].map(|(i, j, k)| Triple::new(i, j, k));
    let g = hexagon_graph();
    let distances = g.edges().iter().map(|&(a, b)| Triple::distance(a, b));
    TripleSet::new(angles.into_iter().chain(distances)).expect("no duplicates")
}

pub fn hexagon_target() -> FormationTarget {
    FormationTarget::new(hexagon_framework(), hexagon_triples()).expect("valid target")
}

/// Block-diagonal gain that stabilizes the hexagon under the non-gradient law.
pub fn hexagon_gain() -> GainMatrix {
    let diag = [
        (0.3, -0.04),
        (0.15, 1.34),
        (0.23, 1.09),
        (1.32, 0.34),
        (1.32, 0.21),
        (-0.45, 0.42),
    ];
    GainMatrix::new(
        diag.iter()
            .map(|&(a, b)| DMatrix::from_row_slice(2, 2, &[a, 0.0, 0.0, b]))
            .collect(),
    )
    .expect("uniform 2x2 blocks")
}

/// `p1 = (0,0)`, `p2 = (1,0)`, `p3 = (0,1)` on the given three-vertex graph.
pub fn right_angle_triangle(g: Graph) -> Framework {
    Framework::new(
        g,
        Configuration::from_flat(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).expect("static"),
    )
    .expect("three vertices")
}

/// Star on three collinear points `(0,0), (1,0), (2,0)` with edges `{1,2}, {1,3}`.
pub fn collinear_star() -> Framework {
    Framework::new(
        Graph::new(3, [(1, 2), (1, 3)]).expect("static"),
        Configuration::from_flat(2, vec![0.0, 0.0, 1.0, 0.0, 2.0, 0.0]).expect("static"),
    )
    .expect("three vertices")
}

/// Star `K_{1,5}` centred at 1, leaves 2, 5 and 6 on one line through the centre,
/// leaves 3 and 4 off it. The triple-set construction yields
/// `(1,2,3), (1,2,4), (1,3,5), (1,3,6)` plus the five distances.
pub fn star_framework() -> Framework {
    Framework::new(
        Graph::star(6),
        Configuration::from_flat(
            2,
            vec![0.0, 0.0, 1.0, 0.0, 0.5, 1.0, -0.6, 0.9, -1.0, 0.0, 2.0, 0.0],
        )
        .expect("static"),
    )
    .expect("six vertices")
}

pub fn star_expected_triples() -> TripleSet {
    let angles = [(1, 2, 3), (1, 2, 4), (1, 3, 5), (1, 3, 6)].map(|(i, j, k)| Triple::new(i, j, k));
    let distances = (2..=6).map(|j| Triple::distance(1, j));
    TripleSet::new(angles.into_iter().chain(distances)).expect("no duplicates")
}

/// Path `3-2-4-1` in `R^3`.
pub fn tree_3d_graph() -> Graph {
    Graph::new(4, [(2, 3), (2, 4), (1, 4)]).expect("static")
}

pub fn tree_3d_triples() -> TripleSet {
    TripleSet::new(
        [(4, 1, 1), (4, 2, 2), (3, 2, 2), (4, 1, 2), (2, 3, 4)]
            .map(|(i, j, k)| Triple::new(i, j, k)),
    )
    .expect("no duplicates")
}

/// Four-cycle `1-3-2-4-1` in `R^3`.
pub fn cycle_3d_graph() -> Graph {
    Graph::new(4, [(1, 3), (1, 4), (2, 3), (2, 4)]).expect("static")
}

pub fn cycle_3d_triples() -> TripleSet {
    TripleSet::new(
        [
            (1, 3, 3),
            (1, 4, 4),
            (2, 3, 3),
            (2, 4, 4),
            (1, 3, 4),
            (3, 1, 2),
        ]
        .map(|(i, j, k)| Triple::new(i, j, k)),
    )
    .expect("no duplicates")
}

/// Scalene triangle used as the target shape for three-agent gradient runs.
pub fn triangle_target_config() -> Configuration {
    Configuration::from_flat(2, vec![0.0, 0.0, 2.0, 0.0, 0.6, 1.7]).expect("static")
}
