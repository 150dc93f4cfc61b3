//! Grow a spanning tree and pick 2n-3 triples for a planar framework.

use weakrig::triple_select::{check_planar_graphical_condition, minimal_triple_set};
use weakrig::{fixtures, linalg::numerical_rank};

fn main() -> weakrig::Result<()> {
    let star = fixtures::star_framework();
    println!(
        "graphical condition: {}",
        check_planar_graphical_condition(&star)?
    );

    let (tree, triples) = minimal_triple_set(&star)?;
    println!("tree edges: {:?}", tree.edges());
    for t in triples.iter() {
        println!("  {t}");
    }
    let rank = numerical_rank(&star.weak_rigidity_matrix(&triples)?);
    println!(
        "{} triples, rank {rank}/{}",
        triples.len(),
        star.required_rank()
    );

    // All edges at vertex 1 collinear: no minimal set exists.
    match minimal_triple_set(&fixtures::collinear_star()) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("collinear star: {e}"),
    }
    Ok(())
}
