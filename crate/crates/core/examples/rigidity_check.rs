//! Rigidity vs weak rigidity on the six-agent hexagon.

use weakrig::{fixtures, triple_select::full_triple_set};

fn main() -> weakrig::Result<()> {
    let hex = fixtures::hexagon_framework();
    let rigid = hex.infinitesimal_rigidity()?;
    println!("distance rigidity: rank {}/{}", rigid.rank, rigid.required);

    let weak = hex.infinitesimal_weak_rigidity(&fixtures::hexagon_triples())?;
    println!(
        "weak rigidity, 9 triples: rank {}/{}",
        weak.rank, weak.required
    );

    let full = full_triple_set(hex.graph());
    let all = hex.infinitesimal_weak_rigidity(&full)?;
    println!(
        "weak rigidity, all {} triples: rank {}/{}",
        full.len(),
        all.rank,
        all.required
    );
    Ok(())
}
