//! Random search for a stabilizing diagonal gain.

use weakrig::control::{classify_stability, gain_search, jacobian_at_target};
use weakrig::fixtures;

fn main() -> weakrig::Result<()> {
    let tgt = fixtures::hexagon_target();
    let trials = 20_000;
    match gain_search(&tgt, trials, 42)? {
        Some(k) => {
            let report = classify_stability(&jacobian_at_target(&tgt, &k)?, 2)?;
            println!("found gain, verdict {:?}", report.verdict);
            for i in 1..=k.n() {
                let b = k.block(i);
                println!("  K{i} = diag({:.3}, {:.3})", b[(0, 0)], b[(1, 1)]);
            }
        }
        None => println!("none found in {trials} trials"),
    }
    Ok(())
}
