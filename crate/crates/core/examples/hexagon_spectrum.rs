//! Linearized stability of the hexagon formation under two gains.

use weakrig::control::{classify_stability, jacobian_at_target};
use weakrig::{fixtures, GainMatrix};

fn main() -> weakrig::Result<()> {
    let tgt = fixtures::hexagon_target();
    for (name, k) in [
        ("identity", GainMatrix::identity(6, 2)),
        ("designed", fixtures::hexagon_gain()),
    ] {
        let report = classify_stability(&jacobian_at_target(&tgt, &k)?, 2)?;
        println!("{name} gain: {:?}", report.verdict);
        for z in &report.eigenvalues {
            println!("  {:>9.4} {:+.4}i", z.re, z.im);
        }
    }
    Ok(())
}
