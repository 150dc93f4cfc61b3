//! Rebuild a framework from its edge Gram matrix, up to a rigid motion.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weakrig::sampling::uniform_configuration;
use weakrig::shape::{congruent, gram, recover_shape, shape_distance};
use weakrig::{Framework, Graph};

fn main() -> weakrig::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = Framework::new(
        Graph::path(5),
        uniform_configuration(&mut rng, 5, 2, -2.0, 2.0),
    )?;

    let g = gram(&f);
    println!(
        "gram {}x{}, rank {}, psd {}",
        g.matrix().nrows(),
        g.matrix().ncols(),
        g.rank(),
        g.is_psd()
    );

    let back = recover_shape(&g, f.graph(), 2)?;
    println!("shape distance {:.3e}", shape_distance(f.config(), &back)?);
    println!("congruent: {}", congruent(f.config(), &back, 1e-9)?);
    Ok(())
}
