//! Drive a perturbed hexagon back to shape with the non-gradient law.

use weakrig::sampling::perturb;
use weakrig::simulate::{convergence_rate, integrate, monitor_invariants};
use weakrig::{fixtures, ControllerSpec, Law, SimulationConfig};

fn main() -> weakrig::Result<()> {
    let tgt = fixtures::hexagon_target();
    let ctrl = ControllerSpec::nongradient(tgt.clone(), fixtures::hexagon_gain())?;
    let mut cfg = SimulationConfig::new(perturb(tgt.witness(), 0.1, 0), ctrl);
    cfg.t_max = 200.0;

    let trace = integrate(&cfg)?;
    println!(
        "{:?} at t = {:.2}",
        trace.termination,
        trace.times.last().unwrap()
    );
    println!("final V = {:.3e}", trace.final_cost().unwrap());
    println!("edge lengths: {:?}", trace.edge_lengths.last().unwrap());
    println!("log-cost slope: {:.4}", convergence_rate(&trace, 50)?);

    let inv = monitor_invariants(&trace, Law::NonGradient);
    println!(
        "min distance {:.3}, rank constant {}",
        inv.min_distance, inv.rank_constant
    );
    Ok(())
}
