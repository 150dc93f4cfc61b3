//! Weak rigidity of frameworks and distributed formation control.
//!
//! A framework is a graph with a point for every vertex. Besides the classical
//! rigidity test on squared edge lengths, this crate works with *weak*
//! rigidity, where the constraints are inner products `e_ij · e_ik` of edge
//! vectors sharing an apex (see [`framework::Triple`]).
//!
//! - [`graph`], [`framework`]: graphs, configurations, rigidity matrices and rank tests.
//! - [`triple_select`]: the planar graphical test and minimal triple sets.
//! - [`shape`]: distance/Gram matrices, congruence, alignment and shape recovery.
//! - [`control`]: gradient and non-gradient formation laws, Jacobian stability.
//! - [`simulate`]: RK4 closed-loop simulation with invariant monitoring.
//!
//! ```
//! use weakrig::fixtures;
//!
//! let hex = fixtures::hexagon_framework();
//! let check = hex.infinitesimal_weak_rigidity(&fixtures::hexagon_triples()).unwrap();
//! assert_eq!((check.rank, check.required), (9, 9));
//! assert!(!hex.is_infinitesimally_rigid().unwrap());
//! ```

pub mod cli;
pub mod control;
pub mod error;
pub mod fixtures;
pub mod framework;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod sampling;
pub mod shape;
pub mod simulate;
pub mod triple_select;

pub use control::{ControllerSpec, FormationTarget, GainMatrix, Law, Verdict};
pub use error::{Error, Result};
pub use framework::{Configuration, Framework, RankCheck, Triple, TripleSet};
pub use graph::Graph;
pub use simulate::{SimulationConfig, SimulationTrace};
