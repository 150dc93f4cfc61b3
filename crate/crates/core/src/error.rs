use thiserror::Error;

use crate::simulate::SimulationTrace;

/// Errors produced by the rigidity, shape and control routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (bad vertex label, non-edge triple, shape mismatch).
    #[error("invalid input: {0}")]
    Input(String),

    /// Input is well formed but outside the operation's domain
    /// (disconnected graph, tree that does not span, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    /// Rank tests need at least `d + 1` points.
    #[error("unsupported regime: n = {n} points in dimension d = {d} (need n >= d + 1)")]
    UnsupportedRegime { n: usize, d: usize },

    #[error("unsupported dimension d = {d}: {reason}")]
    UnsupportedDimension { d: usize, reason: &'static str },

    /// The spanning-tree growth stalled: no admissible edge leaves the current tree.
    #[error("no valid extension of the spanning tree from {reached} of {n} vertices (stalled at vertex {vertex})")]
    NoValidExtension {
        reached: usize,
        n: usize,
        vertex: usize,
    },

    #[error("triple-set construction failed at vertex {vertex}: all incident edges collinear")]
    Construction { vertex: usize },

    #[error("Gram matrix has numerical rank {rank}, not realizable in dimension {d}")]
    NotRealizable { rank: usize, d: usize },

    /// The integrator produced a non-finite state. Carries everything recorded so far.
    #[error("integration diverged at t = {time}")]
    Divergence {
        time: f64,
        trace: Box<SimulationTrace>,
    },

    #[error("fit error: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
