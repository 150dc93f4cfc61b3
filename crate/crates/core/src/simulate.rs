//! Fixed-step RK4 integration of `ṗ = u(p)` with per-sample diagnostics.

use serde::{Deserialize, Serialize};

use crate::control::{ControllerSpec, Law};
use crate::error::{Error, Result};
use crate::framework::Configuration;
use crate::io::fmt_num;
use crate::linalg;

/// Minimum inter-agent distance below which a sample counts as a collision.
pub const COLLISION_DISTANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub initial: Configuration,
    pub controller: ControllerSpec,
    pub h: f64,
    pub t_max: f64,
    /// Record one sample every this many steps (the final state is always recorded).
    pub record_every: usize,
    /// Stop as soon as `V < stop_cost`.
    pub stop_cost: f64,
}

impl SimulationConfig {
    /// `h = 0.01`, `t_max = 50`, a sample every 10 steps, `stop_cost = 1e-12`.
    pub fn new(initial: Configuration, controller: ControllerSpec) -> Self {
        SimulationConfig {
            initial,
            controller,
            h: 0.01,
            t_max: 50.0,
            record_every: 10,
            stop_cost: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Input(what.to_string()));
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad("step h must be positive");
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad("t_max must be positive");
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1");
        }
        if !(self.stop_cost >= 0.0) {
            return bad("stop_cost must be non-negative");
        }
        let tgt = self.controller.target();
        if self.initial.n() != tgt.n() || self.initial.d() != tgt.d() {
            return Err(Error::Input(format!(
                "initial state has {} points in R^{}, target has {} in R^{}",
                self.initial.n(),
                self.initial.d(),
                tgt.n(),
                tgt.d()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// `V` dropped below `stop_cost`.
    Converged,
    ReachedTMax,
    /// A non-finite state appeared.
    Diverged,
}

/// Every series has one entry per recorded sample.
#[derive(Clone, Debug, Serialize)]
pub struct SimulationTrace {
    pub d: usize,
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub residual_norms: Vec<f64>,
    pub residuals: Vec<Vec<f64>>,
    pub costs: Vec<f64>,
    /// Lengths of the target graph's edges, canonical order.
    pub edge_lengths: Vec<Vec<f64>>,
    pub centroids: Vec<Vec<f64>>,
    pub min_distances: Vec<f64>,
    pub ranks: Vec<usize>,
    pub termination: Termination,
}

impl SimulationTrace {
    fn empty(d: usize) -> Self {
        SimulationTrace {
            d,
            times: Vec::new(),
            positions: Vec::new(),
            residual_norms: Vec::new(),
            residuals: Vec::new(),
            costs: Vec::new(),
            edge_lengths: Vec::new(),
            centroids: Vec::new(),
            min_distances: Vec::new(),
            ranks: Vec::new(),
            termination: Termination::ReachedTMax,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_configuration(&self) -> Option<Configuration> {
        let p = self.positions.last()?;
        Configuration::from_flat(self.d, p.clone()).ok()
    }

    pub fn final_cost(&self) -> Option<f64> {
        self.costs.last().copied()
    }

    fn push(&mut self, t: f64, p: &Configuration, cfg: &SimulationConfig) -> Result<f64> {
        let tgt = cfg.controller.target();
        let delta = tgt.residual(p)?;
        let cost = 0.5 * delta.norm_squared();
        self.times.push(t);
        self.positions.push(p.as_slice().to_vec());
        self.residual_norms.push(delta.norm());
        self.residuals.push(delta.iter().copied().collect());
        self.costs.push(cost);
        self.edge_lengths.push(
            tgt.graph()
                .edges()
                .iter()
                .map(|&(a, b)| linalg::norm(&p.edge_vector(a, b)))
                .collect(),
        );
        self.centroids.push(p.centroid());
        self.min_distances.push(min_pairwise_distance(p));
        self.ranks.push(linalg::numerical_rank(&p.point_matrix()));
        Ok(cost)
    }

    /// One row per sample: `t, p1x, p1y, ..., V, delta_norm, minDist, centX, centY, rankP`.
    pub fn to_csv(&self) -> String {
        let n = self
            .positions
            .first()
            .map_or(0, |p| p.len() / self.d.max(1));
        let mut header = vec!["t".to_string()];
        for i in 1..=n {
            header.extend((0..self.d).map(|x| format!("p{i}{}", axis(x))));
        }
        header.extend(["V", "delta_norm", "minDist"].map(String::from));
        header.extend((0..self.d).map(|x| format!("cent{}", axis(x).to_uppercase())));
        header.push("rankP".into());
        let mut out = header.join(",");
        out.push('\n');
        for s in 0..self.len() {
            let mut row = vec![fmt_num(self.times[s])];
            row.extend(self.positions[s].iter().map(|&x| fmt_num(x)));
            row.push(fmt_num(self.costs[s]));
            row.push(fmt_num(self.residual_norms[s]));
            row.push(fmt_num(self.min_distances[s]));
            row.extend(self.centroids[s].iter().map(|&x| fmt_num(x)));
            row.push(self.ranks[s].to_string());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn axis(x: usize) -> String {
    match x {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        _ => format!("c{}", x + 1),
    }
}

pub fn min_pairwise_distance(p: &Configuration) -> f64 {
    let mut best = f64::INFINITY;
    for a in 1..=p.n() {
        for b in a + 1..=p.n() {
            best = best.min(linalg::norm(&p.edge_vector(a, b)));
        }
    }
    best
}

fn axpy(x: &[f64], k: &[f64], s: f64) -> Vec<f64> {
    x.iter().zip(k).map(|(a, b)| a + s * b).collect()
}

fn velocity(cfg: &SimulationConfig, d: usize, x: &[f64]) -> Result<Option<Vec<f64>>> {
    if x.iter().any(|v| !v.is_finite()) {
        return Ok(None);
    }
    let p = Configuration::from_flat(d, x.to_vec())?;
    let u = cfg.controller.velocity(&p)?;
    Ok(u.iter()
        .all(|v| v.is_finite())
        .then(|| u.as_slice().to_vec()))
}

fn rk4_step(cfg: &SimulationConfig, d: usize, x: &[f64], h: f64) -> Result<Option<Vec<f64>>> {
    let Some(k1) = velocity(cfg, d, x)? else {
        return Ok(None);
    };
    let Some(k2) = velocity(cfg, d, &axpy(x, &k1, h / 2.0))? else {
        return Ok(None);
    };
    let Some(k3) = velocity(cfg, d, &axpy(x, &k2, h / 2.0))? else {
        return Ok(None);
    };
    let Some(k4) = velocity(cfg, d, &axpy(x, &k3, h))? else {
        return Ok(None);
    };
    let next: Vec<f64> = (0..x.len())
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    Ok(next.iter().all(|v| v.is_finite()).then_some(next))
}

/// Classical RK4 with fixed step `h` (the last step is shortened to land on `t_max`).
/// Stops at `t_max` or as soon as `V < stop_cost`. A non-finite state aborts with
/// [`Error::Divergence`] carrying the samples recorded so far.
pub fn integrate(cfg: &SimulationConfig) -> Result<SimulationTrace> {
    cfg.validate()?;
    let d = cfg.initial.d();
    let mut trace = SimulationTrace::empty(d);
    let mut x = cfg.initial.as_slice().to_vec();
    let mut t = 0.0;
    if trace.push(t, &cfg.initial, cfg)? < cfg.stop_cost {
        trace.termination = Termination::Converged;
        return Ok(trace);
    }
    let steps = (cfg.t_max / cfg.h - 1e-9).ceil() as usize;
    for step in 1..=steps {
        let h = if step == steps { cfg.t_max - t } else { cfg.h };
        let Some(next) = rk4_step(cfg, d, &x, h)? else {
            trace.termination = Termination::Diverged;
            return Err(Error::Divergence {
                time: t + h,
                trace: Box::new(trace),
            });
        };
        x = next;
        t = if step == steps {
            cfg.t_max
        } else {
            step as f64 * cfg.h
        };
        let p = Configuration::from_flat(d, x.clone())?;
        let last = step == steps;
        let cost = cfg.controller.target().residual(&p)?.norm_squared() * 0.5;
        if cost < cfg.stop_cost || last || step % cfg.record_every == 0 {
            trace.push(t, &p, cfg)?;
        }
        if cost < cfg.stop_cost {
            trace.termination = Termination::Converged;
            return Ok(trace);
        }
    }
    trace.termination = Termination::ReachedTMax;
    Ok(trace)
}

/// Least-squares slope of `ln V` against time over the last `window` samples.
pub fn convergence_rate(trace: &SimulationTrace, window: usize) -> Result<f64> {
    if window < 2 || window > trace.len() {
        return Err(Error::Fit(format!(
            "window of {window} samples does not fit a trace of {}",
            trace.len()
        )));
    }
    let start = trace.len() - window;
    let ts = &trace.times[start..];
    let vs = &trace.costs[start..];
    if vs.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Fit("cost is not positive inside the window".into()));
    }
    let logs: Vec<f64> = vs.iter().map(|v| v.ln()).collect();
    let w = window as f64;
    let tm = ts.iter().sum::<f64>() / w;
    let lm = logs.iter().sum::<f64>() / w;
    let sxx: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
    let sxy: f64 = ts.iter().zip(&logs).map(|(t, l)| (t - tm) * (l - lm)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("window spans zero time".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    /// Max distance of the centroid from its initial value; gradient law only.
    pub centroid_drift: Option<f64>,
    pub initial_rank: usize,
    pub rank_constant: bool,
    pub min_distance: f64,
    pub collision: bool,
}

pub fn monitor_invariants(trace: &SimulationTrace, law: Law) -> InvariantReport {
    let initial_rank = trace.ranks.first().copied().unwrap_or(0);
    let drift = trace.centroids.first().map(|c0| {
        trace
            .centroids
            .iter()
            .map(|c| linalg::norm(&c.iter().zip(c0).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .fold(0.0, f64::max)
    });
    let min_distance = trace
        .min_distances
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    InvariantReport {
        centroid_drift: if law == Law::Gradient { drift } else { None },
        initial_rank,
        rank_constant: trace.ranks.iter().all(|&r| r == initial_rank),
        min_distance,
        collision: min_distance < COLLISION_DISTANCE,
    }
}

/// Centroid drift regardless of law, for checking that the non-gradient law moves it.
pub fn centroid_drift(trace: &SimulationTrace) -> f64 {
    monitor_invariants(trace, Law::Gradient)
        .centroid_drift
        .unwrap_or(0.0)
}
