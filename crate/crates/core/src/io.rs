//! JSON file schemas for targets and simulation runs, and number formatting.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::{ControllerSpec, FormationTarget, GainMatrix, Law};
use crate::error::{Error, Result};
use crate::framework::{Configuration, Framework, TripleSet};
use crate::sampling;
use crate::simulate::SimulationConfig;
use crate::triple_select::full_triple_set;

/// Nine significant digits, printed without trailing zeros.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    let plain = rounded.to_string();
    if plain.len() > 20 {
        format!("{rounded:e}")
    } else {
        plain
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// A framework (the witness `p*`) plus an optional triple list. Missing
/// triples default to the full triple set of the graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetFile {
    #[serde(flatten)]
    pub framework: Framework,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triples: Option<Vec<[usize; 3]>>,
}

impl TargetFile {
    pub fn from_target(t: &FormationTarget) -> Self {
        TargetFile {
            framework: t.framework().clone(),
            triples: Some(t.triples().iter().map(|t| [t.apex, t.j, t.k]).collect()),
        }
    }

    pub fn triple_set(&self) -> Result<TripleSet> {
        match &self.triples {
            None => Ok(full_triple_set(self.framework.graph())),
            Some(list) => TripleSet::new(
                list.iter()
                    .map(|&[i, j, k]| crate::framework::Triple::new(i, j, k)),
            ),
        }
    }

    pub fn into_target(self) -> Result<FormationTarget> {
        let t = self.triple_set()?;
        FormationTarget::new(self.framework, t)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Perturbation {
    pub amplitude: f64,
    pub seed: u64,
}

/// Simulation input. `initial` wins over `perturbation`; with neither, the run
/// starts at the target configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimulationFile {
    pub target: TargetFile,
    pub law: Law,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<GainMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Configuration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default = "default_stop_cost")]
    pub stop_cost: f64,
}

fn default_h() -> f64 {
    0.01
}
fn default_t_max() -> f64 {
    50.0
}
fn default_record_every() -> usize {
    10
}
fn default_stop_cost() -> f64 {
    1e-12
}

impl SimulationFile {
    pub fn to_config(&self) -> Result<SimulationConfig> {
        let target = self.target.clone().into_target()?;
        let controller = match (self.law, &self.gain) {
            (Law::Gradient, _) => ControllerSpec::gradient(target.clone()),
            (Law::NonGradient, Some(k)) => ControllerSpec::nongradient(target.clone(), k.clone())?,
            (Law::NonGradient, None) => {
                return Err(Error::Input(
                    "field `gain` is required for the nongradient law".into(),
                ))
            }
        };
        let initial = match (&self.initial, &self.perturbation) {
            (Some(p), _) => p.clone(),
            (None, Some(pt)) => sampling::perturb(target.witness(), pt.amplitude, pt.seed),
            (None, None) => target.witness().clone(),
        };
        let cfg = SimulationConfig {
            initial,
            controller,
            h: self.h,
            t_max: self.t_max,
            record_every: self.record_every,
            stop_cost: self.stop_cost,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
