//! Named reductions and the initial-condition fixtures used for plotted runs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    derive_equator_y2y5, derive_equator_y4y5, derive_travelling_wave, ReducedOde, ReductionError,
    Result, SimilarityAnsatz,
};
use crate::expr::{Bindings, Expr, Symbol};
use crate::ode::State;
use crate::swe::{PdeSystem, SystemKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    TravellingWave,
    EquatorY2y5,
    EquatorY4y5,
}

/// Wave speed of the travelling-wave ansatz `w = x + y - 2t`.
pub const WAVE_SPEED: i64 = 2;

impl ReductionKind {
    pub const ALL: [ReductionKind; 3] = [
        ReductionKind::TravellingWave,
        ReductionKind::EquatorY2y5,
        ReductionKind::EquatorY4y5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::TravellingWave => "travelling_wave",
            ReductionKind::EquatorY2y5 => "equator_y2y5",
            ReductionKind::EquatorY4y5 => "equator_y4y5",
        }
    }

    /// The system the ansatz is applied to.
    pub fn system(self) -> SystemKind {
        match self {
            ReductionKind::TravellingWave => SystemKind::General,
            _ => SystemKind::Equator,
        }
    }

    pub fn ansatz(self) -> SimilarityAnsatz {
        match self {
            ReductionKind::TravellingWave => {
                SimilarityAnsatz::travelling_wave(Expr::int(WAVE_SPEED))
            }
            ReductionKind::EquatorY2y5 => SimilarityAnsatz::equator_y2y5(),
            ReductionKind::EquatorY4y5 => SimilarityAnsatz::equator_y4y5(),
        }
    }

    pub fn derive(self, sys: &PdeSystem) -> Result<ReducedOde> {
        match self {
            ReductionKind::TravellingWave => derive_travelling_wave(sys, Expr::int(WAVE_SPEED)),
            ReductionKind::EquatorY2y5 => derive_equator_y2y5(sys),
            ReductionKind::EquatorY4y5 => derive_equator_y4y5(sys),
        }
    }

    /// A point `(t, x, y)` at which the reduced variable equals `s`.
    pub fn probe_at(self, s: f64) -> [f64; 3] {
        match self {
            ReductionKind::TravellingWave => {
                let (t, y) = (0.25, 0.5);
                [t, s - y + WAVE_SPEED as f64 * t, y]
            }
            ReductionKind::EquatorY2y5 => [s, 0.3, 0.5],
            ReductionKind::EquatorY4y5 => {
                let (t, y) = (1.5, 0.4);
                [t, s * t, y]
            }
        }
    }
}

impl std::str::FromStr for ReductionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<ReductionKind, String> {
        ReductionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown reduction `{s}` (expected travelling_wave, equator_y2y5 or equator_y4y5)"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub label: String,
    pub state: State,
}

/// Parameters, range and initial conditions of a plotted family of runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureSetup {
    pub name: String,
    pub reduction: ReductionKind,
    pub params: BTreeMap<String, f64>,
    pub range: [f64; 2],
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_conditions: Vec<InitialCondition>,
    #[serde(default)]
    pub authoritative: bool,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl FigureSetup {
    pub fn bindings(&self) -> Bindings {
        self.params
            .iter()
            .map(|(k, v)| (Symbol::param(k), *v))
            .collect()
    }
}

pub const FIGURE_NAMES: [&str; 2] = ["fig1", "fig2"];

fn parse_figure(name: &str, text: &str) -> Result<FigureSetup> {
    serde_json::from_str(text).map_err(|e| ReductionError::Fixture {
        name: name.into(),
        msg: e.to_string(),
    })
}

/// Figure setup from `<dir>/figures/<name>.json`, or the shipped copy when `dir` is `None`.
pub fn figure_setup(name: &str, dir: Option<&Path>) -> Result<FigureSetup> {
    if let Some(dir) = dir {
        let path = dir.join("figures").join(format!("{name}.json"));
        let text = std::fs::read_to_string(&path)
            .map_err(|_| ReductionError::MissingFixture(path.display().to_string()))?;
        return parse_figure(name, &text);
    }
    let text = match name {
        "fig1" => include_str!("../../fixtures/figures/fig1.json"),
        "fig2" => include_str!("../../fixtures/figures/fig2.json"),
        _ => return Err(ReductionError::MissingFixture(format!("figures/{name}"))),
    };
    parse_figure(name, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probes_hit_the_requested_variable() {
        let p = Bindings::new();
        for k in ReductionKind::ALL {
            for s in [0.5, 1.25, 3.0] {
                let z = k.probe_at(s);
                assert!((k.ansatz().variable_at(z, &p).unwrap() - s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shipped_figures_parse() {
        for name in FIGURE_NAMES {
            let f = figure_setup(name, None).unwrap();
            assert!(!f.authoritative);
            assert!(!f.initial_conditions.is_empty());
        }
    }
}
