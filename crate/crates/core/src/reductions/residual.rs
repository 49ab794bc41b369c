//! Finite-difference residual of reconstructed fields in the full PDE system.

use serde::Serialize;

use super::{ClosedFormSolution, CompiledOde, ReductionError, Result, SimilarityAnsatz};
use crate::expr::Bindings;
use crate::ode::{OdeSystem, State, Trajectory};
use crate::report::{f17, f17_vec};
use crate::swe::PdeSystem;

/// Reduced states as a function of the reduced variable.
pub enum Solution<'a> {
    Closed {
        solution: &'a ClosedFormSolution,
        values: &'a Bindings,
    },
    Trajectory(&'a Trajectory),
    Constant(State),
}

impl Solution<'_> {
    fn at(&self, s: f64) -> Result<State> {
        match self {
            Solution::Closed { solution, values } => solution.eval(s, values),
            Solution::Trajectory(tr) => tr.interpolate(s).ok_or_else(|| {
                let (lo, hi) = tr.range();
                ReductionError::Range {
                    var: "reduced variable".into(),
                    value: s,
                    lo,
                    hi,
                }
            }),
            Solution::Constant(y) => Ok(*y),
        }
    }
}

/// A probe point `(t, x, y)`.
pub type Probe = [f64; 3];

#[derive(Clone, Debug, Serialize)]
pub struct Excluded {
    #[serde(serialize_with = "f17_vec")]
    pub point: Vec<f64>,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    #[serde(serialize_with = "f17")]
    pub delta: f64,
    #[serde(serialize_with = "f17")]
    pub max: f64,
    #[serde(serialize_with = "f17")]
    pub rms: f64,
    pub probes: usize,
    pub excluded: Vec<Excluded>,
}

/// Probes closer than this to a singular locus are skipped.
pub const LOCUS_EXCLUSION: f64 = 1e-6;

/// Rebuild `(h, u, v)` from `solution` through `ansatz` and evaluate the
/// equations of `sys` with second-order central differences of spacing `delta`.
pub fn reconstruct_residual(
    ansatz: &SimilarityAnsatz,
    solution: &Solution,
    sys: &PdeSystem,
    params: &Bindings,
    loci: Option<&CompiledOde>,
    delta: f64,
    probes: &[Probe],
) -> Result<ResidualReport> {
    let eqs = sys.compile_equations(params)?;
    let fields = |z: [f64; 3]| -> Result<State> {
        let s = ansatz.variable_at(z, params)?;
        ansatz.fields_at(z, solution.at(s)?, params)
    };
    let mut excluded = Vec::new();
    let mut values = Vec::new();
    for &z in probes {
        if let Some(ode) = loci {
            let s = ansatz.variable_at(z, params)?;
            let y = solution.at(s)?;
            let near = ode
                .loci()
                .into_iter()
                .enumerate()
                .find(|(k, _)| ode.locus(*k, s, &y).abs() < LOCUS_EXCLUSION);
            if let Some((_, name)) = near {
                excluded.push(Excluded {
                    point: z.to_vec(),
                    note: format!("within {LOCUS_EXCLUSION:e} of locus {name}"),
                });
                continue;
            }
        }
        let centre = fields(z)?;
        let mut jets = [0.0; 12];
        jets[..3].copy_from_slice(&centre);
        for c in 0..3 {
            let mut zp = z;
            let mut zm = z;
            zp[c] += delta;
            zm[c] -= delta;
            let (fp, fm) = (fields(zp)?, fields(zm)?);
            for f in 0..3 {
                jets[3 + 3 * f + c] = (fp[f] - fm[f]) / (2.0 * delta);
            }
        }
        for e in &eqs {
            values.push(e.eval(&jets));
        }
    }
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rms = if values.is_empty() {
        0.0
    } else {
        (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
    };
    Ok(ResidualReport {
        delta,
        max,
        rms,
        probes: probes.len() - excluded.len(),
        excluded,
    })
}
