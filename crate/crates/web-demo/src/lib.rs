//! Browser bindings: reduced-system integration, adjoint matrices and a
//! symmetry check for user-entered generators.

use std::cell::RefCell;
use std::collections::BTreeMap;

use serde::Serialize;
use swe_symmetry::algebra::{structure_constants, LieAlgebra};
use swe_symmetry::expr::{names, Bindings, Symbol};
use swe_symmetry::lie::{catalog, VectorField};
use swe_symmetry::ode::{integrate_adaptive, EventKind, Termination};
use swe_symmetry::reductions::{ReducedOde, ReductionKind};
use swe_symmetry::swe::{PdeSystem, SystemKind};
use wasm_bindgen::prelude::*;

thread_local! {
    static ODES: RefCell<BTreeMap<ReductionKind, ReducedOde>> = RefCell::new(BTreeMap::new());
    static ALGEBRAS: RefCell<BTreeMap<SystemKind, LieAlgebra>> = RefCell::new(BTreeMap::new());
}

fn reduced(kind: ReductionKind) -> Result<ReducedOde, String> {
    ODES.with(|m| {
        if let Some(o) = m.borrow().get(&kind) {
            return Ok(o.clone());
        }
        let ode = kind
            .derive(&PdeSystem::build(kind.system(), Default::default()))
            .map_err(|e| e.to_string())?;
        m.borrow_mut().insert(kind, ode.clone());
        Ok(ode)
    })
}

fn algebra(kind: SystemKind) -> Result<LieAlgebra, String> {
    ALGEBRAS.with(|m| {
        if let Some(a) = m.borrow().get(&kind) {
            return Ok(a.clone());
        }
        let a = structure_constants(&catalog(kind).fields()).map_err(|e| e.to_string())?;
        m.borrow_mut().insert(kind, a.clone());
        Ok(a)
    })
}

#[derive(Serialize)]
struct EventOut<'a> {
    locus: &'a str,
    approach: bool,
    at: f64,
    state: &'a [f64],
}

#[derive(Serialize)]
struct RunOut<'a> {
    indep: &'static str,
    loci: Vec<(String, String)>,
    samples: Vec<[f64; 4]>,
    termination: Termination,
    events: Vec<EventOut<'a>>,
}

/// Integrate `reduction` from `(h, u, v)` at the start of the range to `end`.
/// On the general system both Coriolis components are set to `omega`.
pub fn integrate_json(
    reduction: &str,
    state: [f64; 3],
    omega: f64,
    g: f64,
    start: f64,
    end: f64,
    tol: f64,
) -> Result<String, String> {
    let kind: ReductionKind = reduction.parse()?;
    let ode = reduced(kind)?;
    let mut p = Bindings::new();
    match kind.system() {
        SystemKind::General => {
            p.insert(Symbol::param(names::OMEGA_Y), omega);
            p.insert(Symbol::param(names::OMEGA_Z), omega);
        }
        _ => {
            p.insert(Symbol::param(names::OMEGA), omega);
        }
    }
    p.insert(Symbol::param(names::GRAVITY), g);
    let c = ode.compile(&p).map_err(|e| e.to_string())?;
    let tr =
        integrate_adaptive(&c, state, start, end, tol, tol * 1e-2).map_err(|e| e.to_string())?;
    let out = RunOut {
        indep: kind.ansatz().indep.name(),
        loci: ode
            .singular_locus
            .iter()
            .map(|l| (l.name.clone(), l.expr.to_string()))
            .collect(),
        samples: tr
            .samples
            .iter()
            .map(|s| [s.s, s.y[0], s.y[1], s.y[2]])
            .collect(),
        termination: tr.termination,
        events: tr
            .events
            .iter()
            .map(|e| EventOut {
                locus: &e.locus,
                approach: e.kind == EventKind::LocusApproach,
                at: e.at,
                state: &e.state,
            })
            .collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct AdjointOut {
    basis: Vec<String>,
    /// `images[j]` holds the coefficients of `Ad(exp(eps X)) e_j`.
    images: Vec<Vec<f64>>,
    automorphism_defect: f64,
}

/// Adjoint action of one basis generator of `system`.
pub fn adjoint_json(system: &str, generator: &str, eps: f64, omega: f64) -> Result<String, String> {
    let kind: SystemKind = system.parse()?;
    let alg = algebra(kind)?;
    let i = alg
        .index_of(generator)
        .ok_or_else(|| format!("no generator {generator} in the {system} basis"))?;
    let mut p = Bindings::new();
    p.insert(Symbol::param(names::OMEGA), omega);
    let m = alg.adjoint_numeric(i, eps, &p).map_err(|e| e.to_string())?;
    let out = AdjointOut {
        basis: alg.basis.clone(),
        images: (0..alg.dim())
            .map(|j| m.column(j).iter().copied().collect())
            .collect(),
        automorphism_defect: alg.automorphism_defect(&m, &p).map_err(|e| e.to_string())?,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// Symmetry check of a generator given by its six components `t, x, y, h, u, v`.
pub fn symmetry_json(system: &str, components: [&str; 6]) -> Result<String, String> {
    let kind: SystemKind = system.parse()?;
    let field = VectorField::parse(components).map_err(|e| e.to_string())?;
    let r = field.is_symmetry(&PdeSystem::build(kind, Default::default()));
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn integrate(
    reduction: &str,
    h: f64,
    u: f64,
    v: f64,
    omega: f64,
    g: f64,
    start: f64,
    end: f64,
) -> Result<String, JsError> {
    integrate_json(reduction, [h, u, v], omega, g, start, end, 1e-8).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn adjoint(system: &str, generator: &str, eps: f64, omega: f64) -> Result<String, JsError> {
    adjoint_json(system, generator, eps, omega).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn check_symmetry(
    system: &str,
    xi_t: &str,
    xi_x: &str,
    xi_y: &str,
    eta_h: &str,
    eta_u: &str,
    eta_v: &str,
) -> Result<String, JsError> {
    symmetry_json(system, [xi_t, xi_x, xi_y, eta_h, eta_u, eta_v]).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y4y5_run_reports_the_u_w_event() {
        let out: serde_json::Value = serde_json::from_str(
            &integrate_json("equator_y4y5", [0.5, 0.5, 1.0], 1.0, 10.0, 0.0, 5.0, 1e-8).unwrap(),
        )
        .unwrap();
        assert_eq!(out["termination"], "event");
        assert_eq!(out["events"][0]["locus"], "U - w");
    }

    #[test]
    fn adjoint_of_dilation_scales_translations() {
        let out: serde_json::Value =
            serde_json::from_str(&adjoint_json("equator", "Y4", 0.5, 1.0).unwrap()).unwrap();
        let a = out["images"][0][0].as_f64().unwrap();
        assert!((a - 0.5f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn galilean_boost_is_an_equator_symmetry() {
        let out: serde_json::Value = serde_json::from_str(
            &symmetry_json("equator", ["0", "0", "t", "0", "0", "1"]).unwrap(),
        )
        .unwrap();
        assert_eq!(out["verified"], true);
        assert!(symmetry_json("tropics", ["0"; 6]).is_err());
    }
}
