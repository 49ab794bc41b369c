//! The rotating shallow-water systems in solved evolution form.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::expr::{names, Bindings, CompiledExpr, Coord, Expr, ExprError, Field, Symbol};

/// Latitude regime of a system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    General,
    Equator,
    Pole,
}

impl SystemKind {
    pub const ALL: [SystemKind; 3] = [SystemKind::General, SystemKind::Equator, SystemKind::Pole];

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::General => "general",
            SystemKind::Equator => "equator",
            SystemKind::Pole => "pole",
        }
    }
}

impl std::str::FromStr for SystemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<SystemKind, String> {
        match s {
            "general" => Ok(SystemKind::General),
            "equator" => Ok(SystemKind::Equator),
            "pole" => Ok(SystemKind::Pole),
            other => Err(format!(
                "unknown system `{other}` (expected general, equator or pole)"
            )),
        }
    }
}

/// How the v-advection term of the u-momentum equation is read.
///
/// The printed equations carry `v*u_x`; the momentum balance and the pole
/// symmetries require `v*u_y`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AdvectionReading {
    #[default]
    Corrected,
    AsPrinted,
}

/// A first-order system `f_t = rhs_f` for `f` in `(h, u, v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PdeSystem {
    pub kind: SystemKind,
    pub reading: AdvectionReading,
    /// Right-hand sides for `h_t`, `u_t`, `v_t`, in that order.
    pub rhs: [Expr; 3],
    /// Parameter bindings already applied to the general system.
    pub params: BTreeMap<Symbol, Expr>,
}

fn d(e: &Expr, c: Coord) -> Expr {
    e.total_derivative(c, 1)
        .expect("base fields differentiate to first order")
}

fn j(f: Field, derivs: &[Coord]) -> Expr {
    Expr::jet(f, derivs)
}

impl PdeSystem {
    /// The general-latitude system with symbolic `Omega_y`, `Omega_z`, `g`.
    pub fn general() -> PdeSystem {
        PdeSystem::general_with(AdvectionReading::Corrected)
    }

    pub fn general_with(reading: AdvectionReading) -> PdeSystem {
        use Coord::{X, Y};
        let (h, u, v) = (j(Field::H, &[]), j(Field::U, &[]), j(Field::V, &[]));
        let oy = Expr::param(names::OMEGA_Y);
        let oz = Expr::param(names::OMEGA_Z);
        let g = Expr::param(names::GRAVITY);

        let hu = &h * &u;
        let hv = &h * &v;
        let div = d(&hu, X) + d(&hv, Y);
        let coriolis = Expr::int(2) * &oz - &oy * j(Field::H, &[Y]);
        let pressure = &g * &h - &h * &h * &oy * &u;
        let v_adv = match reading {
            AdvectionReading::Corrected => &v * j(Field::U, &[Y]),
            AdvectionReading::AsPrinted => &v * j(Field::U, &[X]),
        };

        let h_t = -div.clone();
        let u_t = -(&u * j(Field::U, &[X])) - v_adv + &coriolis * &v - d(&pressure, X) + &oy * &div;
        let v_t =
            -(&u * j(Field::V, &[X])) - &v * j(Field::V, &[Y]) - &coriolis * &u - d(&pressure, Y);
        PdeSystem {
            kind: SystemKind::General,
            reading,
            rhs: [h_t, u_t, v_t],
            params: BTreeMap::new(),
        }
    }

    /// Latitude zero: `Omega_y = Omega`, `Omega_z = 0`.
    pub fn equator() -> PdeSystem {
        PdeSystem::build(SystemKind::Equator, AdvectionReading::Corrected)
    }

    /// Latitude pi/2: `Omega_y = 0`, `Omega_z = Omega`.
    pub fn pole() -> PdeSystem {
        PdeSystem::build(SystemKind::Pole, AdvectionReading::Corrected)
    }

    pub fn build(kind: SystemKind, reading: AdvectionReading) -> PdeSystem {
        let general = PdeSystem::general_with(reading);
        match kind {
            SystemKind::General => general,
            SystemKind::Equator | SystemKind::Pole => {
                general.specialize(kind, &latitude_bindings(kind))
            }
        }
    }

    /// Substitute parameter values and relabel.
    pub fn specialize(&self, kind: SystemKind, bindings: &BTreeMap<Symbol, Expr>) -> PdeSystem {
        let rhs = self.rhs.clone().map(|e| {
            e.substitute(bindings)
                .expect("parameter bindings are acyclic")
        });
        let mut params = self.params.clone();
        for (k, v) in bindings {
            params.insert(k.clone(), v.clone());
        }
        PdeSystem {
            kind,
            reading: self.reading,
            rhs,
            params,
        }
    }

    /// Same system with numeric parameter values substituted exactly.
    pub fn with_numeric(&self, values: &[(&str, f64)]) -> Result<PdeSystem, ExprError> {
        let mut b = BTreeMap::new();
        for (name, x) in values {
            let e = Expr::from_f64(*x)
                .ok_or_else(|| ExprError::UnsupportedForm(format!("{name} = {x}")))?;
            b.insert(Symbol::param(name), e);
        }
        Ok(self.specialize(self.kind, &b))
    }

    /// `f_t` symbol for each dependent.
    pub fn time_derivatives() -> [Symbol; 3] {
        Field::HUV.map(|f| Symbol::jet(f, &[Coord::T]))
    }

    /// Bindings that restrict expressions to the solution manifold.
    pub fn solved_bindings(&self) -> BTreeMap<Symbol, Expr> {
        PdeSystem::time_derivatives()
            .into_iter()
            .zip(self.rhs.iter().cloned())
            .collect()
    }

    /// `H^A = f_t - rhs_f`, vanishing on solutions.
    pub fn equations(&self) -> [Expr; 3] {
        let ts = PdeSystem::time_derivatives();
        [0, 1, 2].map(|i| Expr::sym(ts[i].clone()) - &self.rhs[i])
    }

    /// Free parameters remaining in the right-hand sides.
    pub fn free_parameters(&self) -> Vec<Symbol> {
        let mut out = std::collections::BTreeSet::new();
        for e in &self.rhs {
            out.extend(
                e.free_symbols()
                    .into_iter()
                    .filter(|s| matches!(s, Symbol::Param(_))),
            );
        }
        out.into_iter().collect()
    }

    /// Equations compiled over the twelve first-order jet slots
    /// `[h, u, v, h_t, h_x, h_y, u_t, u_x, u_y, v_t, v_x, v_y]` with parameters
    /// fixed to `params`.
    pub fn compile_equations(&self, params: &Bindings) -> Result<[CompiledExpr; 3], ExprError> {
        let slots = jet_slots();
        let mut out = Vec::with_capacity(3);
        for eq in self.equations() {
            let mut b = BTreeMap::new();
            for p in eq
                .free_symbols()
                .into_iter()
                .filter(|s| s.is_constant_like())
            {
                let x = *params
                    .get(&p)
                    .ok_or_else(|| ExprError::Unbound(p.clone()))?;
                let e = Expr::from_f64(x)
                    .ok_or_else(|| ExprError::UnsupportedForm(format!("{p} = {x}")))?;
                b.insert(p, e);
            }
            out.push(eq.substitute(&b)?.compile(&slots)?);
        }
        Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
    }
}

/// Slot order used by [`PdeSystem::compile_equations`].
pub fn jet_slots() -> Vec<Symbol> {
    let mut s: Vec<Symbol> = Field::HUV.iter().map(|&f| Symbol::jet(f, &[])).collect();
    for f in Field::HUV {
        for c in Coord::TXY {
            s.push(Symbol::jet(f, &[c]));
        }
    }
    s
}

/// Parameter bindings for a latitude regime relative to the general system.
pub fn latitude_bindings(kind: SystemKind) -> BTreeMap<Symbol, Expr> {
    let omega = Expr::param(names::OMEGA);
    let mut b = BTreeMap::new();
    match kind {
        SystemKind::General => {}
        SystemKind::Equator => {
            b.insert(Symbol::param(names::OMEGA_Y), omega);
            b.insert(Symbol::param(names::OMEGA_Z), Expr::zero());
        }
        SystemKind::Pole => {
            b.insert(Symbol::param(names::OMEGA_Y), Expr::zero());
            b.insert(Symbol::param(names::OMEGA_Z), omega);
        }
    }
    b
}

impl fmt::Display for PdeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, r) in PdeSystem::time_derivatives().iter().zip(&self.rhs) {
            writeln!(f, "{t} = {r}")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
pub struct SystemListing {
    pub system: SystemKind,
    pub advection: AdvectionReading,
    pub equations: BTreeMap<String, String>,
    pub bindings: BTreeMap<String, String>,
}

impl PdeSystem {
    pub fn listing(&self) -> SystemListing {
        SystemListing {
            system: self.kind,
            advection: self.reading,
            equations: PdeSystem::time_derivatives()
                .iter()
                .zip(&self.rhs)
                .map(|(t, r)| (t.to_string(), r.to_string()))
                .collect(),
            bindings: self
                .params
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ex;

    fn at(pairs: &[(&str, f64)]) -> Bindings {
        let mut b: Bindings = jet_slots().into_iter().map(|s| (s, 0.0)).collect();
        for n in [names::OMEGA, names::OMEGA_Y, names::OMEGA_Z, names::GRAVITY] {
            b.insert(Symbol::param(n), 0.0);
        }
        for (k, x) in pairs {
            b.insert(Symbol::from_identifier(k), *x);
        }
        b
    }

    #[test]
    fn constant_state_coriolis() {
        let s = PdeSystem::general();
        let b = at(&[("h", 1.0), ("v", 1.0), ("Omega_z", 1.0)]);
        assert_eq!(s.rhs[1].eval(&b).unwrap(), 2.0);
        let p = PdeSystem::pole();
        let b = at(&[("u", 1.0), ("Omega", 1.0)]);
        assert_eq!(p.rhs[2].eval(&b).unwrap(), -2.0);
    }

    #[test]
    fn mass_equation_is_shared() {
        let g = PdeSystem::general();
        assert_eq!(g.rhs[0], PdeSystem::equator().rhs[0]);
        assert_eq!(g.rhs[0], PdeSystem::pole().rhs[0]);
    }

    #[test]
    fn pole_has_no_omega_y() {
        let p = PdeSystem::pole();
        assert!(!p.rhs[1].contains(&Symbol::param(names::OMEGA_Y)));
        assert_eq!(p.rhs[1], ex!("-u*u_x - v*u_y - g*h_x + 2*Omega*v"));
    }

    #[test]
    fn non_rotating_limit() {
        let mut b = BTreeMap::new();
        b.insert(Symbol::param(names::OMEGA_Y), Expr::zero());
        b.insert(Symbol::param(names::OMEGA_Z), Expr::zero());
        let s = PdeSystem::general().specialize(SystemKind::General, &b);
        assert_eq!(s.rhs[2], ex!("-u*v_x - v*v_y - g*h_y"));
    }

    #[test]
    fn numeric_parameters() {
        let s = PdeSystem::pole()
            .with_numeric(&[("Omega", 0.5), ("g", 10.0)])
            .unwrap();
        assert_eq!(s.rhs[1], ex!("-u*u_x - v*u_y - 10*h_x + v"));
        assert!(s.free_parameters().is_empty());
    }
    #[test]
    fn solved_form_is_sound() {
        for kind in SystemKind::ALL {
            let s = PdeSystem::build(kind, AdvectionReading::Corrected);
            let b = s.solved_bindings();
            for eq in s.equations() {
                assert!(eq.substitute(&b).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn equator_by_hand() {
        let e = PdeSystem::equator();
        let v_t = ex!("-u*v_x - v*v_y + Omega*u*h_y - g*h_y + 2*Omega*h*u*h_y + Omega*h^2*u_y");
        assert!((&e.rhs[2] - &v_t).is_zero(), "{}", e.rhs[2]);
        let direct = PdeSystem::general()
            .specialize(SystemKind::Equator, &latitude_bindings(SystemKind::Equator));
        assert_eq!(direct, e);
    }
}
