//! Point-symmetry generators, their first prolongation, and the symmetry test.

mod catalog;
mod correct;

pub use catalog::{catalog, catalog_entry, Catalog, CatalogEntry};
pub use correct::{search_corrections, Correction, CorrectionSearch, Edit, EditKind, Slot};

use std::fmt;

use serde::Serialize;

use crate::expr::{Coord, Expr, ExprError, Field, Symbol};
use crate::swe::PdeSystem;

/// `X = xi^i d_i + eta^A d_A` over `(t, x, y; h, u, v)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    pub label: Option<String>,
    /// Components along `t, x, y`.
    pub xi: [Expr; 3],
    /// Components along `h, u, v`.
    pub eta: [Expr; 3],
}

fn base_symbols() -> [Symbol; 6] {
    [
        Symbol::Coord(Coord::T),
        Symbol::Coord(Coord::X),
        Symbol::Coord(Coord::Y),
        Symbol::jet(Field::H, &[]),
        Symbol::jet(Field::U, &[]),
        Symbol::jet(Field::V, &[]),
    ]
}

impl VectorField {
    pub fn zero() -> VectorField {
        VectorField::new(
            [Expr::zero(), Expr::zero(), Expr::zero()],
            [Expr::zero(), Expr::zero(), Expr::zero()],
        )
    }

    pub fn new(xi: [Expr; 3], eta: [Expr; 3]) -> VectorField {
        VectorField {
            label: None,
            xi,
            eta,
        }
    }

    pub fn labelled(mut self, label: impl Into<String>) -> VectorField {
        self.label = Some(label.into());
        self
    }

    /// Parse six component texts in the order `t, x, y, h, u, v`.
    pub fn parse(components: [&str; 6]) -> Result<VectorField, ExprError> {
        let c = components.map(Expr::parse);
        let [a, b, cc, d, e, f] = c;
        let v = VectorField::new([a?, b?, cc?], [d?, e?, f?]);
        v.check_order()?;
        Ok(v)
    }

    fn check_order(&self) -> Result<(), ExprError> {
        for e in self.components() {
            if let Some(s) = e
                .free_symbols()
                .into_iter()
                .find(|s| matches!(s, Symbol::Jet(j) if j.order() > 0))
            {
                return Err(ExprError::UnsupportedForm(format!(
                    "generator component depends on jet `{s}`"
                )));
            }
        }
        Ok(())
    }

    /// The six components in the order `t, x, y, h, u, v`.
    pub fn components(&self) -> [&Expr; 6] {
        [
            &self.xi[0],
            &self.xi[1],
            &self.xi[2],
            &self.eta[0],
            &self.eta[1],
            &self.eta[2],
        ]
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> VectorField {
        VectorField {
            label: None,
            xi: self.xi.clone().map(|e| f(&e)),
            eta: self.eta.clone().map(|e| f(&e)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField::new(
            [0, 1, 2].map(|i| &self.xi[i] + &other.xi[i]),
            [0, 1, 2].map(|i| &self.eta[i] + &other.eta[i]),
        )
    }

    pub fn scale(&self, k: &Expr) -> VectorField {
        self.map(|e| e * k)
    }

    /// Action on a function of the base variables.
    pub fn apply(&self, f: &Expr) -> Expr {
        let syms = base_symbols();
        Expr::sum(
            self.components()
                .iter()
                .zip(syms.iter())
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, s)| *c * &f.diff(s)),
        )
    }

    /// First-prolongation coefficients `eta^A_i = D_i eta^A - u^A_j D_i xi^j`,
    /// indexed `[A][i]` with `A` over `(h, u, v)` and `i` over `(t, x, y)`.
    pub fn prolong1(&self) -> [[Expr; 3]; 3] {
        let dxi: [[Expr; 3]; 3] = [0, 1, 2].map(|j| Coord::TXY.map(|c| total(&self.xi[j], c)));
        [0, 1, 2].map(|a| {
            let field = Field::HUV[a];
            [0, 1, 2].map(|i| {
                let c = Coord::TXY[i];
                let mut parts = vec![total(&self.eta[a], c)];
                for (jdx, cj) in Coord::TXY.iter().enumerate() {
                    if !dxi[jdx][i].is_zero() {
                        parts.push(-(Expr::jet(field, &[*cj]) * &dxi[jdx][i]));
                    }
                }
                Expr::sum(parts)
            })
        })
    }

    /// `X^[1](H^A)` restricted to solutions of `sys`, one entry per equation.
    pub fn symmetry_residuals(&self, sys: &PdeSystem) -> [Expr; 3] {
        let pro = self.prolong1();
        let on_shell = sys.solved_bindings();
        sys.equations().map(|eq| {
            let mut parts = vec![self.apply(&eq)];
            for (a, field) in Field::HUV.iter().enumerate() {
                for (i, c) in Coord::TXY.iter().enumerate() {
                    if pro[a][i].is_zero() {
                        continue;
                    }
                    let d = eq.diff(&Symbol::jet(*field, &[*c]));
                    if !d.is_zero() {
                        parts.push(&pro[a][i] * &d);
                    }
                }
            }
            Expr::sum(parts)
                .substitute(&on_shell)
                .expect("solved forms contain no time derivatives")
        })
    }

    pub fn is_symmetry(&self, sys: &PdeSystem) -> SymmetryReport {
        let residuals = self.symmetry_residuals(sys);
        SymmetryReport {
            label: self.label.clone().unwrap_or_default(),
            system: sys.kind.name().to_string(),
            verified: residuals.iter().all(Expr::is_zero),
            residuals,
        }
    }

    /// Lie bracket `[self, other]`, componentwise `self(other^k) - other(self^k)`.
    pub fn commutator(&self, other: &VectorField) -> VectorField {
        let a = self.components();
        let b = other.components();
        let c: Vec<Expr> = (0..6)
            .map(|k| self.apply(b[k]) - other.apply(a[k]))
            .collect();
        VectorField::new(
            [c[0].clone(), c[1].clone(), c[2].clone()],
            [c[3].clone(), c[4].clone(), c[5].clone()],
        )
    }
}

fn total(e: &Expr, c: Coord) -> Expr {
    e.total_derivative(c, 1)
        .expect("generator components have jet order zero")
}

pub fn vf_commutator(v: &VectorField, w: &VectorField) -> VectorField {
    v.commutator(w)
}

const PARTIALS: [&str; 6] = ["d_t", "d_x", "d_y", "d_h", "d_u", "d_v"];

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, p) in self.components().iter().zip(PARTIALS) {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if c.is_one() {
                f.write_str(p)?;
            } else if c.num_terms() == 1 {
                write!(f, "{c}*{p}")?;
            } else {
                write!(f, "({c})*{p}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.label {
            write!(f, "{l} = ")?;
        }
        write!(f, "{self}")
    }
}

impl Serialize for VectorField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(6))?;
        for (c, p) in self.components().iter().zip(["t", "x", "y", "h", "u", "v"]) {
            m.serialize_entry(p, &c.to_string())?;
        }
        m.end()
    }
}

/// Outcome of a symmetry check.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub label: String,
    pub system: String,
    pub verified: bool,
    pub residuals: [Expr; 3],
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ex;

    fn vf(c: [&str; 6]) -> VectorField {
        VectorField::parse(c).unwrap()
    }

    #[test]
    fn translations_prolong_to_zero() {
        let x1 = vf(["1", "0", "0", "0", "0", "0"]);
        assert!(x1.prolong1().iter().flatten().all(Expr::is_zero));
    }

    #[test]
    fn galilean_prolongation() {
        let y5 = vf(["0", "0", "t", "0", "0", "1"]);
        let p = y5.prolong1();
        assert_eq!(p[2][0], ex!("-v_y"));
        assert_eq!(p[1][0], ex!("-u_y"));
        assert_eq!(p[0][0], ex!("-h_y"));
        let others = [
            p[0][1].clone(),
            p[0][2].clone(),
            p[1][1].clone(),
            p[1][2].clone(),
            p[2][1].clone(),
            p[2][2].clone(),
        ];
        assert!(others.iter().all(Expr::is_zero));
    }

    #[test]
    fn rotating_translation_prolongation() {
        let z6 = vf([
            "0",
            "sin(2*Omega*t)",
            "cos(2*Omega*t)",
            "0",
            "2*Omega*cos(2*Omega*t)",
            "-2*Omega*sin(2*Omega*t)",
        ]);
        let p = z6.prolong1();
        assert_eq!(
            p[1][0],
            ex!("-4*Omega^2*sin(2*Omega*t) - 2*Omega*cos(2*Omega*t)*u_x + 2*Omega*sin(2*Omega*t)*u_y")
        );
    }

    #[test]
    fn zero_field_is_a_symmetry() {
        assert!(
            VectorField::zero()
                .is_symmetry(&PdeSystem::general())
                .verified
        );
    }

    #[test]
    fn brackets() {
        let y1 = vf(["1", "0", "0", "0", "0", "0"]);
        let y4 = vf(["t", "x", "y", "0", "0", "0"]);
        let y5 = vf(["0", "0", "t", "0", "0", "1"]);
        assert_eq!(y1.commutator(&y4), y1);
        assert_eq!(y1.commutator(&y5), vf(["0", "0", "1", "0", "0", "0"]));
        assert!(y1.commutator(&vf(["0", "1", "0", "0", "0", "0"])).is_zero());
    }

    #[test]
    fn display() {
        let y5 = vf(["0", "0", "t", "0", "0", "1"]);
        assert_eq!(y5.to_string(), "t*d_y + d_v");
        assert!(VectorField::parse(["u_x", "0", "0", "0", "0", "0"]).is_err());
    }
}
