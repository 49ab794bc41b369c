//! Similarity reductions of the shallow-water systems to ordinary differential
//! equations, closed-form solutions and a finite-difference residual harness.

mod compare;
mod figures;
mod residual;

pub use compare::{
    compare_equation, reference_equations, EquationComparison, ReferenceEquations, TermDiff,
    Verdict,
};
pub use figures::{
    figure_setup, FigureSetup, InitialCondition, ReductionKind, FIGURE_NAMES, WAVE_SPEED,
};
pub use residual::{reconstruct_residual, Excluded, Probe, ResidualReport, Solution};

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{names, Bindings, CompiledExpr, Coord, Expr, ExprError, Field, Symbol};
use crate::swe::PdeSystem;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("ansatz `{ansatz}` is inconsistent: equation {equation} keeps {detail}")]
    Inconsistent {
        ansatz: String,
        equation: usize,
        detail: String,
    },
    #[error("coefficient matrix of `{0}` is structurally singular")]
    Singular(String),
    #[error("{var} = {value} is outside the solution range [{lo}, {hi}]")]
    Range {
        var: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("fixture {name}: {msg}")]
    Fixture { name: String, msg: String },
    #[error("fixture {0} not found")]
    MissingFixture(String),
}

pub type Result<T, E = ReductionError> = std::result::Result<T, E>;

/// Fields `(h, u, v)` written through a similarity variable and the reduced
/// states `H, U, V`.
#[derive(Clone, Debug, Serialize)]
pub struct SimilarityAnsatz {
    pub name: String,
    /// Independent variable of the reduced system (`w` or `t`).
    pub indep: Coord,
    /// The similarity variable in `(t, x, y)`.
    pub variable: Expr,
    /// `h, u, v` in `(t, x, y)` and the states.
    pub fields: [Expr; 3],
    /// Coordinate eliminated in favour of the similarity variable, with its
    /// expression in the remaining coordinates.
    pub eliminate: Option<(Coord, Expr)>,
}

fn state(f: Field) -> Expr {
    Expr::jet(f, &[])
}

impl SimilarityAnsatz {
    /// `h = H(w), u = U(w), v = V(w)` with `w = x + y - c t`.
    pub fn travelling_wave(c: Expr) -> SimilarityAnsatz {
        let w = Expr::coord(Coord::X) + Expr::coord(Coord::Y) - &c * Expr::coord(Coord::T);
        let x = Expr::coord(Coord::W) - Expr::coord(Coord::Y) + &c * Expr::coord(Coord::T);
        SimilarityAnsatz {
            name: "travelling_wave".into(),
            indep: Coord::W,
            variable: w,
            fields: Field::STATES.map(state),
            eliminate: Some((Coord::X, x)),
        }
    }

    /// `h = H(t), u = U(t), v = y/t + V(t)`.
    pub fn equator_y2y5() -> SimilarityAnsatz {
        SimilarityAnsatz {
            name: "equator_y2y5".into(),
            indep: Coord::T,
            variable: Expr::coord(Coord::T),
            fields: [
                state(Field::BigH),
                state(Field::BigU),
                ex_y_over_t() + state(Field::BigV),
            ],
            eliminate: None,
        }
    }

    /// `h = H(w), u = U(w), v = y/t + V(w)` with `w = x/t`.
    pub fn equator_y4y5() -> SimilarityAnsatz {
        let t = Expr::coord(Coord::T);
        SimilarityAnsatz {
            name: "equator_y4y5".into(),
            indep: Coord::W,
            variable: Expr::coord(Coord::X) * t.recip().expect("t is a nonzero monomial"),
            fields: [
                state(Field::BigH),
                state(Field::BigU),
                ex_y_over_t() + state(Field::BigV),
            ],
            eliminate: Some((Coord::X, Expr::coord(Coord::W) * t)),
        }
    }

    /// The derivative symbol `S'` of a state along the reduced variable.
    fn prime(&self, f: Field) -> Expr {
        Expr::jet(f, &[self.indep])
    }

    /// `d F / d c` for `F` in `(t, x, y)` and the states.
    fn derivative(&self, f: &Expr, c: Coord) -> Expr {
        let dw = self.variable.diff(&Symbol::Coord(c));
        let mut out = f.diff(&Symbol::Coord(c));
        if !dw.is_zero() {
            for s in Field::STATES {
                let ds = f.diff(&Symbol::jet(s, &[]));
                if !ds.is_zero() {
                    out = out + ds * self.prime(s) * &dw;
                }
            }
        }
        out
    }

    /// Jet bindings `h, h_t, h_x, ...` implied by the ansatz.
    pub fn jet_bindings(&self) -> BTreeMap<Symbol, Expr> {
        let mut b = BTreeMap::new();
        for (pde, f) in Field::HUV.iter().zip(&self.fields) {
            b.insert(Symbol::jet(*pde, &[]), f.clone());
            for c in Coord::TXY {
                b.insert(Symbol::jet(*pde, &[c]), self.derivative(f, c));
            }
        }
        b
    }

    /// Substitute the ansatz into `sys` and strip the remaining coordinate
    /// dependence. Each returned equation involves only the reduced variable,
    /// the states and their first derivatives.
    pub fn reduce(&self, sys: &PdeSystem) -> Result<[Expr; 3]> {
        let jets = self.jet_bindings();
        let mut out = Vec::with_capacity(3);
        for (i, eq) in sys.equations().iter().enumerate() {
            let mut e = eq.substitute(&jets)?;
            if let Some((c, value)) = &self.eliminate {
                e = e.subs1(&Symbol::Coord(*c), value)?;
            }
            let indep = self.indep;
            let split = e.collect_by(|s| matches!(s, Symbol::Coord(c) if *c != indep));
            out.push(self.single_factor(i, split)?);
        }
        Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
    }

    /// The common reduced factor of `Σ basis_k · coeff_k`, which exists only if
    /// all coefficients are rational multiples of one another.
    fn single_factor(&self, equation: usize, split: BTreeMap<Expr, Expr>) -> Result<Expr> {
        let mut it = split.into_iter();
        let Some((_, first)) = it.next() else {
            return Ok(Expr::zero());
        };
        for (basis, coeff) in it {
            if coeff.rational_multiple_of(&first).is_none() {
                return Err(ReductionError::Inconsistent {
                    ansatz: self.name.clone(),
                    equation,
                    detail: format!("the independent term {basis}*({coeff})"),
                });
            }
        }
        Ok(first)
    }

    /// Reduced variable at a point.
    pub fn variable_at(&self, z: [f64; 3], params: &Bindings) -> Result<f64> {
        Ok(self.variable.eval(&point(z, params))?)
    }

    /// `(h, u, v)` at a point given the state values there.
    pub fn fields_at(&self, z: [f64; 3], states: [f64; 3], params: &Bindings) -> Result<[f64; 3]> {
        let mut b = point(z, params);
        for (f, x) in Field::STATES.iter().zip(states) {
            b.insert(Symbol::jet(*f, &[]), x);
        }
        let mut out = [0.0; 3];
        for (o, f) in out.iter_mut().zip(&self.fields) {
            *o = f.eval(&b)?;
        }
        Ok(out)
    }
}

fn ex_y_over_t() -> Expr {
    Expr::coord(Coord::Y)
        * Expr::coord(Coord::T)
            .recip()
            .expect("t is a nonzero monomial")
}

fn point(z: [f64; 3], params: &Bindings) -> Bindings {
    let mut b = params.clone();
    for (c, x) in Coord::TXY.iter().zip(z) {
        b.insert(Symbol::Coord(*c), x);
    }
    b
}

/// A named expression whose zero set invalidates the solved form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Locus {
    pub name: String,
    pub expr: Expr,
}

/// A first-order system `S' = rhs_S` for the states `H, U, V`.
#[derive(Clone, Debug, Serialize)]
pub struct ReducedOde {
    pub name: String,
    pub indep: Coord,
    /// Right-hand sides for `H', U', V'`.
    pub rhs: [Expr; 3],
    pub singular_locus: Vec<Locus>,
}

impl ReducedOde {
    /// `S' - rhs_S` for each state.
    pub fn equations(&self) -> [Expr; 3] {
        [0, 1, 2].map(|i| Expr::jet(Field::STATES[i], &[self.indep]) - &self.rhs[i])
    }

    /// Slot order of [`ReducedOde::compile`]: the independent variable then `H, U, V`.
    pub fn slots(&self) -> Vec<Symbol> {
        let mut s = vec![Symbol::Coord(self.indep)];
        s.extend(Field::STATES.iter().map(|f| Symbol::jet(*f, &[])));
        s
    }

    /// Bind parameters numerically and compile rhs and loci.
    pub fn compile(&self, params: &Bindings) -> Result<CompiledOde> {
        let slots = self.slots();
        let bind = |e: &Expr| -> Result<CompiledExpr> {
            let mut b = BTreeMap::new();
            for p in e
                .free_symbols()
                .into_iter()
                .filter(Symbol::is_constant_like)
            {
                let x = *params
                    .get(&p)
                    .ok_or_else(|| ExprError::Unbound(p.clone()))?;
                let v = Expr::from_f64(x)
                    .ok_or_else(|| ExprError::UnsupportedForm(format!("{p} = {x}")))?;
                b.insert(p, v);
            }
            let e = e.substitute(&b)?;
            if let Some(s) = e.free_symbols().into_iter().find(|s| !slots.contains(s)) {
                return Err(ExprError::Unbound(s).into());
            }
            Ok(e.compile(&slots)?)
        };
        Ok(CompiledOde {
            name: self.name.clone(),
            rhs: self.rhs.iter().map(bind).collect::<Result<Vec<_>>>()?,
            loci: self
                .singular_locus
                .iter()
                .map(|l| Ok((l.name.clone(), bind(&l.expr)?)))
                .collect::<Result<Vec<_>>>()?,
        })
    }
}

/// A reduced system with parameters fixed, ready for numerical integration.
#[derive(Clone, Debug)]
pub struct CompiledOde {
    pub name: String,
    rhs: Vec<CompiledExpr>,
    loci: Vec<(String, CompiledExpr)>,
}

impl crate::ode::OdeSystem for CompiledOde {
    fn rhs(&self, s: f64, y: &[f64; 3]) -> [f64; 3] {
        let a = [s, y[0], y[1], y[2]];
        [
            self.rhs[0].eval(&a),
            self.rhs[1].eval(&a),
            self.rhs[2].eval(&a),
        ]
    }

    fn loci(&self) -> Vec<String> {
        self.loci.iter().map(|(n, _)| n.clone()).collect()
    }

    fn locus(&self, k: usize, s: f64, y: &[f64; 3]) -> f64 {
        self.loci[k].1.eval(&[s, y[0], y[1], y[2]])
    }
}

/// Closed-form states in the independent variable and integration constants.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormSolution {
    pub indep: Coord,
    pub states: [Expr; 3],
}

impl ClosedFormSolution {
    /// `S'(s) - rhs(S(s))` for each state; zero for an exact solution.
    pub fn residuals(&self, ode: &ReducedOde) -> Result<[Expr; 3]> {
        let b: BTreeMap<Symbol, Expr> = Field::STATES
            .iter()
            .zip(&self.states)
            .map(|(f, e)| (Symbol::jet(*f, &[]), e.clone()))
            .collect();
        let s = Symbol::Coord(self.indep);
        let mut out = Vec::with_capacity(3);
        for (e, r) in self.states.iter().zip(&ode.rhs) {
            out.push(e.diff(&s) - r.substitute(&b)?);
        }
        Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
    }

    pub fn eval(&self, s: f64, values: &Bindings) -> Result<[f64; 3]> {
        let mut b = values.clone();
        b.insert(Symbol::Coord(self.indep), s);
        let mut out = [0.0; 3];
        for (o, e) in out.iter_mut().zip(&self.states) {
            *o = e.eval(&b)?;
        }
        Ok(out)
    }
}

fn det2(a: &[Vec<Expr>], r: [usize; 2], c: [usize; 2]) -> Expr {
    &a[r[0]][c[0]] * &a[r[1]][c[1]] - &a[r[0]][c[1]] * &a[r[1]][c[0]]
}

fn det(a: &[Vec<Expr>], rows: &[usize], cols: &[usize]) -> Expr {
    match rows.len() {
        0 => Expr::one(),
        1 => a[rows[0]][cols[0]].clone(),
        2 => det2(a, [rows[0], rows[1]], [cols[0], cols[1]]),
        _ => {
            let r0 = rows[0];
            let mut parts = Vec::new();
            for (k, &c) in cols.iter().enumerate() {
                if a[r0][c].is_zero() {
                    continue;
                }
                let minor_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let m = &a[r0][c] * det(a, &rows[1..], &minor_cols);
                parts.push(if k % 2 == 0 { m } else { -m });
            }
            Expr::sum(parts)
        }
    }
}

/// Connected blocks of the row/column incidence of `a`.
fn blocks(a: &[Vec<Expr>]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = a.len();
    let mut row_block = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if row_block[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let (mut rows, mut cols) = (vec![start], Vec::new());
        row_block[start] = id;
        let mut i = 0;
        while i < rows.len() {
            let r = rows[i];
            for c in 0..n {
                if !a[r][c].is_zero() && !cols.contains(&c) {
                    cols.push(c);
                    for r2 in 0..n {
                        if !a[r2][c].is_zero() && row_block[r2] == usize::MAX {
                            row_block[r2] = id;
                            rows.push(r2);
                        }
                    }
                }
            }
            i += 1;
        }
        rows.sort_unstable();
        cols.sort_unstable();
        out.push((rows, cols));
    }
    out
}

/// Solve `a · z = b` exactly by Cramer's rule on each connected block.
///
/// Returns the solution and one determinant per block. Factors of a block
/// determinant found among the matrix entries are reported as separate loci,
/// and cancelled from the solution when they divide every numerator.
fn solve_blocks(a: &[Vec<Expr>], b: &[Expr], name: &str) -> Result<(Vec<Expr>, Vec<Expr>)> {
    let n = a.len();
    let mut sol = vec![Expr::zero(); n];
    let mut loci = Vec::new();
    for (rows, cols) in blocks(a) {
        if rows.len() != cols.len() {
            return Err(ReductionError::Singular(name.to_string()));
        }
        let mut d = det(a, &rows, &cols);
        if d.is_zero() {
            return Err(ReductionError::Singular(name.to_string()));
        }
        let mut nums: Vec<Expr> = (0..cols.len())
            .map(|k| {
                let mut m = a.to_vec();
                for &r in &rows {
                    m[r][cols[k]] = b[r].clone();
                }
                det(&m, &rows, &cols)
            })
            .collect();
        let mut candidates: Vec<Expr> = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| a[r][c].clone()))
            .filter(|e| e.as_rational().is_none() && e.num_terms() > 1)
            .collect();
        candidates.sort();
        candidates.dedup();
        for f in &candidates {
            let Some(q) = d.divide_exact(f) else { continue };
            let reduced: Option<Vec<Expr>> = nums.iter().map(|nk| nk.divide_exact(f)).collect();
            if let Some(reduced) = reduced {
                loci.push(f.clone());
                d = q;
                nums = reduced;
            }
        }
        let inv = d.recip()?;
        for (k, &c) in cols.iter().enumerate() {
            sol[c] = &nums[k] * &inv;
        }
        // report the remaining determinant by its factors among the entries
        for f in &candidates {
            if let Some(q) = d.divide_exact(f).filter(|q| q.as_rational().is_none()) {
                loci.push(f.clone());
                d = q;
            }
        }
        if d.as_rational().is_none() {
            loci.push(d);
        }
    }
    Ok((sol, loci))
}

/// Substitute `ansatz` into `sys` and solve the reduced equations for the
/// state derivatives.
pub fn derive(ansatz: &SimilarityAnsatz, sys: &PdeSystem) -> Result<ReducedOde> {
    let reduced = ansatz.reduce(sys)?;
    let primes: Vec<Symbol> = Field::STATES
        .iter()
        .map(|f| Symbol::jet(*f, &[ansatz.indep]))
        .collect();
    let mut a = vec![vec![Expr::zero(); 3]; 3];
    let mut b = vec![Expr::zero(); 3];
    for (i, eq) in reduced.iter().enumerate() {
        for (k, p) in primes.iter().enumerate() {
            a[i][k] = eq.diff(p);
            if a[i][k].free_symbols().iter().any(|s| primes.contains(s)) {
                return Err(ReductionError::Inconsistent {
                    ansatz: ansatz.name.clone(),
                    equation: i,
                    detail: "a nonlinear derivative term".into(),
                });
            }
        }
        let rest = Expr::sum((0..3).map(|k| &a[i][k] * Expr::sym(primes[k].clone())));
        b[i] = -(eq - rest);
    }
    let (rhs, loci) = solve_blocks(&a, &b, &ansatz.name)?;
    let singular_locus = loci
        .into_iter()
        .enumerate()
        .map(|(k, expr)| Locus {
            name: format!("D{}", k + 1),
            expr,
        })
        .collect();
    Ok(ReducedOde {
        name: ansatz.name.clone(),
        indep: ansatz.indep,
        rhs: rhs.try_into().unwrap(),
        singular_locus,
    })
}

fn rename_loci(mut ode: ReducedOde, names: &[(&Expr, &str)]) -> ReducedOde {
    for l in &mut ode.singular_locus {
        for (e, n) in names {
            if l.expr.rational_multiple_of(e).is_some() {
                l.name = n.to_string();
            }
        }
    }
    ode
}

/// Travelling-wave reduction of the general system with speed `c`.
pub fn derive_travelling_wave(sys: &PdeSystem, c: Expr) -> Result<ReducedOde> {
    derive(&SimilarityAnsatz::travelling_wave(c), sys)
}

/// The reduced system as stated for the `{Y2, Y5}` invariants, with its closed-form solution.
pub fn equator_y2y5() -> (ReducedOde, ClosedFormSolution) {
    let t = Expr::coord(Coord::T);
    let inv_t = t.recip().expect("t is a nonzero monomial");
    let omega = Expr::param(names::OMEGA);
    let h = state(Field::BigH);
    let ode = ReducedOde {
        name: "equator_y2y5".into(),
        indep: Coord::T,
        rhs: [
            -(&h * &inv_t),
            &omega * &h * &inv_t,
            -(state(Field::BigV) * &inv_t),
        ],
        singular_locus: vec![Locus {
            name: "t".into(),
            expr: t,
        }],
    };
    let h0 = Expr::constant("H0");
    let sol = ClosedFormSolution {
        indep: Coord::T,
        states: [
            &h0 * &inv_t,
            Expr::constant("U0") - &h0 * &omega * &inv_t,
            Expr::constant("V0") * &inv_t,
        ],
    };
    (ode, sol)
}

pub fn derive_equator_y2y5(sys: &PdeSystem) -> Result<ReducedOde> {
    let ode = derive(&SimilarityAnsatz::equator_y2y5(), sys)?;
    Ok(rename_loci(ode, &[(&Expr::coord(Coord::T), "t")]))
}

pub fn derive_equator_y4y5(sys: &PdeSystem) -> Result<ReducedOde> {
    let ode = derive(&SimilarityAnsatz::equator_y4y5(), sys)?;
    let u_minus_w = state(Field::BigU) - Expr::coord(Coord::W);
    let mut ode = rename_loci(ode, &[(&u_minus_w, "U - w")]);
    for l in &mut ode.singular_locus {
        if l.name.starts_with('D') {
            l.name = "L".into();
        }
    }
    Ok(ode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ex;

    #[test]
    fn y2y5_derivation_matches_stated_system() {
        let derived = derive_equator_y2y5(&PdeSystem::equator()).unwrap();
        let (stated, _) = equator_y2y5();
        for k in 0..3 {
            assert!(
                (&derived.rhs[k] - &stated.rhs[k]).is_zero(),
                "{} vs {}",
                derived.rhs[k],
                stated.rhs[k]
            );
        }
    }

    #[test]
    fn closed_form_is_exact() {
        let (ode, sol) = equator_y2y5();
        assert!(sol.residuals(&ode).unwrap().iter().all(Expr::is_zero));
        let mut b = Bindings::new();
        for (n, x) in [("H0", 1.0), ("U0", 0.25), ("V0", 3.0)] {
            b.insert(Symbol::constant(n), x);
        }
        b.insert(Symbol::param(names::OMEGA), 1.0);
        let s = sol.eval(2.0, &b).unwrap();
        assert_eq!(s, [0.5, -0.25, 1.5]);
    }

    #[test]
    fn y4y5_v_equation_decouples() {
        let ode = derive_equator_y4y5(&PdeSystem::equator()).unwrap();
        assert_eq!(ode.rhs[2], ex!("V*(w - U)^(-1)"));
        let names: Vec<&str> = ode.singular_locus.iter().map(|l| l.name.as_str()).collect();
        assert!(
            names.contains(&"L") && names.contains(&"U - w"),
            "{names:?}"
        );
    }

    #[test]
    fn inconsistent_ansatz_is_rejected() {
        let mut a = SimilarityAnsatz::equator_y2y5();
        a.fields[1] = Expr::coord(Coord::X) * state(Field::BigU);
        a.fields[0] = Expr::coord(Coord::Y) * state(Field::BigH);
        assert!(matches!(
            a.reduce(&PdeSystem::equator()),
            Err(ReductionError::Inconsistent { .. })
        ));
    }
}
