//! Structure constants, adjoint action and comparison with transcribed tables.

mod optimal;
mod tables;

pub use optimal::{
    builtin_optimal_system, optimal_system_screen, Finding, FindingKind, OptimalSystemFixture,
    Representative, ScreenGrid, ScreenReport,
};
pub use tables::{
    builtin_fixture, load_fixture, CellReport, TableFixture, TableKind, TableReport, TableSummary,
    FIXTURE_NAMES,
};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::expr::{Bindings, Expr, ExprError, Symbol};
use crate::lie::VectorField;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("[{0}, {1}] is not in the span of the generators: {2}")]
    ClosureFailure(String, String, String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("fixture {name}: {msg}")]
    Fixture { name: String, msg: String },
    #[error("fixture {0} not found")]
    MissingFixture(String),
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
}

/// A finite-dimensional Lie algebra given by structure constants
/// `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub basis: Vec<String>,
    pub c: Vec<Vec<Vec<Expr>>>,
    pub name: Option<String>,
}

fn is_base_variable(s: &Symbol) -> bool {
    matches!(s, Symbol::Coord(_) | Symbol::Jet(_))
}

/// Exact coefficients `a` with `Σ a_k gens[k] = target`, the `a_k` free of the
/// base variables `(t, x, y, h, u, v)`.
pub fn decompose(gens: &[VectorField], target: &VectorField) -> Option<Vec<Expr>> {
    let n = gens.len();
    // one linear equation per (component, base monomial)
    let mut rows: Vec<(Vec<Expr>, Expr)> = Vec::new();
    for comp in 0..6 {
        let split: Vec<_> = gens
            .iter()
            .map(|g| g.components()[comp].collect_by(is_base_variable))
            .collect();
        let rhs = target.components()[comp].collect_by(is_base_variable);
        let mut keys: Vec<&Expr> = split
            .iter()
            .flat_map(|m| m.keys())
            .chain(rhs.keys())
            .collect();
        keys.sort();
        keys.dedup();
        for key in keys {
            let row = split
                .iter()
                .map(|m| m.get(key).cloned().unwrap_or_default())
                .collect();
            rows.push((row, rhs.get(key).cloned().unwrap_or_default()));
        }
    }
    let sol = solve_linear(rows.clone(), n)?;
    // verify, also covering inconsistent rows dropped by elimination
    let back = gens
        .iter()
        .zip(&sol)
        .fold(VectorField::zero(), |acc, (g, a)| acc.add(&g.scale(a)));
    let diff = back.add(&target.scale(&Expr::int(-1)));
    diff.is_zero().then_some(sol)
}

/// Gaussian elimination over expressions; `None` if the system is inconsistent.
/// Free unknowns are set to zero.
fn solve_linear(mut rows: Vec<(Vec<Expr>, Expr)>, n: usize) -> Option<Vec<Expr>> {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        // prefer rational pivots, then the fewest terms
        let best = (r..rows.len())
            .filter(|&i| !rows[i].0[col].is_zero())
            .min_by_key(|&i| {
                (
                    rows[i].0[col].as_rational().is_none(),
                    rows[i].0[col].num_terms(),
                )
            })?;
        rows.swap(r, best);
        let inv = rows[r].0[col].recip().ok()?;
        let (prow, prhs) = rows[r].clone();
        let prow: Vec<Expr> = prow.iter().map(|e| e * &inv).collect();
        let prhs = &prhs * &inv;
        for i in 0..rows.len() {
            if i == r || rows[i].0[col].is_zero() {
                continue;
            }
            let f = rows[i].0[col].clone();
            for k in 0..n {
                if !prow[k].is_zero() {
                    rows[i].0[k] = &rows[i].0[k] - &(&f * &prow[k]);
                }
            }
            rows[i].1 = &rows[i].1 - &(&f * &prhs);
        }
        rows[r] = (prow, prhs);
        pivots.push((r, col));
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if rows[r..].iter().any(|(_, b)| !b.is_zero()) {
        return None;
    }
    let mut sol = vec![Expr::zero(); n];
    for (row, col) in pivots {
        sol[col] = rows[row].1.clone();
    }
    Some(sol)
}

impl LieAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == label)
    }

    /// `[x, y]` for coefficient vectors.
    pub fn bracket(&self, x: &[Expr], y: &[Expr]) -> Vec<Expr> {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let mut parts = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if !x[i].is_zero() && !y[j].is_zero() && !self.c[i][j][k].is_zero() {
                            parts.push(&x[i] * &y[j] * &self.c[i][j][k]);
                        }
                    }
                }
                Expr::sum(parts)
            })
            .collect()
    }

    /// Pairs `(i, j)` with `c[i][j] != -c[j][i]`.
    pub fn antisymmetry_defects(&self) -> Vec<(usize, usize)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                if (0..n).any(|k| !(&self.c[i][j][k] + &self.c[j][i][k]).is_zero()) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Triples violating the Jacobi identity, with the offending component.
    pub fn jacobi_defects(&self) -> Vec<(usize, usize, usize, usize)> {
        let n = self.dim();
        let c = &self.c;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in 0..n {
                        let s = Expr::sum((0..n).flat_map(|m| {
                            [
                                &c[i][j][m] * &c[m][k][l],
                                &c[j][k][m] * &c[m][i][l],
                                &c[k][i][m] * &c[m][j][l],
                            ]
                        }));
                        if !s.is_zero() {
                            out.push((i, j, k, l));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().flatten().flatten().all(Expr::is_zero)
    }

    /// Structure constants evaluated under `params`.
    pub fn numeric_constants(&self, params: &Bindings) -> Result<Vec<Vec<Vec<f64>>>, ExprError> {
        self.c
            .iter()
            .map(|row| {
                row.iter()
                    .map(|col| col.iter().map(|e| e.eval(params)).collect())
                    .collect()
            })
            .collect()
    }

    /// `(ad_{e_i})_{kj} = c[i][j][k]`.
    pub fn ad_matrix(&self, i: usize, params: &Bindings) -> Result<DMatrix<f64>, ExprError> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                m[(k, j)] = self.c[i][j][k].eval(params)?;
            }
        }
        Ok(m)
    }

    /// Matrix of `Ad(exp(eps e_i))`; column `j` holds the image of `e_j`.
    ///
    /// Follows the tabulated convention `Ad(exp(eps X)) Y = Y - eps [X, Y] + ...`,
    /// i.e. `exp(-eps ad_X)`, evaluated by scaling and squaring.
    pub fn adjoint_numeric(
        &self,
        i: usize,
        eps: f64,
        params: &Bindings,
    ) -> Result<DMatrix<f64>, ExprError> {
        Ok((self.ad_matrix(i, params)? * -eps).exp())
    }

    /// `max |Ad[x, y] - [Ad x, Ad y]|` over all basis pairs.
    pub fn automorphism_defect(
        &self,
        ad: &DMatrix<f64>,
        params: &Bindings,
    ) -> Result<f64, ExprError> {
        let c = self.numeric_constants(params)?;
        let n = self.dim();
        let bracket = |x: &[f64], y: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|k| {
                    let mut s = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            s += x[i] * y[j] * c[i][j][k];
                        }
                    }
                    s
                })
                .collect()
        };
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let xa: Vec<f64> = ad.column(a).iter().copied().collect();
                let xb: Vec<f64> = ad.column(b).iter().copied().collect();
                let rhs = bracket(&xa, &xb);
                let lhs = ad * nalgebra::DVector::from_vec(c[a][b].clone());
                for k in 0..n {
                    worst = worst.max((lhs[k] - rhs[k]).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// Structure constants of the span of `gens`, labelled by the generators' labels.
pub fn structure_constants(gens: &[VectorField]) -> Result<LieAlgebra, AlgebraError> {
    let n = gens.len();
    let labels: Vec<String> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| g.label.clone().unwrap_or_else(|| format!("e{}", i + 1)))
        .collect();
    let mut c = vec![vec![vec![Expr::zero(); n]; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let br = gens[i].commutator(&gens[j]);
            if br.is_zero() {
                continue;
            }
            let coeffs = decompose(gens, &br).ok_or_else(|| {
                AlgebraError::ClosureFailure(labels[i].clone(), labels[j].clone(), br.to_string())
            })?;
            for (k, a) in coeffs.into_iter().enumerate() {
                c[j][i][k] = -&a;
                c[i][j][k] = a;
            }
        }
    }
    Ok(LieAlgebra {
        basis: labels,
        c,
        name: None,
    })
}
