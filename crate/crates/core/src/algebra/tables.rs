//! Transcribed commutator and adjoint tables and their comparison with
//! computed values.
//!
//! A fixture lists cells as `{row, col, entry}` with `entry` in the expression
//! text format. Basis elements appear as symbols (`Y1`, `Z7`, ...), the group
//! parameter as `eps`. `aliases` maps labels printed in a table onto basis
//! labels (one table writes `X3` for `Y3`).

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AlgebraError, LieAlgebra};
use crate::expr::{names, Bindings, Expr, Symbol};
use crate::report::{f17, f17_vec};
use crate::swe::SystemKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Commutator,
    Adjoint,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureCell {
    pub row: String,
    pub col: String,
    pub entry: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableFixture {
    pub name: String,
    pub caption: String,
    pub kind: TableKind,
    pub system: SystemKind,
    #[serde(default)]
    pub aliases: BTreeMap<String, String>,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub cells: Vec<FixtureCell>,
    #[serde(default)]
    pub notes: Vec<String>,
}

pub const FIXTURE_NAMES: [&str; 7] = [
    "table1", "table2", "table3", "table4", "table5", "table6", "table6b",
];

/// Fixture shipped with the crate.
pub fn builtin_fixture(name: &str) -> Option<TableFixture> {
    let text = match name {
        "table1" => include_str!("../../fixtures/tables/table1.json"),
        "table2" => include_str!("../../fixtures/tables/table2.json"),
        "table3" => include_str!("../../fixtures/tables/table3.json"),
        "table4" => include_str!("../../fixtures/tables/table4.json"),
        "table5" => include_str!("../../fixtures/tables/table5.json"),
        "table6" => include_str!("../../fixtures/tables/table6.json"),
        "table6b" => include_str!("../../fixtures/tables/table6b.json"),
        _ => return None,
    };
    Some(serde_json::from_str(text).expect("shipped fixtures are valid"))
}

/// Read `<dir>/tables/<name>.json`.
pub fn load_fixture(dir: &Path, name: &str) -> Result<TableFixture, AlgebraError> {
    let path = dir.join("tables").join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path)
        .map_err(|_| AlgebraError::MissingFixture(path.display().to_string()))?;
    serde_json::from_str(&text).map_err(|e| AlgebraError::Fixture {
        name: name.to_string(),
        msg: e.to_string(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub row: String,
    pub col: String,
    pub computed: String,
    /// `None` when the transcribed entry could not be interpreted.
    pub reference: Option<String>,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<CellDetail>,
}

/// Worst sample of a numeric comparison.
#[derive(Clone, Debug, Serialize)]
pub struct CellDetail {
    #[serde(serialize_with = "f17")]
    pub eps: f64,
    #[serde(serialize_with = "f17")]
    pub omega: f64,
    #[serde(serialize_with = "f17_vec")]
    pub computed: Vec<f64>,
    #[serde(serialize_with = "f17_vec")]
    pub reference: Vec<f64>,
    #[serde(serialize_with = "f17")]
    pub max_abs_diff: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TableSummary {
    pub cells: usize,
    pub matches: usize,
    pub mismatches: usize,
    pub unparseable: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub table: String,
    pub kind: TableKind,
    pub system: SystemKind,
    pub basis: Vec<String>,
    pub summary: TableSummary,
    pub cells: Vec<CellReport>,
    pub notes: Vec<String>,
}

/// Interpret a cell as a linear combination of basis labels.
fn coefficients(
    entry: &str,
    alg: &LieAlgebra,
    aliases: &BTreeMap<String, String>,
) -> Option<Vec<Expr>> {
    let mut e = Expr::parse(entry).ok()?;
    let mut b = BTreeMap::new();
    for (from, to) in aliases {
        b.insert(Symbol::param(from), Expr::param(to));
    }
    if !b.is_empty() {
        e = e.substitute(&b).ok()?;
    }
    let labels: Vec<Symbol> = alg.basis.iter().map(|l| Symbol::param(l)).collect();
    let coeffs: Vec<Expr> = labels.iter().map(|l| e.diff(l)).collect();
    let rebuilt = Expr::sum(
        coeffs
            .iter()
            .zip(&labels)
            .map(|(c, l)| c * &Expr::sym(l.clone())),
    );
    let linear =
        (&e - &rebuilt).is_zero() && coeffs.iter().all(|c| labels.iter().all(|l| !c.contains(l)));
    linear.then_some(coeffs)
}

fn combination(alg: &LieAlgebra, coeffs: &[Expr]) -> Expr {
    Expr::sum(
        coeffs
            .iter()
            .zip(&alg.basis)
            .map(|(c, l)| c * &Expr::param(l)),
    )
}

impl TableReport {
    fn new(alg: &LieAlgebra, fx: &TableFixture, cells: Vec<CellReport>) -> TableReport {
        let mut summary = TableSummary {
            cells: cells.len(),
            ..Default::default()
        };
        for c in &cells {
            if c.reference.is_none() {
                summary.unparseable += 1;
            } else if c.matches {
                summary.matches += 1;
            } else {
                summary.mismatches += 1;
            }
        }
        TableReport {
            table: fx.name.clone(),
            kind: fx.kind,
            system: fx.system,
            basis: alg.basis.clone(),
            summary,
            cells,
            notes: fx.notes.clone(),
        }
    }

    pub fn all_match(&self) -> bool {
        self.summary.matches == self.summary.cells
    }

    /// Cell-by-cell symbolic comparison of a commutator table.
    pub fn commutators(alg: &LieAlgebra, fx: &TableFixture) -> Result<TableReport, AlgebraError> {
        let mut cells = Vec::new();
        for cell in &fx.cells {
            let i = alg
                .index_of(&cell.row)
                .ok_or_else(|| AlgebraError::UnknownLabel(cell.row.clone()))?;
            let j = alg
                .index_of(&cell.col)
                .ok_or_else(|| AlgebraError::UnknownLabel(cell.col.clone()))?;
            let computed = combination(alg, &alg.c[i][j]);
            let reference =
                coefficients(&cell.entry, alg, &fx.aliases).map(|c| combination(alg, &c));
            cells.push(CellReport {
                row: cell.row.clone(),
                col: cell.col.clone(),
                computed: computed.to_string(),
                matches: reference
                    .as_ref()
                    .is_some_and(|p| (p - &computed).is_zero()),
                reference: reference.map(|p| p.to_string()),
                detail: None,
            });
        }
        Ok(TableReport::new(alg, fx, cells))
    }

    /// Numeric comparison of an adjoint table: row `i`, column `j` holds
    /// `Ad(exp(eps e_i)) e_j`, checked against the computed matrix exponential at
    /// every `(eps, Omega)` sample.
    pub fn adjoint(
        alg: &LieAlgebra,
        fx: &TableFixture,
        samples: &[(f64, f64)],
        tol: f64,
    ) -> Result<TableReport, AlgebraError> {
        let eps_sym = Symbol::param(names::EPS);
        let omega_sym = Symbol::param(names::OMEGA);
        let mut mats = Vec::new();
        for &(eps, omega) in samples {
            let mut p = Bindings::new();
            p.insert(omega_sym.clone(), omega);
            let per_row: Vec<_> = (0..alg.dim())
                .map(|i| alg.adjoint_numeric(i, eps, &p))
                .collect::<Result<_, _>>()?;
            mats.push(per_row);
        }
        let mut cells = Vec::new();
        for cell in &fx.cells {
            let i = alg
                .index_of(&cell.row)
                .ok_or_else(|| AlgebraError::UnknownLabel(cell.row.clone()))?;
            let j = alg
                .index_of(&cell.col)
                .ok_or_else(|| AlgebraError::UnknownLabel(cell.col.clone()))?;
            let coeffs = coefficients(&cell.entry, alg, &fx.aliases);
            let mut worst: Option<CellDetail> = None;
            let mut evaluable = coeffs.is_some();
            if let Some(cs) = &coeffs {
                for (s, &(eps, omega)) in samples.iter().enumerate() {
                    let mut b = Bindings::new();
                    b.insert(eps_sym.clone(), eps);
                    b.insert(omega_sym.clone(), omega);
                    let reference: Option<Vec<f64>> = cs.iter().map(|c| c.eval(&b).ok()).collect();
                    let Some(reference) = reference else {
                        evaluable = false;
                        break;
                    };
                    let computed: Vec<f64> = mats[s][i].column(j).iter().copied().collect();
                    let diff = computed
                        .iter()
                        .zip(&reference)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    if worst.as_ref().is_none_or(|w| diff > w.max_abs_diff) {
                        worst = Some(CellDetail {
                            eps,
                            omega,
                            computed,
                            reference,
                            max_abs_diff: diff,
                        });
                    }
                }
            }
            let reference_text = if evaluable {
                coeffs.as_ref().map(|c| combination(alg, c).to_string())
            } else {
                None
            };
            let matches = evaluable && worst.as_ref().is_some_and(|w| w.max_abs_diff <= tol);
            cells.push(CellReport {
                row: cell.row.clone(),
                col: cell.col.clone(),
                computed: worst
                    .as_ref()
                    .map(|w| format_vector(&alg.basis, &w.computed))
                    .unwrap_or_default(),
                reference: reference_text,
                matches,
                detail: if matches { None } else { worst },
            });
        }
        Ok(TableReport::new(alg, fx, cells))
    }

    /// Aligned plain-text rendering; mismatches are marked `!`, unparseable cells `?`.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<String> = Vec::new();
        let mut cols: Vec<String> = Vec::new();
        for c in &self.cells {
            if !rows.contains(&c.row) {
                rows.push(c.row.clone());
            }
            if !cols.contains(&c.col) {
                cols.push(c.col.clone());
            }
        }
        let cell_text = |r: &str, col: &str| -> String {
            match self.cells.iter().find(|c| c.row == r && c.col == col) {
                None => String::new(),
                Some(c) => {
                    let mark = if c.reference.is_none() {
                        "? "
                    } else if c.matches {
                        ""
                    } else {
                        "! "
                    };
                    let body = match self.kind {
                        TableKind::Commutator => c.computed.clone(),
                        TableKind::Adjoint => {
                            c.reference.clone().unwrap_or_else(|| String::from("-"))
                        }
                    };
                    format!("{mark}{body}")
                }
            }
        };
        let mut grid: Vec<Vec<String>> = vec![std::iter::once(self.table.clone())
            .chain(cols.iter().cloned())
            .collect()];
        for r in &rows {
            grid.push(
                std::iter::once(r.clone())
                    .chain(cols.iter().map(|c| cell_text(r, c)))
                    .collect(),
            );
        }
        let widths: Vec<usize> = (0..=cols.len())
            .map(|k| {
                grid.iter()
                    .map(|row| row[k].chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for row in &grid {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join(" | ").trim_end());
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} cells: {} match, {} mismatch, {} unparseable",
            s.cells, s.matches, s.mismatches, s.unparseable
        );
        out
    }
}

fn format_vector(basis: &[String], v: &[f64]) -> String {
    let parts: Vec<String> = v
        .iter()
        .zip(basis)
        .filter(|(x, _)| x.abs() > 1e-14)
        .map(|(x, l)| format!("{}*{l}", crate::report::format_f64(*x)))
        .collect();
    if parts.is_empty() {
        String::from("0")
    } else {
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::structure_constants;
    use crate::lie::catalog;

    #[test]
    fn fixtures_load() {
        for name in FIXTURE_NAMES {
            let fx = builtin_fixture(name).unwrap();
            assert_eq!(fx.cells.len(), fx.rows.len() * fx.cols.len(), "{name}");
        }
    }

    #[test]
    fn nonlinear_entries_are_unparseable() {
        let alg = structure_constants(&catalog(SystemKind::General).fields()).unwrap();
        assert!(coefficients("X1*X2", &alg, &BTreeMap::new()).is_none());
        assert!(coefficients("X1 +", &alg, &BTreeMap::new()).is_none());
        assert_eq!(
            coefficients("2*X3", &alg, &BTreeMap::new()).unwrap()[2],
            Expr::int(2)
        );
    }
}
