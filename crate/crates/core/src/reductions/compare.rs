//! Comparison of derived reduced systems with transcribed equations.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ReductionError, Result};
use crate::expr::{Expr, Symbol};

/// Transcription of a printed reduced system.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ReferenceEquations {
    pub name: String,
    pub indep: String,
    /// Abbreviations such as `L` or `G`, substituted into the equations.
    #[serde(default)]
    pub definitions: BTreeMap<String, String>,
    pub equations: Vec<ReferenceEquation>,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ReferenceEquation {
    pub label: String,
    /// `H`, `U` or `V`.
    pub state: String,
    pub rhs: String,
}

const BUILTIN: [(&str, &str); 3] = [
    (
        "travelling_wave",
        include_str!("../../fixtures/equations/travelling_wave.json"),
    ),
    (
        "equator_y2y5",
        include_str!("../../fixtures/equations/equator_y2y5.json"),
    ),
    (
        "equator_y4y5",
        include_str!("../../fixtures/equations/equator_y4y5.json"),
    ),
];

/// Built-in transcription, or `<dir>/equations/<name>.json` when `dir` is given.
pub fn reference_equations(name: &str, dir: Option<&Path>) -> Result<ReferenceEquations> {
    let text = match dir {
        Some(d) => {
            let p = d.join("equations").join(format!("{name}.json"));
            std::fs::read_to_string(&p)
                .map_err(|_| ReductionError::MissingFixture(p.display().to_string()))?
        }
        None => BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| ReductionError::MissingFixture(name.to_string()))?,
    };
    serde_json::from_str(&text).map_err(|e| ReductionError::Fixture {
        name: name.into(),
        msg: e.to_string(),
    })
}

impl ReferenceEquations {
    pub fn definition(&self, name: &str) -> Result<Expr> {
        let text = self
            .definitions
            .get(name)
            .ok_or_else(|| ReductionError::Fixture {
                name: self.name.clone(),
                msg: format!("no definition `{name}`"),
            })?;
        Ok(Expr::parse(text)?)
    }

    /// Right-hand side of the equation `label` with definitions expanded.
    pub fn rhs(&self, label: &str) -> Result<Expr> {
        let eq = self
            .equations
            .iter()
            .find(|e| e.label == label)
            .ok_or_else(|| ReductionError::Fixture {
                name: self.name.clone(),
                msg: format!("no equation `{label}`"),
            })?;
        let mut defs = BTreeMap::new();
        for k in self.definitions.keys() {
            defs.insert(Symbol::param(k), self.definition(k)?);
        }
        Ok(Expr::parse(&eq.rhs)?.substitute(&defs)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Match,
    SignFlip,
    ConstantMultiple,
    Mismatch,
}

/// Terms of two polynomials that do not agree.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TermDiff {
    pub only_derived: Vec<String>,
    pub only_reference: Vec<String>,
    pub different: Vec<String>,
}

impl TermDiff {
    fn of(derived: &Expr, reference: &Expr) -> TermDiff {
        let a = derived.collect_by(|_| true);
        let b = reference.collect_by(|_| true);
        let show = |m: &Expr, c: &Expr| (c * m).to_string();
        let mut d = TermDiff::default();
        for (m, c) in &a {
            match b.get(m) {
                None => d.only_derived.push(show(m, c)),
                Some(c2) if c2 != c => {
                    d.different
                        .push(format!("{} vs {}", show(m, c), show(m, c2)))
                }
                _ => {}
            }
        }
        for (m, c) in &b {
            if !a.contains_key(m) {
                d.only_reference.push(show(m, c));
            }
        }
        d
    }

    pub fn is_empty(&self) -> bool {
        self.only_derived.is_empty() && self.only_reference.is_empty() && self.different.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquationComparison {
    pub label: String,
    pub derived: String,
    pub reference: String,
    pub verdict: Verdict,
    /// Ratio derived/reference for a constant multiple.
    pub factor: Option<String>,
    /// Term-level difference of the numerators over `denominator`.
    pub terms: TermDiff,
    pub denominator: Option<String>,
}

/// Compare `derived` and `reference`. When `denominator` is given both sides are
/// multiplied by it before the term-level comparison.
pub fn compare_equation(
    label: &str,
    derived: &Expr,
    reference: &Expr,
    denominator: Option<&Expr>,
) -> EquationComparison {
    let (nd, np) = match denominator {
        Some(d) => (derived * d, reference * d),
        None => (derived.clone(), reference.clone()),
    };
    let (verdict, factor) = if (derived - reference).is_zero() {
        (Verdict::Match, None)
    } else if (derived + reference).is_zero() {
        (Verdict::SignFlip, Some("-1".to_string()))
    } else if let Some(q) = nd
        .rational_multiple_of(&np)
        .filter(|_| !np.has_reciprocals() && !nd.has_reciprocals())
    {
        (Verdict::ConstantMultiple, Some(q.to_string()))
    } else {
        (Verdict::Mismatch, None)
    };
    EquationComparison {
        label: label.to_string(),
        derived: derived.to_string(),
        reference: reference.to_string(),
        verdict,
        factor,
        terms: TermDiff::of(&nd, &np),
        denominator: denominator.map(|d| d.to_string()),
    }
}
