//! Sampled screen of a one-dimensional optimal system.
//!
//! For every representative (free constants sampled on a grid) the screen
//! applies compositions of at most `depth` single-generator adjoint maps with
//! `eps` on a grid, and tests whether the image is proportional to a member of
//! another representative's family. A hit means the two classes are conjugate
//! and the list is not optimal. No hit only means "not refuted at the sampled
//! depth"; it is never a proof.
//!
//! The last adjoint step is refined by bisection when a single off-support
//! coefficient changes sign between neighbouring grid values of `eps`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{AlgebraError, LieAlgebra};
use crate::expr::{names, Bindings, Expr, Symbol};
use crate::report::{f17, f17_vec};

/// A family `Σ c_k(a) e_k` with free constants `a`.
#[derive(Clone, Debug)]
pub struct Representative {
    pub text: String,
    pub coeffs: Vec<Expr>,
    pub free: Vec<Symbol>,
}

impl Representative {
    pub fn parse(text: &str, alg: &LieAlgebra) -> Result<Representative, AlgebraError> {
        let e = Expr::parse(text)?;
        let labels: Vec<Symbol> = alg.basis.iter().map(|l| Symbol::param(l)).collect();
        let coeffs: Vec<Expr> = labels.iter().map(|l| e.diff(l)).collect();
        let rebuilt = Expr::sum(
            coeffs
                .iter()
                .zip(&labels)
                .map(|(c, l)| c * &Expr::sym(l.clone())),
        );
        if !(&e - &rebuilt).is_zero() || coeffs.iter().any(|c| labels.iter().any(|l| c.contains(l)))
        {
            return Err(AlgebraError::Fixture {
                name: text.to_string(),
                msg: "not linear in the basis".into(),
            });
        }
        let mut free: Vec<Symbol> = coeffs.iter().flat_map(|c| c.free_symbols()).collect();
        free.sort();
        free.dedup();
        Ok(Representative {
            text: text.to_string(),
            coeffs,
            free,
        })
    }

    fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len())
            .filter(|&k| !self.coeffs[k].is_zero())
            .collect()
    }

    fn instances(&self, values: &[f64]) -> Vec<(BTreeMap<String, f64>, Vec<f64>)> {
        let mut combos: Vec<Vec<f64>> = vec![vec![]];
        for _ in &self.free {
            combos = combos
                .into_iter()
                .flat_map(|c| values.iter().map(move |v| [c.clone(), vec![*v]].concat()))
                .collect();
        }
        combos
            .into_iter()
            .map(|vals| {
                let b: Bindings = self
                    .free
                    .iter()
                    .cloned()
                    .zip(vals.iter().copied())
                    .collect();
                let v = self
                    .coeffs
                    .iter()
                    .map(|c| c.eval(&b).expect("free constants are bound"))
                    .collect();
                let named = self.free.iter().map(|s| s.to_string()).zip(vals).collect();
                (named, v)
            })
            .collect()
    }

    /// Scale `lambda` with `b = lambda * member`, if `b` lies in the family with all
    /// free constants nonzero.
    fn membership(&self, b: &[f64], tol: f64) -> Option<f64> {
        let norm = b.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if norm < tol {
            return None;
        }
        let support = self.support();
        if (0..b.len()).any(|k| !support.contains(&k) && b[k].abs() > tol * norm) {
            return None;
        }
        let fixed: Vec<(usize, f64)> = support
            .iter()
            .filter_map(|&k| {
                self.coeffs[k]
                    .as_rational()
                    .map(|q| (k, num_traits::ToPrimitive::to_f64(&q).unwrap()))
            })
            .collect();
        let lambda = match fixed.first() {
            Some(&(k, c)) => b[k] / c,
            None => 1.0,
        };
        if lambda.abs() < tol * norm {
            return None;
        }
        for &(k, c) in &fixed {
            if (b[k] - lambda * c).abs() > tol * norm {
                return None;
            }
        }
        // free entries must be nonzero for a genuine family member
        for &k in &support {
            if !fixed.iter().any(|(f, _)| *f == k) && b[k].abs() <= tol * norm {
                return None;
            }
        }
        Some(lambda)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScreenGrid {
    pub eps: Vec<f64>,
    pub constants: Vec<f64>,
    pub omega: f64,
    pub depth: usize,
    pub tol: f64,
}

impl Default for ScreenGrid {
    fn default() -> Self {
        ScreenGrid {
            eps: vec![-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0],
            constants: vec![-1.0, 1.0, 2.0],
            omega: 1.0,
            depth: 2,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    /// One representative is conjugate to a member of another family.
    Conjugate,
    /// A representative is mapped onto a rescaled copy of itself.
    SelfScaling,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjointStep {
    pub generator: String,
    #[serde(serialize_with = "f17")]
    pub eps: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Finding {
    pub kind: FindingKind,
    pub from: String,
    pub constants: BTreeMap<String, f64>,
    pub to: String,
    pub path: Vec<AdjointStep>,
    #[serde(serialize_with = "f17")]
    pub scale: f64,
    #[serde(serialize_with = "f17_vec")]
    pub image: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScreenReport {
    pub basis: Vec<String>,
    pub representatives: Vec<String>,
    pub grid: ScreenGrid,
    pub findings: Vec<Finding>,
    /// `true` for each representative that no other family absorbs at the sampled depth.
    pub not_refuted: BTreeMap<String, bool>,
    pub note: String,
}

impl ScreenReport {
    pub fn conjugate(&self, from: &str, to: &str) -> Option<&Finding> {
        self.findings
            .iter()
            .find(|f| f.kind == FindingKind::Conjugate && f.from == from && f.to == to)
    }
}

/// Transcribed one-dimensional optimal system for one catalog.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct OptimalSystemFixture {
    pub basis: Vec<String>,
    pub representatives: Vec<String>,
    #[serde(default)]
    pub notes: Vec<String>,
}

const OPTIMAL_SYSTEMS: &str = include_str!("../../fixtures/optimal_systems.json");

/// Built-in optimal-system list for `system` (`general` or `equator`).
pub fn builtin_optimal_system(system: &str) -> Result<OptimalSystemFixture, AlgebraError> {
    let all: BTreeMap<String, OptimalSystemFixture> = serde_json::from_str(OPTIMAL_SYSTEMS)
        .map_err(|e| AlgebraError::Fixture {
            name: "optimal_systems".into(),
            msg: e.to_string(),
        })?;
    all.get(system)
        .cloned()
        .ok_or_else(|| AlgebraError::MissingFixture(format!("optimal_systems/{system}")))
}

type Path = Vec<(usize, f64)>;

fn apply(
    mats: &BTreeMap<(usize, u64), DMatrix<f64>>,
    path: &Path,
    v: &DVector<f64>,
) -> DVector<f64> {
    path.iter()
        .fold(v.clone(), |acc, (g, e)| &mats[&(*g, e.to_bits())] * acc)
}

/// Run the screen over `reps` (expression texts in the basis labels).
pub fn optimal_system_screen(
    alg: &LieAlgebra,
    reps: &[&str],
    grid: &ScreenGrid,
) -> Result<ScreenReport, AlgebraError> {
    let reps: Vec<Representative> = reps
        .iter()
        .map(|t| Representative::parse(t, alg))
        .collect::<Result<_, _>>()?;
    let mut params = Bindings::new();
    params.insert(Symbol::param(names::OMEGA), grid.omega);
    let n = alg.dim();
    let mut mats = BTreeMap::new();
    for g in 0..n {
        for &e in &grid.eps {
            mats.insert((g, e.to_bits()), alg.adjoint_numeric(g, e, &params)?);
        }
    }
    let mut prefixes: Vec<Path> = vec![vec![]];
    let mut frontier: Vec<Path> = vec![vec![]];
    for _ in 0..grid.depth.saturating_sub(1) {
        let mut next = Vec::new();
        for p in &frontier {
            for g in 0..n {
                for &e in &grid.eps {
                    let mut q = p.clone();
                    q.push((g, e));
                    next.push(q);
                }
            }
        }
        prefixes.extend(next.iter().cloned());
        frontier = next;
    }

    let mut findings: Vec<Finding> = Vec::new();
    let mut record = |f: Finding| {
        let dup = findings
            .iter()
            .any(|x| x.kind == f.kind && x.from == f.from && x.to == f.to);
        if !dup {
            findings.push(f);
        }
    };

    for a in &reps {
        for (constants, v0) in a.instances(&grid.constants) {
            let v0 = DVector::from_vec(v0);
            for prefix in &prefixes {
                let base = apply(&mats, prefix, &v0);
                let mut check = |path: Path, image: &DVector<f64>| {
                    for b in &reps {
                        if let Some(scale) = b.membership(image.as_slice(), grid.tol) {
                            let same = std::ptr::eq(a, b);
                            if same && (scale - 1.0).abs() <= 1e-9 {
                                continue;
                            }
                            record(Finding {
                                kind: if same {
                                    FindingKind::SelfScaling
                                } else {
                                    FindingKind::Conjugate
                                },
                                from: a.text.clone(),
                                constants: constants.clone(),
                                to: b.text.clone(),
                                path: path
                                    .iter()
                                    .map(|(g, e)| AdjointStep {
                                        generator: alg.basis[*g].clone(),
                                        eps: *e,
                                    })
                                    .collect(),
                                scale,
                                image: image.iter().copied().collect(),
                            });
                        }
                    }
                };
                if prefix.is_empty() {
                    check(vec![], &base);
                }
                if prefix.len() >= grid.depth {
                    continue;
                }
                for g in 0..n {
                    let mut prev: Option<(f64, DVector<f64>)> = None;
                    for &e in &grid.eps {
                        let img = &mats[&(g, e.to_bits())] * &base;
                        let mut path = prefix.clone();
                        path.push((g, e));
                        check(path.clone(), &img);
                        if let Some((pe, pimg)) = &prev {
                            for b in &reps {
                                if let Some(root) = bisect(
                                    alg,
                                    g,
                                    &params,
                                    &base,
                                    b,
                                    (*pe, pimg),
                                    (e, &img),
                                    grid.tol,
                                )? {
                                    let img = alg.adjoint_numeric(g, root, &params)? * &base;
                                    let mut path = prefix.clone();
                                    path.push((g, root));
                                    check(path, &img);
                                }
                            }
                        }
                        prev = Some((e, img));
                    }
                }
            }
        }
    }

    let not_refuted = reps
        .iter()
        .map(|r| {
            (
                r.text.clone(),
                !findings
                    .iter()
                    .any(|f| f.kind == FindingKind::Conjugate && f.from == r.text),
            )
        })
        .collect();
    Ok(ScreenReport {
        basis: alg.basis.clone(),
        representatives: reps.iter().map(|r| r.text.clone()).collect(),
        grid: grid.clone(),
        findings,
        not_refuted,
        note: String::from(
            "sampled necessary-condition screen: a finding shows two listed classes are conjugate; \
             the absence of findings is not a proof of optimality",
        ),
    })
}

/// Root of the single off-support coefficient that changes sign on `(lo, hi)`.
#[allow(clippy::too_many_arguments)]
fn bisect(
    alg: &LieAlgebra,
    g: usize,
    params: &Bindings,
    base: &DVector<f64>,
    target: &Representative,
    lo: (f64, &DVector<f64>),
    hi: (f64, &DVector<f64>),
    tol: f64,
) -> Result<Option<f64>, AlgebraError> {
    let support = target.support();
    let off: Vec<usize> = (0..base.len()).filter(|k| !support.contains(k)).collect();
    let scale = base.amax().max(1.0);
    let changing: Vec<usize> = off
        .iter()
        .copied()
        .filter(|&k| lo.1[k] * hi.1[k] < 0.0)
        .collect();
    let [k] = changing.as_slice() else {
        return Ok(None);
    };
    let small = |v: &DVector<f64>| off.iter().all(|&j| j == *k || v[j].abs() <= tol * scale);
    if !small(lo.1) || !small(hi.1) {
        return Ok(None);
    }
    let (mut a, mut b) = (lo.0, hi.0);
    let mut fa = lo.1[*k];
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = (alg.adjoint_numeric(g, m, params)? * base)[*k];
        if fm == 0.0 || (b - a).abs() < 1e-15 {
            return Ok(Some(m));
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::structure_constants;
    use crate::lie::catalog;
    use crate::swe::SystemKind;

    #[test]
    fn abelian_classes_stay_apart() {
        let alg = structure_constants(&catalog(SystemKind::General).fields()).unwrap();
        let r = optimal_system_screen(&alg, &["X1", "X2"], &ScreenGrid::default()).unwrap();
        assert!(r.findings.is_empty());
    }

    #[test]
    fn translations_only_rescale_under_scaling() {
        let alg = structure_constants(&catalog(SystemKind::Equator).fields()).unwrap();
        let r = optimal_system_screen(&alg, &["Y2", "Y3"], &ScreenGrid::default()).unwrap();
        assert!(r
            .findings
            .iter()
            .all(|f| f.kind == FindingKind::SelfScaling));
        let f = r.findings.iter().find(|f| f.from == "Y2").unwrap();
        assert_eq!(f.path.len(), 1);
        assert_eq!(f.path[0].generator, "Y4");
        assert!((f.scale - f.path[0].eps.exp()).abs() < 1e-9);
    }
}
