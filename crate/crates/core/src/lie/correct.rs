//! Search for small textual corrections that turn a failing generator into a
//! symmetry.
//!
//! Edits act on single tokens or single additive terms of the printed
//! component texts:
//! - `SwapUV`: one occurrence of `u` becomes `v` or vice versa;
//! - `InsertH`: one additive term (or a whole component) is multiplied by `h`;
//! - `FlipSign`: one additive term (or a whole component) changes sign;
//! - `DoubleOmega`: one occurrence of `Omega` becomes `2*Omega`.
//!
//! The symmetry condition is linear in the generator, so the residual of an
//! edited field is the literal residual plus the residual of the difference.
//! Depth-2 search is exhaustive over pairs.

use std::collections::BTreeMap;

use serde::Serialize;

use super::VectorField;
use crate::expr::{names, normalize, parse_node, Expr, ExprError, Field, Node, Symbol};
use crate::swe::PdeSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    #[serde(rename = "swap_uv")]
    SwapUV,
    InsertH,
    FlipSign,
    DoubleOmega,
}

/// Component slot of a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Slot {
    #[serde(rename = "xi_t")]
    T,
    #[serde(rename = "xi_x")]
    X,
    #[serde(rename = "xi_y")]
    Y,
    #[serde(rename = "eta_h")]
    H,
    #[serde(rename = "eta_u")]
    U,
    #[serde(rename = "eta_v")]
    V,
}

impl Slot {
    pub const ALL: [Slot; 6] = [Slot::T, Slot::X, Slot::Y, Slot::H, Slot::U, Slot::V];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Edit {
    pub slot: Slot,
    pub kind: EditKind,
    /// Child indices from the component root to the edited node.
    #[serde(skip)]
    pub path: Vec<usize>,
    pub before: String,
    pub after: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Correction {
    pub edits: Vec<Edit>,
    pub field: VectorField,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrectionSearch {
    pub label: String,
    pub literal_verified: bool,
    pub literal_residuals: [Expr; 3],
    pub candidate_edits: usize,
    pub max_depth: usize,
    /// Every correction of minimal size found, in enumeration order.
    pub corrections: Vec<Correction>,
}

impl CorrectionSearch {
    /// Number of edits in the smallest correction, `Some(0)` if the literal form verifies.
    pub fn minimal_edits(&self) -> Option<usize> {
        if self.literal_verified {
            return Some(0);
        }
        self.corrections.first().map(|c| c.edits.len())
    }
}

fn children(n: &Node) -> Vec<&Node> {
    match n {
        Node::Add(v) | Node::Mul(v) => v.iter().collect(),
        Node::Pow(b, e) => vec![b, e],
        Node::Func(_, a) => vec![a],
        Node::Num(_) | Node::Sym(_) => vec![],
    }
}

fn candidates(
    n: &Node,
    path: &mut Vec<usize>,
    additive: bool,
    out: &mut Vec<(Vec<usize>, EditKind)>,
) {
    if let Node::Sym(s) = n {
        if *s == Symbol::jet(Field::U, &[]) || *s == Symbol::jet(Field::V, &[]) {
            out.push((path.clone(), EditKind::SwapUV));
        }
        if *s == Symbol::param(names::OMEGA) {
            out.push((path.clone(), EditKind::DoubleOmega));
        }
    }
    if additive {
        out.push((path.clone(), EditKind::FlipSign));
        out.push((path.clone(), EditKind::InsertH));
    }
    let child_additive = matches!(n, Node::Add(_));
    for (i, c) in children(n).into_iter().enumerate() {
        path.push(i);
        candidates(c, path, child_additive, out);
        path.pop();
    }
}

fn rewrite(n: &Node, path: &[usize], kind: EditKind) -> Node {
    let Some((&i, rest)) = path.split_first() else {
        return match (kind, n) {
            (EditKind::SwapUV, Node::Sym(s)) => {
                let u = Symbol::jet(Field::U, &[]);
                let v = Symbol::jet(Field::V, &[]);
                Node::Sym(if *s == u { v } else { u })
            }
            (EditKind::DoubleOmega, _) => Node::Mul(vec![Node::int(2), n.clone()]),
            (EditKind::FlipSign, _) => Node::neg(n.clone()),
            (EditKind::InsertH, _) => {
                Node::Mul(vec![n.clone(), Node::Sym(Symbol::jet(Field::H, &[]))])
            }
            (EditKind::SwapUV, _) => unreachable!("swap targets a symbol"),
        };
    };
    let mut out = n.clone();
    match &mut out {
        Node::Add(v) | Node::Mul(v) => v[i] = rewrite(&v[i], rest, kind),
        Node::Pow(b, e) => {
            if i == 0 {
                **b = rewrite(b, rest, kind);
            } else {
                **e = rewrite(e, rest, kind);
            }
        }
        Node::Func(_, a) => **a = rewrite(a, rest, kind),
        Node::Num(_) | Node::Sym(_) => unreachable!("path descends into a leaf"),
    }
    out
}

struct Candidate {
    slot: Slot,
    kind: EditKind,
    path: Vec<usize>,
    value: Expr,
    delta: Expr,
    residual: [Expr; 3],
}

fn field_with(base: &VectorField, slot: Slot, value: Expr) -> VectorField {
    let mut f = base.clone();
    match slot.index() {
        i @ 0..=2 => f.xi[i] = value,
        i => f.eta[i - 3] = value,
    }
    f
}

fn add3(a: &[Expr; 3], b: &[Expr; 3]) -> [Expr; 3] {
    [0, 1, 2].map(|i| &a[i] + &b[i])
}

fn is_prefix(a: &[usize], b: &[usize]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

/// Check `texts` against `sys`; if the literal form fails, enumerate corrections
/// of up to `max_depth` (1 or 2) edits and return all minimal ones.
pub fn search_corrections(
    label: &str,
    texts: &[String; 6],
    sys: &PdeSystem,
    max_depth: usize,
) -> Result<CorrectionSearch, ExprError> {
    let trees: Vec<Node> = texts
        .iter()
        .map(|t| parse_node(t))
        .collect::<Result<_, _>>()?;
    let values: Vec<Expr> = trees.iter().map(normalize).collect::<Result<_, _>>()?;
    let literal = VectorField::new(
        [values[0].clone(), values[1].clone(), values[2].clone()],
        [values[3].clone(), values[4].clone(), values[5].clone()],
    )
    .labelled(label);
    let literal_residuals = literal.symmetry_residuals(sys);
    let mut out = CorrectionSearch {
        label: label.to_string(),
        literal_verified: literal_residuals.iter().all(Expr::is_zero),
        literal_residuals: literal_residuals.clone(),
        candidate_edits: 0,
        max_depth,
        corrections: Vec::new(),
    };
    if out.literal_verified {
        return Ok(out);
    }

    let mut cands = Vec::new();
    for slot in Slot::ALL {
        let tree = &trees[slot.index()];
        let mut found = Vec::new();
        candidates(tree, &mut Vec::new(), true, &mut found);
        for (path, kind) in found {
            let value = normalize(&rewrite(tree, &path, kind))?;
            let delta = &value - &values[slot.index()];
            if delta.is_zero() {
                continue;
            }
            let residual =
                field_with(&VectorField::zero(), slot, delta.clone()).symmetry_residuals(sys);
            cands.push(Candidate {
                slot,
                kind,
                path,
                value,
                delta,
                residual,
            });
        }
    }
    out.candidate_edits = cands.len();

    let edit = |c: &Candidate, after: &Expr| Edit {
        slot: c.slot,
        kind: c.kind,
        path: c.path.clone(),
        before: values[c.slot.index()].to_string(),
        after: after.to_string(),
    };

    for c in &cands {
        if add3(&literal_residuals, &c.residual)
            .iter()
            .all(Expr::is_zero)
        {
            out.corrections.push(Correction {
                edits: vec![edit(c, &c.value)],
                field: field_with(&literal, c.slot, c.value.clone()).labelled(label),
            });
        }
    }
    if !out.corrections.is_empty() || max_depth < 2 {
        return Ok(out);
    }

    for (i, a) in cands.iter().enumerate() {
        for b in &cands[i + 1..] {
            let (field, edits) = if a.slot != b.slot {
                let r = add3(&add3(&literal_residuals, &a.residual), &b.residual);
                if !r.iter().all(Expr::is_zero) {
                    continue;
                }
                let f = field_with(
                    &field_with(&literal, a.slot, a.value.clone()),
                    b.slot,
                    b.value.clone(),
                );
                (f, vec![edit(a, &a.value), edit(b, &b.value)])
            } else {
                if is_prefix(&a.path, &b.path) || is_prefix(&b.path, &a.path) {
                    continue;
                }
                let tree = &trees[a.slot.index()];
                let both = normalize(&rewrite(&rewrite(tree, &a.path, a.kind), &b.path, b.kind))?;
                let delta = &both - &values[a.slot.index()];
                if delta == a.delta || delta == b.delta || delta.is_zero() {
                    continue;
                }
                let r = add3(
                    &literal_residuals,
                    &field_with(&VectorField::zero(), a.slot, delta).symmetry_residuals(sys),
                );
                if !r.iter().all(Expr::is_zero) {
                    continue;
                }
                (
                    field_with(&literal, a.slot, both.clone()),
                    vec![edit(a, &both), edit(b, &both)],
                )
            };
            out.corrections.push(Correction {
                edits,
                field: field.labelled(label),
            });
        }
    }
    dedup(&mut out.corrections);
    Ok(out)
}

fn dedup(cs: &mut Vec<Correction>) {
    let mut seen = BTreeMap::new();
    cs.retain(|c| {
        seen.insert(c.field.components().map(|e| e.clone()), ())
            .is_none()
    });
}
