use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use super::poly::{Atom, Func, Monomial, Q};
use super::{Coord, Expr, ExprError, Symbol};

fn atom_derivative(atom: &Atom, s: &Symbol) -> Expr {
    match atom {
        Atom::Sym(x) => {
            if x == s {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Func(f, arg) => {
            let inner = arg.diff(s);
            if inner.is_zero() {
                return Expr::zero();
            }
            let outer = match f {
                Func::Sin => Expr::func(Func::Cos, arg.clone()),
                Func::Cos => -Expr::func(Func::Sin, arg.clone()),
                Func::Sinh => Expr::func(Func::Cosh, arg.clone()),
                Func::Cosh => Expr::func(Func::Sinh, arg.clone()),
                Func::Exp => Expr::func(Func::Exp, arg.clone()),
            };
            outer * inner
        }
        Atom::Recip(base) => {
            let inner = base.diff(s);
            if inner.is_zero() {
                return Expr::zero();
            }
            let sq = Expr::term(
                Monomial::single(Atom::Recip(base.clone()), 2),
                Q::from_integer((-1).into()),
            );
            sq * inner
        }
    }
}

impl Expr {
    /// Every symbol occurring in the expression, including inside function
    /// arguments and reciprocal bases.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        for (m, _) in self.terms() {
            for (a, _) in &m.0 {
                match a {
                    Atom::Sym(s) => {
                        out.insert(s.clone());
                    }
                    Atom::Func(_, e) | Atom::Recip(e) => e.collect_symbols(out),
                }
            }
        }
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.terms().iter().any(|(m, _)| {
            m.0.iter().any(|(a, _)| match a {
                Atom::Sym(x) => x == s,
                Atom::Func(_, e) | Atom::Recip(e) => e.contains(s),
            })
        })
    }

    /// Partial derivative, every other symbol held fixed.
    pub fn diff(&self, s: &Symbol) -> Expr {
        let mut parts = Vec::new();
        for (m, c) in self.terms() {
            for (idx, (atom, k)) in m.0.iter().enumerate() {
                let d = atom_derivative(atom, s);
                if d.is_zero() {
                    continue;
                }
                let mut lowered = m.clone();
                lowered.0[idx].1 -= 1;
                if lowered.0[idx].1 == 0 {
                    lowered.0.remove(idx);
                }
                let coeff = c * Q::from_integer(BigInt::from(*k));
                parts.push(Expr::term(lowered, coeff) * d);
            }
        }
        Expr::sum(parts)
    }

    /// Total derivative `D_c = ∂_c + Σ u_{J,c} ∂/∂u_J` over the jet variables present.
    ///
    /// Fails when a raised jet would exceed `max_order`.
    pub fn total_derivative(&self, c: Coord, max_order: u32) -> Result<Expr, ExprError> {
        let mut parts = vec![self.diff(&Symbol::Coord(c))];
        for s in self.free_symbols() {
            if let Symbol::Jet(j) = &s {
                let partial = self.diff(&s);
                if partial.is_zero() {
                    continue;
                }
                let raised = j.raised(c);
                if raised.order() > max_order {
                    return Err(ExprError::JetOrder {
                        order: raised.order(),
                        cap: max_order,
                    });
                }
                parts.push(Expr::sym(Symbol::Jet(raised)) * partial);
            }
        }
        Ok(Expr::sum(parts))
    }

    /// Simultaneous substitution followed by normalization.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr, ExprError> {
        check_acyclic(bindings)?;
        self.subst_unchecked(bindings)
    }

    pub(crate) fn subst_unchecked(
        &self,
        bindings: &BTreeMap<Symbol, Expr>,
    ) -> Result<Expr, ExprError> {
        if bindings.is_empty() || !bindings.keys().any(|k| self.contains(k)) {
            return Ok(self.clone());
        }
        let mut memo: BTreeMap<&Atom, Expr> = BTreeMap::new();
        let mut parts = Vec::with_capacity(self.terms().len());
        for (m, c) in self.terms() {
            let mut t = Expr::rational(c.clone());
            for (atom, k) in &m.0 {
                let v = match memo.get(atom) {
                    Some(v) => v.clone(),
                    None => {
                        let v = match atom {
                            Atom::Sym(s) => bindings
                                .get(s)
                                .cloned()
                                .unwrap_or_else(|| Expr::sym(s.clone())),
                            Atom::Func(f, arg) => Expr::func(*f, arg.subst_unchecked(bindings)?),
                            Atom::Recip(base) => {
                                base.subst_unchecked(bindings)?.recip().map_err(|_| {
                                    ExprError::DivisionByZero(format!(
                                        "denominator {base} vanishes"
                                    ))
                                })?
                            }
                        };
                        memo.insert(atom, v.clone());
                        v
                    }
                };
                t = t * v.pow(*k as i64)?;
            }
            parts.push(t);
        }
        Ok(Expr::sum(parts))
    }

    /// Split into `Σ coeff · basis` where each basis monomial collects the atoms that
    /// involve a symbol accepted by `is_var`, and each coefficient is free of them.
    pub fn collect_by(&self, is_var: impl Fn(&Symbol) -> bool) -> BTreeMap<Expr, Expr> {
        let mut out: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
        for (m, c) in self.terms() {
            let (mut var, mut rest) = (Monomial::one(), Monomial::one());
            for (a, k) in &m.0 {
                let single = Monomial::single(a.clone(), *k);
                let depends = match a {
                    Atom::Sym(s) => is_var(s),
                    Atom::Func(_, e) | Atom::Recip(e) => e.free_symbols().iter().any(&is_var),
                };
                if depends {
                    var = var.mul(&single);
                } else {
                    rest = rest.mul(&single);
                }
            }
            out.entry(Expr::term(var, Q::from_integer(1.into())))
                .or_default()
                .push(Expr::term(rest, c.clone()));
        }
        out.into_iter()
            .map(|(k, v)| (k, Expr::sum(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    pub fn subs1(&self, s: &Symbol, value: &Expr) -> Result<Expr, ExprError> {
        let mut b = BTreeMap::new();
        b.insert(s.clone(), value.clone());
        self.substitute(&b)
    }
}

fn check_acyclic(bindings: &BTreeMap<Symbol, Expr>) -> Result<(), ExprError> {
    // depth-first search over "key appears in the value bound to key'"
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }
    let keys: Vec<&Symbol> = bindings.keys().collect();
    let edges: Vec<Vec<usize>> = keys
        .iter()
        .map(|k| {
            let value = &bindings[*k];
            keys.iter()
                .enumerate()
                .filter(|(_, other)| value.contains(other))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let mut marks = vec![Mark::Fresh; keys.len()];
    fn visit(
        i: usize,
        edges: &[Vec<usize>],
        marks: &mut [Mark],
        keys: &[&Symbol],
    ) -> Result<(), ExprError> {
        marks[i] = Mark::Active;
        for &j in &edges[i] {
            match marks[j] {
                Mark::Active => return Err(ExprError::Cycle(keys[j].clone())),
                Mark::Fresh => visit(j, edges, marks, keys)?,
                Mark::Done => {}
            }
        }
        marks[i] = Mark::Done;
        Ok(())
    }
    for i in 0..keys.len() {
        if marks[i] == Mark::Fresh {
            visit(i, &edges, &mut marks, &keys)?;
        }
    }
    Ok(())
}
