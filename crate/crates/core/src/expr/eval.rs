use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use super::poly::{Atom, Func, Q};
use super::{Expr, ExprError, Symbol};

pub type Bindings = BTreeMap<Symbol, f64>;

fn q_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl Expr {
    /// Floating-point value under `bindings`.
    ///
    /// Every free symbol must be bound. A reciprocal whose base evaluates to zero
    /// is reported as a pole rather than returning an infinity.
    pub fn eval(&self, bindings: &Bindings) -> Result<f64, ExprError> {
        let mut total = 0.0;
        for (m, c) in self.terms() {
            let mut t = q_f64(c);
            for (a, k) in &m.0 {
                let v = match a {
                    Atom::Sym(s) => *bindings
                        .get(s)
                        .ok_or_else(|| ExprError::Unbound(s.clone()))?,
                    Atom::Func(f, arg) => f.apply_f64(arg.eval(bindings)?),
                    Atom::Recip(base) => {
                        let b = base.eval(bindings)?;
                        if b == 0.0 || !b.is_finite() {
                            return Err(ExprError::Pole(format!("{base} = {b}")));
                        }
                        1.0 / b
                    }
                };
                t *= v.powi(*k);
            }
            total += t;
        }
        Ok(total)
    }

    pub fn compile(&self, slots: &[Symbol]) -> Result<CompiledExpr, ExprError> {
        CompiledExpr::new(self, slots)
    }
}

#[derive(Clone, Debug)]
enum Code {
    Slot(usize),
    Func(Func, Box<Poly>),
    Recip(Box<Poly>),
}

#[derive(Clone, Debug)]
struct Poly(Vec<(f64, Vec<(Code, i32)>)>);

impl Poly {
    fn build(e: &Expr, slots: &[Symbol]) -> Result<Poly, ExprError> {
        let mut terms = Vec::with_capacity(e.num_terms());
        for (m, c) in e.terms() {
            let mut factors = Vec::with_capacity(m.0.len());
            for (a, k) in &m.0 {
                let code = match a {
                    Atom::Sym(s) => Code::Slot(
                        slots
                            .iter()
                            .position(|x| x == s)
                            .ok_or_else(|| ExprError::Unbound(s.clone()))?,
                    ),
                    Atom::Func(f, arg) => Code::Func(*f, Box::new(Poly::build(arg, slots)?)),
                    Atom::Recip(base) => Code::Recip(Box::new(Poly::build(base, slots)?)),
                };
                factors.push((code, *k));
            }
            terms.push((q_f64(c), factors));
        }
        Ok(Poly(terms))
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (c, factors) in &self.0 {
            let mut t = *c;
            for (code, k) in factors {
                let v = match code {
                    Code::Slot(i) => x[*i],
                    Code::Func(f, p) => f.apply_f64(p.eval(x)),
                    Code::Recip(p) => 1.0 / p.eval(x),
                };
                t *= if *k == 1 { v } else { v.powi(*k) };
            }
            total += t;
        }
        total
    }
}

/// An expression lowered to positional slots for repeated evaluation.
///
/// Poles evaluate to IEEE infinities or NaN; callers that care check finiteness.
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    slots: Vec<Symbol>,
    code: Poly,
}

impl CompiledExpr {
    pub fn new(e: &Expr, slots: &[Symbol]) -> Result<CompiledExpr, ExprError> {
        Ok(CompiledExpr {
            slots: slots.to_vec(),
            code: Poly::build(e, slots)?,
        })
    }

    pub fn slots(&self) -> &[Symbol] {
        &self.slots
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.slots.len());
        self.code.eval(x)
    }
}
