use num_traits::One;

use super::poly::{Atom, Func, Q};
use super::{Expr, ExprError, Symbol};

/// Free-form expression tree. Any tree is accepted; [`normalize`] decides whether
/// it denotes something the canonical form can hold.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(Q),
    Sym(Symbol),
    Add(Vec<Node>),
    Mul(Vec<Node>),
    Pow(Box<Node>, Box<Node>),
    Func(Func, Box<Node>),
}

impl Node {
    pub fn int(n: i64) -> Node {
        Node::Num(Q::from_integer(n.into()))
    }

    pub fn neg(n: Node) -> Node {
        Node::Mul(vec![Node::int(-1), n])
    }

    pub fn normalize(&self) -> Result<Expr, ExprError> {
        normalize(self)
    }
}

/// Canonical form of a tree.
///
/// Errors on non-integer exponents and on division by an expression that
/// normalizes to zero.
pub fn normalize(node: &Node) -> Result<Expr, ExprError> {
    Ok(match node {
        Node::Num(q) => Expr::rational(q.clone()),
        Node::Sym(s) => Expr::sym(s.clone()),
        Node::Add(items) => Expr::sum(items.iter().map(normalize).collect::<Result<Vec<_>, _>>()?),
        Node::Mul(items) => {
            let mut acc = Expr::one();
            for it in items {
                acc = acc * normalize(it)?;
                if acc.is_zero() {
                    // still validate the remaining factors
                    for rest in items {
                        normalize(rest)?;
                    }
                    return Ok(Expr::zero());
                }
            }
            acc
        }
        Node::Pow(base, exp) => {
            let e = normalize(exp)?;
            let k = match e.as_rational() {
                Some(q) if q.is_integer() => q.to_integer(),
                _ => {
                    return Err(ExprError::UnsupportedForm(format!(
                        "non-integer exponent `{e}`"
                    )));
                }
            };
            let k: i64 = k
                .try_into()
                .map_err(|_| ExprError::UnsupportedForm(String::from("exponent out of range")))?;
            let b = normalize(base)?;
            b.pow(k).map_err(|err| match err {
                ExprError::DivisionByZero(_) => {
                    ExprError::DivisionByZero(format!("`{b}` raised to {k}"))
                }
                other => other,
            })?
        }
        Node::Func(f, arg) => Expr::func(*f, normalize(arg)?),
    })
}

impl Expr {
    /// The canonical tree; `normalize(&e.to_node()) == Ok(e)`.
    pub fn to_node(&self) -> Node {
        let terms: Vec<Node> = self
            .terms()
            .iter()
            .map(|(m, c)| {
                let mut factors = Vec::new();
                if !c.is_one() || m.is_one() {
                    factors.push(Node::Num(c.clone()));
                }
                for (a, k) in &m.0 {
                    let (base, k) = match a {
                        Atom::Sym(s) => (Node::Sym(s.clone()), *k),
                        Atom::Func(f, arg) => (Node::Func(*f, Box::new(arg.to_node())), *k),
                        Atom::Recip(b) => (b.to_node(), -*k),
                    };
                    factors.push(if k == 1 {
                        base
                    } else {
                        Node::Pow(Box::new(base), Box::new(Node::int(k as i64)))
                    });
                }
                if factors.len() == 1 {
                    factors.pop().unwrap()
                } else {
                    Node::Mul(factors)
                }
            })
            .collect();
        match terms.len() {
            0 => Node::int(0),
            1 => terms.into_iter().next().unwrap(),
            _ => Node::Add(terms),
        }
    }
}
