//! Exact symbolic expressions with a canonical normal form.
//!
//! [`Node`] is the free-form tree produced by builders and the parser;
//! [`normalize`] turns it into an [`Expr`], which is always canonical.

mod calculus;
mod eval;
mod fmt;
mod node;
mod parse;
mod poly;
mod symbol;

pub use eval::{Bindings, CompiledExpr};
pub use node::{normalize, Node};
pub use parse::parse_node;
pub use poly::{Expr, Func, Q};
pub use symbol::{names, Coord, Field, Jet, Symbol, SymbolKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("unsupported form: {0}")]
    UnsupportedForm(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("unbound symbol `{0}`")]
    Unbound(Symbol),
    #[error("pole: {0}")]
    Pole(String),
    #[error("cyclic binding through `{0}`")]
    Cycle(Symbol),
    #[error("jet order {order} exceeds the cap {cap}")]
    JetOrder { order: u32, cap: u32 },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Expr, ExprError> {
        normalize(&parse_node(s)?)
    }
}

impl Expr {
    /// Parse text in the documented grammar and normalize it.
    pub fn parse(s: &str) -> Result<Expr, ExprError> {
        s.parse()
    }
}

/// Shorthand for tests and generator catalogs: parse or panic.
#[macro_export]
macro_rules! ex {
    ($s:expr) => {
        $crate::expr::Expr::parse($s).unwrap_or_else(|e| panic!("bad expression {:?}: {}", $s, e))
    };
}
