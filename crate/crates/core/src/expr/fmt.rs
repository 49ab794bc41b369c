use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::poly::{Atom, Monomial, Q};
use super::Expr;

fn write_exponent(out: &mut String, k: i32) {
    if k == 1 {
        return;
    }
    if k < 0 {
        let _ = write!(out, "^({k})");
    } else {
        let _ = write!(out, "^{k}");
    }
}

fn write_monomial(out: &mut String, m: &Monomial) {
    for (i, (a, k)) in m.0.iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        match a {
            Atom::Sym(s) => {
                let _ = write!(out, "{s}");
                write_exponent(out, *k);
            }
            Atom::Func(f, arg) => {
                let _ = write!(out, "{}({arg})", f.name());
                write_exponent(out, *k);
            }
            Atom::Recip(b) => {
                let _ = write!(out, "({b})");
                write_exponent(out, -*k);
            }
        }
    }
}

fn write_rational(out: &mut String, q: &Q) {
    if q.is_integer() {
        let _ = write!(out, "{}", q.numer());
    } else {
        let _ = write!(out, "{}/{}", q.numer(), q.denom());
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms().iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            if m.is_one() {
                write_rational(&mut out, &mag);
            } else {
                if !mag.is_one() {
                    write_rational(&mut out, &mag);
                    out.push('*');
                }
                write_monomial(&mut out, m);
            }
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Expr, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
