//! Canonical representation behind [`Expr`].
//!
//! An expression is stored as a sum of terms `c · Π aᵢ^kᵢ` with exact rational
//! coefficients. Atoms are symbols, elementary functions of a canonical argument,
//! and reciprocals of primitive multi-term polynomials. Exponents of symbol and
//! function atoms may be negative (Laurent monomials); reciprocal atoms only carry
//! positive exponents.
//!
//! Canonical-form rules:
//! - terms sorted by monomial, no zero coefficients, like terms merged;
//! - `sin(L)^k` with `k >= 2` never appears (`sin² = 1 - cos²`);
//! - function arguments are canonical and sign-normalized (odd/even parity);
//! - when reciprocal atoms are present the expression is brought over the common
//!   denominator, a zero numerator collapses to `0`, and any denominator factor
//!   that divides the numerator exactly is cancelled.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::symbol::{Coord, Field, Symbol};
use super::ExprError;

pub type Q = BigRational;

/// Elementary functions available as atoms.
///
/// `Sin`/`Cos` take part in the `sin²` rewrite; the hyperbolic functions and `Exp`
/// are opaque atoms used for transcribed adjoint-table entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            _ => return None,
        })
    }

    pub fn apply_f64(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Exp => x.exp(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    Sym(Symbol),
    Func(Func, Expr),
    /// `1 / base`, where `base` is primitive, reciprocal-free and has at least two terms.
    Recip(Expr),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Monomial(pub(crate) Vec<(Atom, i32)>);

impl Monomial {
    pub(crate) fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub(crate) fn single(atom: Atom, exp: i32) -> Monomial {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(atom, exp)])
        }
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn mul(&self, other: &Monomial) -> Monomial {
        self.combine(other, 1)
    }

    /// `self · other^sign` with `sign = ±1`.
    fn combine(&self, other: &Monomial, sign: i32) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let ord = match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => unreachable!(),
            };
            match ord {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let (a, e) = &other.0[j];
                    out.push((a.clone(), sign * e));
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.0[i].1 + sign * other.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    pub(crate) fn div(&self, other: &Monomial) -> Monomial {
        self.combine(other, -1)
    }

    pub(crate) fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|(a, e)| (a.clone(), -e)).collect())
    }

    pub(crate) fn exponent(&self, atom: &Atom) -> i32 {
        self.0
            .binary_search_by(|(a, _)| a.cmp(atom))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub(crate) fn has_recip(&self) -> bool {
        self.0.iter().any(|(a, _)| matches!(a, Atom::Recip(_)))
    }

    /// Split into the reciprocal-free part and the reciprocal atoms.
    fn split_recips(&self) -> (Monomial, Vec<(Expr, i32)>) {
        let mut plain = Vec::new();
        let mut recips = Vec::new();
        for (a, e) in &self.0 {
            match a {
                Atom::Recip(b) => recips.push((b.clone(), *e)),
                _ => plain.push((a.clone(), *e)),
            }
        }
        (Monomial(plain), recips)
    }

    /// Every exponent of `self` is at most the matching exponent of `other`.
    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|(a, e)| other.exponent(a) >= *e)
    }
}

/// Lexicographic monomial order: the smallest atom is the most significant variable.
pub(crate) fn lex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.0.get(i), b.0.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some((_, e)), None) => return e.cmp(&0),
            (None, Some((_, e))) => return 0.cmp(e),
            (Some((x, ex)), Some((y, ey))) => match x.cmp(y) {
                Ordering::Equal => {
                    if ex != ey {
                        return ex.cmp(ey);
                    }
                    i += 1;
                    j += 1;
                }
                Ordering::Less => return ex.cmp(&0),
                Ordering::Greater => return 0.cmp(ey),
            },
        }
    }
}

type TermMap = BTreeMap<Monomial, Q>;

/// A symbolic expression in canonical form.
///
/// Values are immutable and cheap to clone. Structural equality coincides with
/// mathematical equality on the polynomial/Laurent fragment; for expressions with
/// reciprocals of sums, `is_zero` remains a complete zero test.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    terms: Arc<Vec<(Monomial, Q)>>,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

impl Expr {
    pub(crate) fn from_sorted(terms: Vec<(Monomial, Q)>) -> Expr {
        Expr {
            terms: Arc::new(terms),
        }
    }

    pub(crate) fn terms(&self) -> &[(Monomial, Q)] {
        &self.terms
    }

    pub fn zero() -> Expr {
        Expr::from_sorted(Vec::new())
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Expr {
        Expr::rational(q_int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::rational(Q::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn rational(q: Q) -> Expr {
        if q.is_zero() {
            Expr::zero()
        } else {
            Expr::from_sorted(vec![(Monomial::one(), q)])
        }
    }

    /// Exact rational value of a finite double.
    pub fn from_f64(x: f64) -> Option<Expr> {
        Q::from_float(x).map(Expr::rational)
    }

    pub fn sym(s: Symbol) -> Expr {
        Expr::from_sorted(vec![(Monomial::single(Atom::Sym(s), 1), Q::one())])
    }

    pub fn coord(c: Coord) -> Expr {
        Expr::sym(Symbol::Coord(c))
    }

    pub fn param(name: &str) -> Expr {
        Expr::sym(Symbol::param(name))
    }

    pub fn constant(name: &str) -> Expr {
        Expr::sym(Symbol::constant(name))
    }

    pub fn jet(field: Field, derivs: &[Coord]) -> Expr {
        Expr::sym(Symbol::jet(field, derivs))
    }

    pub(crate) fn term(m: Monomial, c: Q) -> Expr {
        let mut map = TermMap::new();
        map.insert(m, c);
        finalize(map, true)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The rational value, if the expression is constant.
    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// The symbol, if the expression is a bare symbol.
    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.terms.as_slice() {
            [(m, c)] if c.is_one() => match m.0.as_slice() {
                [(Atom::Sym(s), 1)] => Some(s),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn has_reciprocals(&self) -> bool {
        self.terms.iter().any(|(m, _)| m.has_recip())
    }

    /// Construct `f(arg)` with parity normalization and exact values at zero.
    pub fn func(f: Func, arg: Expr) -> Expr {
        if arg.is_zero() {
            return match f {
                Func::Sin | Func::Sinh => Expr::zero(),
                Func::Cos | Func::Cosh | Func::Exp => Expr::one(),
            };
        }
        if f != Func::Exp && arg.leading_coefficient().is_some_and(|c| c.is_negative()) {
            let inner = Expr::term(Monomial::single(Atom::Func(f, -&arg), 1), Q::one());
            return match f {
                Func::Sin | Func::Sinh => -inner,
                _ => inner,
            };
        }
        Expr::from_sorted(vec![(Monomial::single(Atom::Func(f, arg), 1), Q::one())])
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::func(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::func(Func::Cos, arg)
    }

    pub(crate) fn leading_term(&self) -> Option<&(Monomial, Q)> {
        self.terms.iter().max_by(|a, b| lex_cmp(&a.0, &b.0))
    }

    /// Coefficient of the lexicographically leading term.
    pub fn leading_coefficient(&self) -> Option<&Q> {
        self.leading_term().map(|(_, c)| c)
    }

    pub fn scale(&self, q: &Q) -> Expr {
        if q.is_zero() {
            return Expr::zero();
        }
        Expr::from_sorted(self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect())
    }

    pub fn add_ref(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut map: TermMap = self.terms.iter().cloned().collect();
        for (m, c) in other.terms.iter() {
            accumulate(&mut map, m.clone(), c.clone());
        }
        finalize(map, false)
    }

    pub fn mul_ref(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if let Some(q) = other.as_rational() {
            return self.scale(&q);
        }
        if let Some(q) = self.as_rational() {
            return other.scale(&q);
        }
        let mut map = TermMap::new();
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in other.terms.iter() {
                accumulate(&mut map, ma.mul(mb), ca * cb);
            }
        }
        finalize(map, true)
    }

    /// Sum of many expressions with a single canonicalization pass.
    pub fn sum<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut map = TermMap::new();
        for e in items {
            for (m, c) in e.terms.iter() {
                accumulate(&mut map, m.clone(), c.clone());
            }
        }
        finalize(map, false)
    }

    pub fn product<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        items
            .into_iter()
            .fold(Expr::one(), |acc, e| acc.mul_ref(&e))
    }

    /// Non-negative integer power.
    pub fn powi(&self, k: u32) -> Expr {
        let mut result = Expr::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_ref(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_ref(&base);
            }
        }
        result
    }

    pub fn pow(&self, k: i64) -> Result<Expr, ExprError> {
        let mag = u32::try_from(k.unsigned_abs())
            .map_err(|_| ExprError::UnsupportedForm(format!("exponent {k} out of range")))?;
        if k >= 0 {
            Ok(self.powi(mag))
        } else {
            Ok(self.recip()?.powi(mag))
        }
    }

    /// Multiplicative inverse.
    pub fn recip(&self) -> Result<Expr, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero(String::from("reciprocal of 0")));
        }
        if let [(m, c)] = self.terms.as_slice() {
            let (plain, recips) = m.split_recips();
            let mut out = Expr::term(plain.inverse(), c.recip());
            for (b, k) in recips {
                out = out.mul_ref(&b.powi(k as u32));
            }
            return Ok(out);
        }
        let (num, dens) = self.together();
        let mut out = recip_polynomial(&num);
        for (b, k) in dens {
            out = out.mul_ref(&b.powi(k as u32));
        }
        Ok(out)
    }

    pub fn div(&self, other: &Expr) -> Result<Expr, ExprError> {
        Ok(self.mul_ref(&other.recip()?))
    }

    /// Numerator and denominator factors: `self = num · Π base^(-k)`, with `num`
    /// reciprocal-free.
    pub fn together(&self) -> (Expr, Vec<(Expr, i32)>) {
        let mut dens: BTreeMap<Expr, i32> = BTreeMap::new();
        for (m, _) in self.terms.iter() {
            for (a, e) in &m.0 {
                if let Atom::Recip(b) = a {
                    let slot = dens.entry(b.clone()).or_insert(0);
                    *slot = (*slot).max(*e);
                }
            }
        }
        if dens.is_empty() {
            return (self.clone(), Vec::new());
        }
        let mut power_cache: BTreeMap<(Expr, i32), Expr> = BTreeMap::new();
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms.iter() {
            let (plain, recips) = m.split_recips();
            let mut t = Expr::term(plain, c.clone());
            for (b, k) in &dens {
                let have = recips
                    .iter()
                    .find(|(rb, _)| rb == b)
                    .map(|(_, e)| *e)
                    .unwrap_or(0);
                let need = k - have;
                if need > 0 {
                    let p = power_cache
                        .entry((b.clone(), need))
                        .or_insert_with(|| b.powi(need as u32))
                        .clone();
                    t = t.mul_ref(&p);
                }
            }
            parts.push(t);
        }
        (Expr::sum(parts), dens.into_iter().collect())
    }

    /// Exact quotient `self / divisor`, if one exists in the polynomial ring over
    /// the atoms. Both operands must be reciprocal-free.
    pub(crate) fn exact_div(&self, divisor: &Expr) -> Option<Expr> {
        if divisor.is_zero() || self.has_reciprocals() || divisor.has_reciprocals() {
            return None;
        }
        if self.is_zero() {
            return Some(Expr::zero());
        }
        if divisor.terms.len() == 1 {
            return divisor.recip().ok().map(|r| self.mul_ref(&r));
        }
        let shift_n = laurent_shift(self);
        let shift_d = laurent_shift(divisor);
        let n: TermMap = self
            .terms
            .iter()
            .map(|(m, c)| (m.mul(&shift_n), c.clone()))
            .collect();
        let d: Vec<(Monomial, Q)> = divisor
            .terms
            .iter()
            .map(|(m, c)| (m.mul(&shift_d), c.clone()))
            .collect();
        let q = raw_divide(n, &d)?;
        // n/d = (n'/d') · shift_d / shift_n
        let correction = shift_d.div(&shift_n);
        let map: TermMap = q
            .into_iter()
            .map(|(m, c)| (m.mul(&correction), c))
            .collect();
        Some(finalize(map, true))
    }

    /// Public exact-division test: `Some(q)` with `self = q · divisor`.
    pub fn divide_exact(&self, divisor: &Expr) -> Option<Expr> {
        let q = self.exact_div(divisor)?;
        debug_assert!((&q * divisor - self).is_zero());
        Some(q)
    }

    /// `Some(c)` with `self = c · other` for a rational `c`.
    pub fn rational_multiple_of(&self, other: &Expr) -> Option<Q> {
        if other.is_zero() {
            return None;
        }
        let (ma, ca) = self.leading_term()?;
        let (mb, cb) = other.leading_term()?;
        if ma != mb {
            return None;
        }
        let c = ca / cb;
        (self - &other.scale(&c)).is_zero().then_some(c)
    }
}

fn accumulate(map: &mut TermMap, m: Monomial, c: Q) {
    use std::collections::btree_map::Entry;
    match map.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Monomial `s` such that every term of `e·s` has non-negative exponents.
fn laurent_shift(e: &Expr) -> Monomial {
    let mut mins: BTreeMap<Atom, i32> = BTreeMap::new();
    for (m, _) in e.terms.iter() {
        for (a, k) in &m.0 {
            if *k < 0 {
                let slot = mins.entry(a.clone()).or_insert(0);
                *slot = (*slot).min(*k);
            }
        }
    }
    Monomial(mins.into_iter().map(|(a, k)| (a, -k)).collect())
}

/// Polynomial long division in the free polynomial ring over the atoms (no trig
/// relation), lex order. Returns `None` unless the division is exact.
fn raw_divide(mut rem: TermMap, divisor: &[(Monomial, Q)]) -> Option<TermMap> {
    let (lm, lc) = divisor.iter().max_by(|a, b| lex_cmp(&a.0, &b.0))?.clone();
    let mut quotient = TermMap::new();
    let mut steps = 0usize;
    while let Some((m, c)) = rem
        .iter()
        .max_by(|a, b| lex_cmp(a.0, b.0))
        .map(|(m, c)| (m.clone(), c.clone()))
    {
        steps += 1;
        if steps > 20_000 || !lm.divides(&m) {
            return None;
        }
        let qm = m.div(&lm);
        let qc = &c / &lc;
        for (dm, dc) in divisor {
            accumulate(&mut rem, qm.mul(dm), -(&qc * dc));
        }
        accumulate(&mut quotient, qm, qc);
    }
    Some(quotient)
}

/// `1 / p` for a reciprocal-free polynomial with at least two terms.
fn recip_polynomial(p: &Expr) -> Expr {
    if p.terms.len() == 1 {
        return p.recip().expect("nonzero single term");
    }
    // monomial content: per-atom minimum exponent over all terms
    let atoms: std::collections::BTreeSet<&Atom> = p
        .terms
        .iter()
        .flat_map(|(m, _)| m.0.iter().map(|(a, _)| a))
        .collect();
    let content: Vec<(Atom, i32)> = atoms
        .into_iter()
        .filter_map(|a| {
            let k = p
                .terms
                .iter()
                .map(|(m, _)| m.exponent(a))
                .min()
                .unwrap_or(0);
            (k != 0).then(|| (a.clone(), k))
        })
        .collect();
    let content = Monomial(content);
    let shifted: Vec<(Monomial, Q)> = p
        .terms
        .iter()
        .map(|(m, c)| (m.div(&content), c.clone()))
        .collect();
    let lc = shifted
        .iter()
        .max_by(|a, b| lex_cmp(&a.0, &b.0))
        .map(|(_, c)| c.clone())
        .expect("nonempty");
    let mut base: Vec<(Monomial, Q)> = shifted.into_iter().map(|(m, c)| (m, c / &lc)).collect();
    base.sort_by(|a, b| a.0.cmp(&b.0));
    let base = Expr::from_sorted(base);
    let m = content
        .inverse()
        .mul(&Monomial::single(Atom::Recip(base), 1));
    Expr::term(m, lc.recip())
}

/// Canonicalize a term map. `trig` requests the `sin²` rewrite pass.
fn finalize(map: TermMap, trig: bool) -> Expr {
    let map = if trig { reduce_trig(map) } else { map };
    if map.keys().any(|m| m.has_recip()) {
        return together_cancel(map);
    }
    Expr::from_sorted(map.into_iter().collect())
}

fn reduce_trig(map: TermMap) -> TermMap {
    let needs = |m: &Monomial| {
        m.0.iter()
            .any(|(a, e)| *e >= 2 && matches!(a, Atom::Func(Func::Sin, _)))
    };
    if !map.keys().any(needs) {
        return map;
    }
    let mut out = TermMap::new();
    let mut work: Vec<(Monomial, Q)> = map.into_iter().collect();
    while let Some((m, c)) = work.pop() {
        let pos =
            m.0.iter()
                .position(|(a, e)| *e >= 2 && matches!(a, Atom::Func(Func::Sin, _)));
        match pos {
            None => accumulate(&mut out, m, c),
            Some(i) => {
                let arg = match &m.0[i].0 {
                    Atom::Func(_, a) => a.clone(),
                    _ => unreachable!(),
                };
                let mut lowered = m.clone();
                lowered.0[i].1 -= 2;
                if lowered.0[i].1 == 0 {
                    lowered.0.remove(i);
                }
                let with_cos = lowered.mul(&Monomial::single(Atom::Func(Func::Cos, arg), 2));
                work.push((with_cos, -c.clone()));
                work.push((lowered, c));
            }
        }
    }
    out
}

fn together_cancel(map: TermMap) -> Expr {
    let raw = Expr::from_sorted(map.into_iter().collect());
    let (mut num, dens) = raw.together();
    if num.is_zero() {
        return Expr::zero();
    }
    let mut kept: Vec<(Expr, i32)> = Vec::new();
    for (base, mut k) in dens {
        while k > 0 {
            match num.exact_div(&base) {
                Some(q) => {
                    num = q;
                    k -= 1;
                }
                None => break,
            }
        }
        if k > 0 {
            kept.push((base, k));
        }
    }
    let den_mono = Monomial(
        kept.into_iter()
            .map(|(b, k)| (Atom::Recip(b), k))
            .collect::<Vec<_>>(),
    );
    let mut den_mono = den_mono;
    den_mono.0.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(Monomial, Q)> = num
        .terms
        .iter()
        .map(|(m, c)| (m.mul(&den_mono), c.clone()))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Expr::from_sorted(out)
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                std::ops::$tr::$method(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                std::ops::$tr::$method(&self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                std::ops::$tr::$method(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_ref(b));
binop!(Sub, sub, |a, b| a.add_ref(&-b));
binop!(Mul, mul, |a, b| a.mul_ref(b));

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::from_sorted(self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        Expr::sym(s)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::sum(iter)
    }
}
