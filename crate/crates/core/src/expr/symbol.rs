use std::fmt;
use std::sync::Arc;

/// Independent coordinates. `W` is the similarity variable used by reduced systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    T,
    X,
    Y,
    W,
}

impl Coord {
    pub const ALL: [Coord; 4] = [Coord::T, Coord::X, Coord::Y, Coord::W];
    /// The three coordinates of the shallow-water systems.
    pub const TXY: [Coord; 3] = [Coord::T, Coord::X, Coord::Y];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::T => "t",
            Coord::X => "x",
            Coord::Y => "y",
            Coord::W => "w",
        }
    }

    pub fn from_char(c: char) -> Option<Coord> {
        match c {
            't' => Some(Coord::T),
            'x' => Some(Coord::X),
            'y' => Some(Coord::Y),
            'w' => Some(Coord::W),
            _ => None,
        }
    }
}

impl serde::Serialize for Coord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Dependent variables: `h, u, v` of the PDE systems and `H, U, V` of the reduced ODEs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    H,
    U,
    V,
    BigH,
    BigU,
    BigV,
}

impl Field {
    /// PDE dependents in system order.
    pub const HUV: [Field; 3] = [Field::H, Field::U, Field::V];
    /// Reduced-system states in order.
    pub const STATES: [Field; 3] = [Field::BigH, Field::BigU, Field::BigV];

    pub fn name(self) -> &'static str {
        match self {
            Field::H => "h",
            Field::U => "u",
            Field::V => "v",
            Field::BigH => "H",
            Field::BigU => "U",
            Field::BigV => "V",
        }
    }

    pub fn from_char(c: char) -> Option<Field> {
        match c {
            'h' => Some(Field::H),
            'u' => Some(Field::U),
            'v' => Some(Field::V),
            'H' => Some(Field::BigH),
            'U' => Some(Field::BigU),
            'V' => Some(Field::BigV),
            _ => None,
        }
    }
}

/// A jet coordinate: a dependent variable together with a derivative multi-index
/// over `(t, x, y, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Jet {
    pub field: Field,
    pub orders: [u8; 4],
}

impl Jet {
    pub fn base(field: Field) -> Jet {
        Jet {
            field,
            orders: [0; 4],
        }
    }

    pub fn order(&self) -> u32 {
        self.orders.iter().map(|&o| o as u32).sum()
    }

    /// The jet obtained by one more differentiation along `c`.
    pub fn raised(&self, c: Coord) -> Jet {
        let mut orders = self.orders;
        orders[c.index()] += 1;
        Jet {
            field: self.field,
            orders,
        }
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.field.name())?;
        if self.order() > 0 {
            f.write_str("_")?;
            for c in Coord::ALL {
                for _ in 0..self.orders[c.index()] {
                    f.write_str(c.name())?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Coordinate,
    Jet,
    Parameter,
    IntegrationConstant,
}

/// A named symbol. Names are unique within a kind.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Coord(Coord),
    Jet(Jet),
    Param(Arc<str>),
    Const(Arc<str>),
}

impl Symbol {
    pub fn param(name: &str) -> Symbol {
        Symbol::Param(Arc::from(name))
    }

    pub fn constant(name: &str) -> Symbol {
        Symbol::Const(Arc::from(name))
    }

    pub fn jet(field: Field, derivs: &[Coord]) -> Symbol {
        let mut j = Jet::base(field);
        for &c in derivs {
            j = j.raised(c);
        }
        Symbol::Jet(j)
    }

    pub fn kind(&self) -> SymbolKind {
        match self {
            Symbol::Coord(_) => SymbolKind::Coordinate,
            Symbol::Jet(_) => SymbolKind::Jet,
            Symbol::Param(_) => SymbolKind::Parameter,
            Symbol::Const(_) => SymbolKind::IntegrationConstant,
        }
    }

    /// Parameters and integration constants: symbols that never vary over the domain.
    pub fn is_constant_like(&self) -> bool {
        matches!(self, Symbol::Param(_) | Symbol::Const(_))
    }

    /// Classify an identifier the way the text format does.
    ///
    /// `t x y w` are coordinates; `h u v H U V`, optionally followed by `_` and a
    /// run of coordinate letters, are jet variables; `H0 U0 V0` and `C<digits>`
    /// are integration constants; any other identifier is a parameter.
    pub fn from_identifier(id: &str) -> Symbol {
        let mut chars = id.chars();
        if id.len() == 1 {
            let c = id.chars().next().unwrap();
            if let Some(coord) = Coord::from_char(c) {
                return Symbol::Coord(coord);
            }
            if let Some(field) = Field::from_char(c) {
                return Symbol::Jet(Jet::base(field));
            }
        }
        if matches!(id, "H0" | "U0" | "V0")
            || (id.len() > 1 && id.starts_with('C') && id[1..].chars().all(|c| c.is_ascii_digit()))
        {
            return Symbol::constant(id);
        }
        if let (Some(first), Some('_')) = (chars.next(), chars.next()) {
            if let Some(field) = Field::from_char(first) {
                let rest = &id[2..];
                if !rest.is_empty() {
                    let mut jet = Jet::base(field);
                    let mut ok = true;
                    for c in rest.chars() {
                        match Coord::from_char(c) {
                            Some(coord) => jet = jet.raised(coord),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        return Symbol::Jet(jet);
                    }
                }
            }
        }
        Symbol::param(id)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Coord(c) => f.write_str(c.name()),
            Symbol::Jet(j) => j.fmt(f),
            Symbol::Param(n) | Symbol::Const(n) => f.write_str(n),
        }
    }
}

/// Well-known parameter names.
pub mod names {
    pub const OMEGA: &str = "Omega";
    pub const OMEGA_Y: &str = "Omega_y";
    pub const OMEGA_Z: &str = "Omega_z";
    pub const GRAVITY: &str = "g";
    pub const EPS: &str = "eps";
}
