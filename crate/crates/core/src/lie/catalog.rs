//! Generator catalogs, transcribed as printed.
//!
//! Component order is `t, x, y, h, u, v`. `Omega` is the rotation rate of the
//! specialized systems. Entries whose printed form fails the symmetry test also
//! carry the corrected form listed in the errata.

use serde::Serialize;

use super::VectorField;
use crate::swe::{PdeSystem, SystemKind};

const S: &str = "sin(2*Omega*t)";
const C: &str = "cos(2*Omega*t)";

/// One generator of a catalog.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub label: &'static str,
    pub printed: [String; 6],
    /// Corrected components, present only when the printed form is defective.
    pub corrected: Option<[String; 6]>,
}

impl CatalogEntry {
    fn new(label: &'static str, printed: [&str; 6]) -> CatalogEntry {
        CatalogEntry {
            label,
            printed: printed.map(expand),
            corrected: None,
        }
    }

    fn with_correction(mut self, slot: usize, text: &str) -> CatalogEntry {
        let mut c = self
            .corrected
            .take()
            .unwrap_or_else(|| self.printed.clone());
        c[slot] = expand(text);
        self.corrected = Some(c);
        self
    }

    pub fn printed_field(&self) -> VectorField {
        parse_field(self.label, &self.printed)
    }

    /// The corrected field when one is documented, otherwise the printed one.
    pub fn field(&self) -> VectorField {
        parse_field(self.label, self.corrected.as_ref().unwrap_or(&self.printed))
    }
}

fn expand(s: &str) -> String {
    s.replace('S', S).replace('C', C)
}

fn parse_field(label: &str, texts: &[String; 6]) -> VectorField {
    let refs = [0, 1, 2, 3, 4, 5].map(|i| texts[i].as_str());
    VectorField::parse(refs)
        .unwrap_or_else(|e| panic!("catalog entry {label}: {e}"))
        .labelled(label)
}

/// A named generator set together with the system it belongs to.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub system: SystemKind,
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn pde(&self) -> PdeSystem {
        PdeSystem::build(self.system, Default::default())
    }

    /// Generators with documented corrections applied.
    pub fn fields(&self) -> Vec<VectorField> {
        self.entries.iter().map(CatalogEntry::field).collect()
    }

    pub fn printed_fields(&self) -> Vec<VectorField> {
        self.entries
            .iter()
            .map(CatalogEntry::printed_field)
            .collect()
    }

    pub fn labels(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.label).collect()
    }
}

/// The catalog for a latitude regime: `X1-X3`, `Y1-Y5` or `Z1-Z9`.
pub fn catalog(kind: SystemKind) -> Catalog {
    let entries = match kind {
        SystemKind::General => vec![
            CatalogEntry::new("X1", ["1", "0", "0", "0", "0", "0"]),
            CatalogEntry::new("X2", ["0", "1", "0", "0", "0", "0"]),
            CatalogEntry::new("X3", ["0", "0", "1", "0", "0", "0"]),
        ],
        SystemKind::Equator => vec![
            CatalogEntry::new("Y1", ["1", "0", "0", "0", "0", "0"]),
            CatalogEntry::new("Y2", ["0", "1", "0", "0", "0", "0"]),
            CatalogEntry::new("Y3", ["0", "0", "1", "0", "0", "0"]),
            CatalogEntry::new("Y4", ["t", "x", "y", "0", "0", "0"]),
            // printed as d_V; the velocity v is meant
            CatalogEntry::new("Y5", ["0", "0", "t", "0", "0", "1"]),
        ],
        SystemKind::Pole => vec![
            CatalogEntry::new("Z1", ["1", "0", "0", "0", "0", "0"]),
            CatalogEntry::new("Z2", ["0", "1", "0", "0", "0", "0"]),
            CatalogEntry::new("Z3", ["0", "0", "1", "0", "0", "0"]),
            CatalogEntry::new("Z4", ["0", "x", "y", "2*h", "u", "v"]),
            CatalogEntry::new("Z5", ["0", "y", "-x", "0", "v", "-u"]),
            CatalogEntry::new("Z6", ["0", "S", "C", "0", "2*Omega*C", "-2*Omega*S"]),
            CatalogEntry::new("Z7", ["0", "-C", "S", "0", "2*Omega*S", "2*Omega*C"]),
            CatalogEntry::new(
                "Z8",
                [
                    "S",
                    "Omega*(x*C + y*S)",
                    "-Omega*(x*S - y*C)",
                    "-2*Omega*h*C",
                    "-Omega*(u*C - v*S - 2*Omega*(y*C - x*S))",
                    "-Omega*(u*S + u*C + 2*Omega*(y*S + x*C))",
                ],
            )
            .with_correction(5, "-Omega*(u*S + v*C + 2*Omega*(y*S + x*C))"),
            CatalogEntry::new(
                "Z9",
                [
                    "C",
                    "Omega*(y*C - x*S)",
                    "-Omega*(x*C + y*S)",
                    "2*Omega*S",
                    "Omega*(u*S + v*C - 2*Omega*(x*C + y*S))",
                    "Omega*(-u*C + v*S + Omega*(x*S - y*C))",
                ],
            )
            .with_correction(3, "2*Omega*S*h")
            .with_correction(5, "Omega*(-u*C + v*S + 2*Omega*(x*S - y*C))"),
        ],
    };
    Catalog {
        system: kind,
        entries,
    }
}

/// Look up a generator by label across all catalogs.
pub fn catalog_entry(label: &str) -> Option<CatalogEntry> {
    SystemKind::ALL
        .into_iter()
        .flat_map(|k| catalog(k).entries)
        .find(|e| e.label == label)
}
