//! Command-line driver: `verify`, `tables`, `reduce`, `integrate`, `residual`.
//!
//! Every subcommand prints one JSON document on stdout. With `--out DIR` the
//! same document and any auxiliary files (table text, trajectory CSV, event
//! sidecars) are written below `DIR`.

mod commands;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::expr::{names, Bindings, Expr, ExprError, Symbol};
use crate::ode::OdeError;
use crate::reductions::{ReductionError, ReductionKind};
use crate::swe::SystemKind;

/// Exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// A check failed (unresolved generator, acceptance-relevant failure).
    pub const FAILED: i32 = 2;
    pub const USAGE: i32 = 64;
    pub const NO_INPUT: i32 = 66;
    pub const SOFTWARE: i32 = 70;
    pub const IO: i32 = 74;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("fixture not found: {0}")]
    MissingFixture(String),
    #[error("{0}")]
    Internal(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::MissingFixture(_) => exit::NO_INPUT,
            CliError::Internal(_) => exit::SOFTWARE,
            CliError::Io { .. } => exit::IO,
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::MissingFixture(p) => CliError::MissingFixture(p),
            AlgebraError::UnknownLabel(_) | AlgebraError::Fixture { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::MissingFixture(p) => CliError::MissingFixture(p),
            ReductionError::Fixture { .. } | ReductionError::Range { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<OdeError> for CliError {
    fn from(e: OdeError) -> Self {
        match e {
            OdeError::NonFinite { .. } => CliError::Internal(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> Self {
        CliError::Internal(e.to_string())
    }
}

/// A parameter value: a finite number or left symbolic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamValue {
    Numeric(f64),
    Symbolic,
}

impl std::str::FromStr for ParamValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "symbolic" {
            return Ok(ParamValue::Symbolic);
        }
        match s.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(ParamValue::Numeric(x)),
            _ => Err(format!("`{s}` is neither a finite number nor `symbolic`")),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "swe-sym",
    version,
    about = "Symmetry checks, tables and similarity reductions for rotating shallow water"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug, Default)]
pub struct Common {
    /// general, equator or pole
    #[arg(long, global = true)]
    pub system: Option<SystemKind>,
    /// Rotation rate; on the general system it sets both components unless they are given.
    #[arg(long, global = true)]
    pub omega: Option<ParamValue>,
    #[arg(long = "omega-y", global = true)]
    pub omega_y: Option<ParamValue>,
    #[arg(long = "omega-z", global = true)]
    pub omega_z: Option<ParamValue>,
    /// Gravitational acceleration.
    #[arg(long, global = true)]
    pub g: Option<ParamValue>,
    /// Directory for report files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory holding `tables/`, `equations/` and `figures/` overrides.
    #[arg(long, global = true)]
    pub fixtures: Option<PathBuf>,
    /// Comparison or integration tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check each catalog generator against its system.
    Verify {
        /// Maximum number of edits tried when a printed generator fails.
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Computed commutator and adjoint tables with cell-level diffs.
    Tables {
        /// Restrict to these fixtures (repeatable).
        #[arg(long = "table")]
        tables: Vec<String>,
    },
    /// Derived reduced systems, singular loci and comparison with the transcriptions.
    Reduce {
        #[arg(long)]
        reduction: Option<ReductionKind>,
    },
    /// Integrate a reduced system from a figure fixture or a custom state.
    Integrate(IntegrateArgs),
    /// Finite-difference residual of reconstructed fields in the full equations.
    Residual(ResidualArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Dp45,
    Rk4,
    Euler,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    /// Figure fixture name (fig1, fig2).
    #[arg(long, conflicts_with_all = ["reduction", "ic"])]
    pub figure: Option<String>,
    #[arg(long, requires = "ic")]
    pub reduction: Option<ReductionKind>,
    /// Initial state `H,U,V`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ic: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Dp45)]
    pub method: MethodArg,
    /// Step of the fixed-step methods.
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ResidualArgs {
    #[arg(long)]
    pub reduction: ReductionKind,
    /// Initial state `H,U,V`; for the closed form, the constants `H0,U0,V0`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ic: Option<Vec<f64>>,
    /// Use the constant state given by `--ic` instead of integrating.
    #[arg(long)]
    pub constant: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    /// Finite-difference spacings.
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 5e-3, 2.5e-3])]
    pub deltas: Vec<f64>,
}

/// Files produced by a command, relative to `--out`.
#[derive(Default)]
pub struct Output {
    pub report: String,
    pub files: Vec<(PathBuf, String)>,
    pub code: i32,
}

impl Common {
    fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
            }
        }
        Ok(())
    }

    /// Numeric values given on the command line for the parameters of `kind`.
    fn numeric(&self, kind: SystemKind) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        let mut push = |name, v: Option<ParamValue>| {
            if let Some(ParamValue::Numeric(x)) = v {
                out.push((name, x));
            }
        };
        match kind {
            SystemKind::General => {
                push(names::OMEGA_Y, self.omega_y.or(self.omega));
                push(names::OMEGA_Z, self.omega_z.or(self.omega));
            }
            _ => push(names::OMEGA, self.omega),
        }
        push(names::GRAVITY, self.g);
        out
    }

    /// Fully numeric bindings for `kind`, falling back to `defaults`.
    fn bindings(
        &self,
        kind: SystemKind,
        defaults: &BTreeMap<String, f64>,
    ) -> Result<Bindings, CliError> {
        let mut b: Bindings = defaults
            .iter()
            .map(|(k, v)| (Symbol::param(k), *v))
            .collect();
        for (k, v) in self.numeric(kind) {
            b.insert(Symbol::param(k), v);
        }
        let needed: &[&str] = match kind {
            SystemKind::General => &[names::OMEGA_Y, names::OMEGA_Z, names::GRAVITY],
            _ => &[names::OMEGA, names::GRAVITY],
        };
        for n in needed {
            if !b.contains_key(&Symbol::param(n)) {
                return Err(CliError::Usage(format!(
                    "a numeric value for {n} is required"
                )));
            }
        }
        Ok(b)
    }

    fn exact(&self, kind: SystemKind) -> Result<BTreeMap<Symbol, Expr>, CliError> {
        self.numeric(kind)
            .into_iter()
            .map(|(k, x)| {
                Expr::from_f64(x)
                    .map(|e| (Symbol::param(k), e))
                    .ok_or_else(|| CliError::Usage(format!("{k} = {x} has no exact rational form")))
            })
            .collect()
    }
}

fn parse_state(v: &[f64], what: &str) -> Result<[f64; 3], CliError> {
    match v {
        [a, b, c] if v.iter().all(|x| x.is_finite()) => Ok([*a, *b, *c]),
        _ => Err(CliError::Usage(format!(
            "{what} needs three finite values H,U,V"
        ))),
    }
}

fn write_files(dir: &Path, name: &str, out: &Output) -> Result<(), CliError> {
    let io = |path: &Path, source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let main = (PathBuf::from(format!("{name}.json")), out.report.clone());
    for (rel, text) in std::iter::once(&main).chain(&out.files) {
        let path = dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
        }
        std::fs::write(&path, text).map_err(|e| io(&path, e))?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    cli.common.validate()?;
    let (name, out) = match &cli.command {
        Command::Verify { depth } => ("verify", commands::verify(&cli.common, *depth)?),
        Command::Tables { tables } => ("tables", commands::tables(&cli.common, tables)?),
        Command::Reduce { reduction } => ("reduce", commands::reduce(&cli.common, *reduction)?),
        Command::Integrate(a) => ("integrate", commands::integrate(&cli.common, a)?),
        Command::Residual(a) => ("residual", commands::residual(&cli.common, a)?),
    };
    if let Some(dir) = &cli.common.out {
        write_files(dir, name, &out)?;
    }
    Ok(out)
}

/// Parse `args`, run the subcommand and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return exit::USAGE;
            }
            let _ = write!(stdout, "{e}");
            return exit::OK;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            if stdout.write_all(out.report.as_bytes()).is_err() {
                return exit::IO;
            }
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_values() {
        assert_eq!("symbolic".parse::<ParamValue>(), Ok(ParamValue::Symbolic));
        assert_eq!("0.5".parse::<ParamValue>(), Ok(ParamValue::Numeric(0.5)));
        assert!("inf".parse::<ParamValue>().is_err());
        assert!("x".parse::<ParamValue>().is_err());
    }

    #[test]
    fn general_omega_fills_both_components() {
        let c = Common {
            omega: Some(ParamValue::Numeric(2.0)),
            omega_z: Some(ParamValue::Numeric(3.0)),
            ..Default::default()
        };
        assert_eq!(
            c.numeric(SystemKind::General),
            vec![(names::OMEGA_Y, 2.0), (names::OMEGA_Z, 3.0)]
        );
    }
}
