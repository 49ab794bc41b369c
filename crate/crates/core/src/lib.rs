//! Lie point symmetries of the rotating shallow-water equations.

pub mod algebra;
#[cfg(feature = "cli")]
pub mod cli;
pub mod expr;
pub mod lie;
pub mod ode;
pub mod reductions;
pub mod report;
pub mod swe;
