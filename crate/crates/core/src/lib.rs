//! Radial decreasing profiles in the plane and the Trudinger–Moser functional.
//!
//! A profile is the decreasing rearrangement `u*` of a radial function, stored as
//! piecewise linear data in the coordinate `s = log(T_sup/t)`.

pub mod cli;
pub mod equivalence;
pub mod error;
pub mod inequalities;
pub mod optimizer;
pub mod profile;
pub mod quadrature;
pub mod rearrangement;
pub mod sequences;

pub use error::{Error, Result};
pub use profile::{FunctionalReport, Join, Knot, RadialProfile, DEFAULT_TOL, FOUR_PI};
pub use sequences::{Family, SequenceSpec};
