//! Parabolic semigroups of holomorphic self-maps of the unit disk.
//!
//! A semigroup is described by its infinitesimal generator
//! `f(z) = a(1-z)^(1+α) + b(1-z)^(1+α+β) + R(z)` with Denjoy–Wolff point 1.
//! The crate integrates trajectories (in the disk and, after the Cayley
//! transform, in the right half-plane), evaluates Kœnigs functions, and
//! compares numerical tails with the predicted asymptotic behaviour of
//! trajectories, their tangent lines, curvature and mutual position.
//!
//! All quantities that approach the Denjoy–Wolff point are carried through
//! the gap `1 - z` or the lifted coordinate `(Φ + 1)^α`, never by
//! subtracting nearly equal numbers.

pub mod asymptotics;
pub mod error;
pub mod extrapolate;
pub mod fmt;
pub mod flow;
pub mod generators;
pub mod geometry;
pub mod koenigs;
mod ode;
pub mod quad;
pub mod rigidity;
mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
