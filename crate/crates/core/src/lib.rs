//! Bound-state energies of attractive Dirac-delta potentials.
//!
//! The one-dimensional well is solved by four independent routes (direct
//! integration of the Schrödinger equation, distributional calculus, the
//! quadratic form, and the pole of the resolvent) and checked against the
//! closed form. In two dimensions the crate builds the unique continuous
//! radial solution matched on the circle `I₀(u₀) = K₀(u₀)` and evaluates
//! its C-spectrum energy.
//!
//! All supporting numerics are implemented here: modified Bessel functions
//! ([`bessel`]), adaptive Gauss-Kronrod quadrature ([`quad`]), bracketed
//! root finding ([`roots`]), and a small numerical distribution calculus
//! ([`distrib`]).

pub mod bessel;
pub mod distrib;
pub mod quad;
pub mod roots;
pub mod well1d;
pub mod well2d;

mod error;

pub use error::Error;
