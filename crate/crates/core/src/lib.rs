//! Numerical core for quasiconformal geometry on adelic and p-adic solenoids.
//!
//! The crate is `no_std` with `alloc`. Enabling the default `std` feature only
//! switches the float kernels from `libm` to the platform math library.
//!
//! Layout, bottom-up:
//!
//! * [`chain`], [`profinite`], [`solenoid`], [`degree`]: truncated points of the
//!   solenoid and structure maps at a finite depth of a divisibility chain.
//! * [`frequency`], [`series`]: Pontryagin series with exact rational frequencies.
//! * [`renorm`], [`admission`]: renormalization operators, renormalized norms
//!   and admission of Beltrami differentials.
//! * [`fft`], [`grid`], [`plane`]: the planar Beltrami solver used at one level.
//! * [`leaf`], [`tower`]: leafwise coefficients and the tower of coverings.
//! * [`teich`], [`counterexample`]: extensions, the Nag–Verjovsky coefficient and
//!   the non-renormalizable fixture.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod admission;
pub mod chain;
pub mod counterexample;
pub mod degree;
mod error;
pub mod fft;
pub mod frequency;
pub mod grid;
pub mod leaf;
pub mod plane;
pub mod profinite;
pub mod renorm;
pub mod series;
pub mod solenoid;
pub mod teich;
pub mod tower;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use chain::{Chain, ChainKind};
pub use frequency::Frequency;
pub use profinite::ProfiniteInt;
pub use series::PontryaginSeries;
pub use solenoid::SolenoidPoint;

/// Default tolerance for algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

pub(crate) const TAU: f64 = core::f64::consts::TAU;
pub(crate) const PI: f64 = core::f64::consts::PI;
