//! Aharonov-Bohm scattering off a flux-carrying cylinder.
//!
//! The crate computes stationary scattering states of a charged particle
//! hitting an infinitely long cylinder of radius `R` that contains a
//! homogeneous magnetic field, either behind a finite step barrier `V0`
//! ([`finite`]) or behind an impenetrable wall with a curl-free exterior
//! gauge field of strength `kappa` ([`ideal`]). From those states it derives
//! the radial slope of `|psi|` on the cylinder surface and the force per unit
//! cylinder length exerted on the beam ([`force`]), plus the inference and
//! convergence procedures built on top of them ([`analysis`]).
//!
//! Units: `hbar = m = 1`, energies are `k^2 / 2`, the incident beam is a
//! unit-amplitude plane wave travelling along `+x`, and angles are measured
//! from the `+x` axis.

pub mod analysis;
pub mod error;
pub mod finite;
pub mod force;
pub mod ideal;
mod ode;
pub mod scaled;
pub mod scenario;
pub mod series;
pub mod specfun;

pub use error::{Error, Result};
pub use scenario::{Barrier, CylinderScenario};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
