//! Exact and numerical dispersion relations for the one-dimensional
//! Maxwell–Lorentz system under finite-difference and discontinuous Galerkin
//! discretizations with leap-frog or trapezoidal time stepping.

pub mod dg;
pub mod error;
pub mod fd;
pub mod medium;
pub mod modes;
pub mod omega_solver;
pub mod poly;
pub mod quantities;
pub mod scheme;
pub mod stepper;
pub mod temporal;

pub use error::{DispersionError, Result};
pub use medium::{Branch, ComplexWavenumber, LorentzMedium};
pub use scheme::{Mesh, SchemeSpec, Spatial};
