//! Numerical laboratory for the damped wave equation on model compact
//! surfaces (flat 2-torus, round 2-sphere, surfaces of revolution).
//!
//! The crate discretizes the generator of the damped wave group in a
//! truncated orthonormal basis, computes eigenfrequencies of the
//! associated quadratic pencil, scans resolvent norms, integrates the
//! geodesic flow to estimate damping averages and geometric control,
//! and validates modal/cluster expansions of the propagator together
//! with energy decay rates.

pub mod error;
pub mod linalg;
pub mod ode;
pub mod par;

pub mod manifolds;
pub mod spectra;
pub mod geometry;
pub mod dynamics;
pub mod report;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type CMat = ndarray::Array2<C64>;
pub type CVec = ndarray::Array1<C64>;

pub const IM: C64 = C64 { re: 0.0, im: 1.0 };
