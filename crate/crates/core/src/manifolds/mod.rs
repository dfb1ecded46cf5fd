//! Truncated spectral discretizations of the three model geometries.
//!
//! Each builder produces a [`SpectralModel`] holding the stiffness
//! matrix `K` (discretized -Laplacian in an L2-orthonormal basis) and
//! the damping multiplication matrix `A`, both Hermitian PSD.

mod damping;
mod model;
mod revolution;
mod sphere;
pub mod sphharm;
mod torus;

pub use damping::{DampingKind, DampingSpec, GeometryKind, TrigTerm, DEFAULT_CHECK_RESOLUTION};
pub use model::{BasisLabel, ModelGeometry, QuadratureInfo, SpectralModel};
pub use revolution::{build_revolution_model, RevolutionProfile};
pub use sphere::build_sphere_model;
pub use torus::build_torus_model;
