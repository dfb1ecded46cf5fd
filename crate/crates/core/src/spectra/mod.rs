//! Spectral analysis of the damped wave generator: eigenfrequencies of
//! the quadratic pencil via the companion linearization, biorthogonal
//! spectral projectors, resolvent norms, band and cluster structure.

mod band;
mod cluster;
mod eig;
mod generator;
mod projector;
mod resolvent;

pub use band::{band_summary, BandReport};
pub use cluster::{cluster_partition, Cluster, ClusterReport};
pub use eig::{
    compute_eigenfrequencies, compute_eigenfrequencies_with, EigenRecord, Spectrum,
    DEFAULT_GROUP_TOL, DEFAULT_RESIDUAL_TOL,
};
pub use generator::{assemble_generator, GeneratorMatrix};
pub use projector::{spectral_projector, ModeTerm};
pub use resolvent::{
    pencil, resolvent_norm, resolvent_scan, semiclassical_norm, semiclassical_pencil,
    ResolventSpace, ScanPoint,
};
