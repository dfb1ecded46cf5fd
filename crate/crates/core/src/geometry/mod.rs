//! Geodesic flow on the unit cosphere bundle p^{-1}(1), p = |xi|^2:
//! exact flows on the torus and sphere, adaptive integration on
//! surfaces of revolution, damping averages along orbits, geometric
//! control sampling, and linearized Poincare maps.

mod averages;
mod flows;
mod poincare;

pub use averages::{
    check_geometric_control, estimate_A, trajectory_average, ACurve, ControlVerdict,
    ControlResult, SamplingGrid,
};
pub use flows::{
    geodesic_flow, revolution_state, sphere_state, torus_state, FlowGeometry, FlowProfile,
    GeodesicOrbit, State,
};
pub use poincare::{poincare_map, OrbitClass, PoincareData};
