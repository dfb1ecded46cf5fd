use crate::error::{Error, Result};
use crate::geometry::flows::{FlowGeometry, GeodesicOrbit};
use crate::ode::rk45;
use crate::C64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitClass {
    EllipticNondegenerate,
    Hyperbolic,
    Degenerate,
}

/// Linearized Poincare map of a closed geodesic on a symplectic
/// transversal of p^{-1}(1). For surfaces (n = 2) the transversal is
/// 2-dimensional and there is a single rotation angle.
#[derive(Debug, Clone)]
pub struct PoincareData {
    pub p_matrix: [[f64; 2]; 2],
    pub eigenvalues: [C64; 2],
    pub class: OrbitClass,
    /// alpha_1 in (0, pi], defined for the elliptic case.
    pub rotation_angle: Option<f64>,
    /// Largest N' <= N with k alpha_1 bounded away from 2 pi Z for all
    /// 0 < k <= N'; None when the check is skipped (degenerate).
    pub n_elementary_up_to: Option<u32>,
    pub det: f64,
}

pub fn poincare_map(
    geometry: &FlowGeometry,
    orbit: &GeodesicOrbit,
    n_max: u32,
) -> Result<PoincareData> {
    let (t_closed, dist) = orbit
        .closure
        .ok_or_else(|| Error::Geometry("orbit does not close".into()))?;
    if dist > 1e-6 {
        return Err(Error::Geometry(format!("closure distance {dist:e} too large")));
    }

    let p = match geometry {
        FlowGeometry::Torus => {
            // zero curvature: Jacobi J'' = 0 over the closed length L
            let l = 2.0 * t_closed;
            [[1.0, l], [0.0, 1.0]]
        }
        FlowGeometry::Sphere => [[1.0, 0.0], [0.0, 1.0]],
        FlowGeometry::Revolution(prof) => {
            // variational flow of (delta s, delta xi_s) around the orbit:
            // d/dt delta s = 2 delta xi_s,
            // d/dt delta xi_s = d/ds (2 xi_th^2 r'/r^3) delta s.
            let y0 = orbit.samples[0];
            let pr = prof.clone();
            let rhs = move |_t: f64, v: &[f64], dv: &mut [f64]| {
                let (s, xi_s, xi_th) = (v[0], v[2], v[3]);
                let r = (pr.r)(s);
                let d1 = (pr.dr)(s);
                let d2 = (pr.d2r)(s);
                dv[0] = 2.0 * xi_s;
                dv[1] = 2.0 * xi_th / (r * r);
                dv[2] = 2.0 * xi_th * xi_th * d1 / (r * r * r);
                dv[3] = 0.0;
                let c = 2.0 * xi_th * xi_th * (d2 / (r * r * r) - 3.0 * d1 * d1 / (r * r * r * r));
                // columns of the 2x2 variational matrix
                dv[4] = 2.0 * v[5];
                dv[5] = c * v[4];
                dv[6] = 2.0 * v[7];
                dv[7] = c * v[6];
            };
            let mut v = vec![y0[0], y0[1], y0[2], y0[3], 1.0, 0.0, 0.0, 1.0];
            rk45(&rhs, 0.0, t_closed, &mut v, 1e-12, 1e-14)?;
            [[v[4], v[6]], [v[5], v[7]]]
        }
    };

    let tr = p[0][0] + p[1][1];
    let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
    if (det - 1.0).abs() > 1e-8 {
        return Err(Error::Numerical(format!("Poincare map not symplectic: det = {det}")));
    }
    let disc = tr * tr - 4.0 * det;
    let eigenvalues = if disc >= 0.0 {
        let s = disc.sqrt();
        [C64::new((tr + s) / 2.0, 0.0), C64::new((tr - s) / 2.0, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [C64::new(tr / 2.0, s / 2.0), C64::new(tr / 2.0, -s / 2.0)]
    };

    let degenerate = eigenvalues
        .iter()
        .any(|e| (e - C64::new(1.0, 0.0)).norm() < 1e-6);
    let (class, rotation_angle, n_elementary_up_to) = if degenerate {
        (OrbitClass::Degenerate, None, None)
    } else if disc < 0.0 {
        let alpha = (tr / 2.0).clamp(-1.0, 1.0).acos();
        let mut n_ok = 0u32;
        for k in 1..=n_max {
            let d = (k as f64 * alpha).rem_euclid(2.0 * PI);
            if d.min(2.0 * PI - d) <= 1e-6 {
                break;
            }
            n_ok = k;
        }
        (OrbitClass::EllipticNondegenerate, Some(alpha), Some(n_ok))
    } else {
        (OrbitClass::Hyperbolic, None, None)
    };

    Ok(PoincareData { p_matrix: p, eigenvalues, class, rotation_angle, n_elementary_up_to, det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::flows::{
        geodesic_flow, revolution_state, sphere_state, torus_state, FlowProfile,
    };

    #[test]
    fn torus_shear_degenerate() {
        let y0 = torus_state([0.0, 0.0], [1.0, 0.0]);
        let orbit = geodesic_flow(&FlowGeometry::Torus, &y0, 4.0, 0.01).unwrap();
        let p = poincare_map(&FlowGeometry::Torus, &orbit, 10).unwrap();
        assert_eq!(p.class, OrbitClass::Degenerate);
        // closed length 2 pi
        assert!((p.p_matrix[0][1] - 2.0 * PI).abs() < 1e-8);
        assert!((p.det - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_identity_degenerate() {
        let y0 = sphere_state([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]);
        let orbit = geodesic_flow(&FlowGeometry::Sphere, &y0, 4.0, 0.01).unwrap();
        let p = poincare_map(&FlowGeometry::Sphere, &orbit, 10).unwrap();
        assert_eq!(p.class, OrbitClass::Degenerate);
        assert!((p.p_matrix[0][0] - 1.0).abs() < 1e-10 && p.p_matrix[0][1].abs() < 1e-10);
    }

    #[test]
    fn bulge_equator_rotation_angle_oracle() {
        let eps = 0.3;
        let prof = FlowProfile::bulge(eps);
        let s0 = PI / 2.0;
        let r0 = (prof.r)(s0);
        let geom = FlowGeometry::Revolution(prof.clone());
        let y0 = revolution_state(s0, 0.0, 0.0, r0);
        let orbit = geodesic_flow(&geom, &y0, 6.0, 0.005).unwrap();
        let p = poincare_map(&geom, &orbit, 10).unwrap();
        assert_eq!(p.class, OrbitClass::EllipticNondegenerate);
        assert!((p.det - 1.0).abs() < 1e-8);
        for e in &p.eigenvalues {
            assert!((e.norm() - 1.0).abs() < 1e-8);
        }
        // Jacobi oracle: alpha = 2 pi sqrt(-r0 r''(s0)) modulo 2 pi,
        // folded into (0, pi) as an eigenvalue angle.
        let full = 2.0 * PI * (-r0 * (prof.d2r)(s0)).sqrt();
        let folded = {
            let m = full.rem_euclid(2.0 * PI);
            m.min(2.0 * PI - m)
        };
        let alpha = p.rotation_angle.unwrap();
        assert!((alpha - folded).abs() < 1e-6, "{alpha} vs {folded}");
        assert!(p.n_elementary_up_to.unwrap() >= 4);
    }

    #[test]
    fn open_orbit_rejected() {
        // irrational slope on the torus never closes
        let slope = std::f64::consts::SQRT_2;
        let n = (1.0 + slope * slope).sqrt();
        let y0 = torus_state([0.0, 0.0], [1.0 / n, slope / n]);
        let orbit = geodesic_flow(&FlowGeometry::Torus, &y0, 20.0, 0.01).unwrap();
        assert!(orbit.closure.is_none());
        assert!(poincare_map(&FlowGeometry::Torus, &orbit, 10).is_err());
    }
}
