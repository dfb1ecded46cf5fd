use crate::error::{Error, Result};
use crate::manifolds::damping::{DampingSpec, GeometryKind};
use crate::manifolds::model::{BasisLabel, ModelGeometry, QuadratureInfo, SpectralModel};
use crate::CMat;
use std::f64::consts::PI;

/// Fourier discretization on the flat torus (R/2piZ)^2, modes
/// |k1|,|k2| <= kmax ordered by (|k|^2, k1, k2). K is diagonal with
/// entries |k|^2; A is the exact Galerkin convolution matrix of the
/// trigonometric polynomial a.
pub fn build_torus_model(kmax: i64, a: &DampingSpec) -> Result<SpectralModel> {
    if kmax < 1 {
        return Err(Error::Argument(format!("kmax must be >= 1, got {kmax}")));
    }
    a.validate_nonneg(GeometryKind::Torus, 0.0)?;
    let deg = a.torus_degree();
    if deg > kmax {
        return Err(Error::Damping(format!(
            "damping has Fourier support up to degree {deg} > kmax = {kmax}; \
             the truncated convolution matrix would alias"
        )));
    }

    let mut modes: Vec<[i64; 2]> = Vec::new();
    for k1 in -kmax..=kmax {
        for k2 in -kmax..=kmax {
            modes.push([k1, k2]);
        }
    }
    modes.sort_by_key(|k| (k[0] * k[0] + k[1] * k[1], k[0], k[1]));
    let n = modes.len();

    let mut k_mat = CMat::zeros((n, n));
    let mut lap = Vec::with_capacity(n);
    for (i, k) in modes.iter().enumerate() {
        let lam = (k[0] * k[0] + k[1] * k[1]) as f64;
        k_mat[(i, i)] = lam.into();
        lap.push(lam);
    }
    let mut a_mat = CMat::zeros((n, n));
    for (i, ki) in modes.iter().enumerate() {
        for (j, kj) in modes.iter().enumerate() {
            a_mat[(i, j)] = a.torus_fourier([ki[0] - kj[0], ki[1] - kj[1]]);
        }
    }

    let lambda_max = 2.0 * (kmax * kmax) as f64;
    let model = SpectralModel {
        geometry: ModelGeometry::Torus { kmax },
        dim: n,
        k_mat,
        a_mat,
        labels: modes.iter().map(|&k| BasisLabel::Fourier { k }).collect(),
        lap_diag: Some(lap),
        lambda_max,
        trust_radius: 0.5 * lambda_max.sqrt(),
        a_sup: a.sup_on_grid(GeometryKind::Torus, 0.0),
        volume: 4.0 * PI * PI,
        quadrature: QuadratureInfo::Exact,
        damping: a.clone(),
    };
    model.validate()?;
    Ok(model)
}
