use crate::error::{Error, Result};
use crate::manifolds::damping::{DampingSpec, GeometryKind};
use crate::manifolds::model::{BasisLabel, ModelGeometry, QuadratureInfo, SpectralModel};
use crate::manifolds::sphharm::{gauss_legendre, real_ylm};
use crate::{CMat, C64};
use ndarray::Array2;
use std::f64::consts::PI;

/// Real spherical-harmonic discretization on the round 2-sphere, all
/// Y_{l,m} with l <= lmax. K is diagonal with l(l+1); A is assembled by
/// Gauss-Legendre (theta) x uniform (phi) quadrature, exact for the
/// band-limited integrands that the zonal damping family produces.
pub fn build_sphere_model(lmax: u32, a: &DampingSpec) -> Result<SpectralModel> {
    if lmax < 2 {
        return Err(Error::Argument(format!("lmax must be >= 2, got {lmax}")));
    }
    a.validate_nonneg(GeometryKind::Sphere, 0.0)?;
    let deg = a.sphere_degree();
    if deg * 2 > lmax as usize {
        return Err(Error::Damping(format!(
            "zonal damping degree {deg} exceeds lmax/2 = {}",
            lmax / 2
        )));
    }

    let modes: Vec<(u32, i32)> = (0..=lmax)
        .flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m)))
        .collect();
    let n = modes.len();

    // theta-degree of Y Y' a is <= 2 lmax + deg; GL with n_theta nodes is
    // exact through degree 2 n_theta - 1.
    let n_theta = (2 * lmax as usize + deg) / 2 + 2;
    let n_phi = 2 * lmax as usize + 2;
    let (xs, ws) = gauss_legendre(n_theta);

    // Basis values on the product grid, flattened (theta major).
    let grid = n_theta * n_phi;
    let mut y = Array2::<f64>::zeros((n, grid));
    let mut wa = Vec::with_capacity(grid);
    let dphi = 2.0 * PI / n_phi as f64;
    for (it, (x, w)) in xs.iter().zip(&ws).enumerate() {
        for _ in 0..n_phi {
            wa.push(w * dphi * a.eval_sphere(*x));
        }
        for (row, &(l, m)) in modes.iter().enumerate() {
            for ip in 0..n_phi {
                y[(row, it * n_phi + ip)] = real_ylm(l, m, *x, ip as f64 * dphi);
            }
        }
    }
    let mut yw = y.clone();
    for (mut col, &w) in yw.columns_mut().into_iter().zip(&wa) {
        col.mapv_inplace(|v| v * w);
    }
    let a_real = y.dot(&yw.t());

    // Exactness guard: the same quadrature applied to a === 1 must
    // reproduce the Gram identity.
    let mut yg = y.clone();
    for (it, (_, w)) in xs.iter().zip(&ws).enumerate() {
        for ip in 0..n_phi {
            let mut col = yg.column_mut(it * n_phi + ip);
            col.mapv_inplace(|v| v * w * dphi);
        }
    }
    let gram = y.dot(&yg.t());
    let mut gram_err: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            gram_err = gram_err.max((gram[(i, j)] - expect).abs());
        }
    }
    if gram_err > 1e-10 {
        return Err(Error::Model(format!(
            "sphere quadrature not exact: Gram deviation {gram_err:e}"
        )));
    }

    let mut k_mat = CMat::zeros((n, n));
    let mut lap = Vec::with_capacity(n);
    for (i, &(l, _)) in modes.iter().enumerate() {
        let lam = (l * (l + 1)) as f64;
        k_mat[(i, i)] = lam.into();
        lap.push(lam);
    }
    let a_mat = a_real.mapv(|v| C64::new(v, 0.0));

    let lambda_max = (lmax * (lmax + 1)) as f64;
    let model = SpectralModel {
        geometry: ModelGeometry::Sphere { lmax },
        dim: n,
        k_mat,
        a_mat,
        labels: modes.iter().map(|&(l, m)| BasisLabel::Harmonic { l, m }).collect(),
        lap_diag: Some(lap),
        lambda_max,
        trust_radius: 0.5 * lambda_max.sqrt(),
        a_sup: a.sup_on_grid(GeometryKind::Sphere, 0.0),
        volume: 4.0 * PI,
        quadrature: QuadratureInfo::GaussUniform { n_theta, n_phi },
        damping: a.clone(),
    };
    model.validate()?;
    Ok(model)
}
