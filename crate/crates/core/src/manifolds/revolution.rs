use crate::error::{Error, Result};
use crate::manifolds::damping::{DampingSpec, GeometryKind};
use crate::manifolds::model::{BasisLabel, ModelGeometry, QuadratureInfo, SpectralModel};
use crate::CMat;
use ndarray_linalg::{Eigh, UPLO};
use std::f64::consts::PI;

/// Arclength profile s -> r(s) of a surface of revolution with smooth
/// pole closures r(0) = r(L) = 0, r'(0) = 1, r'(L) = -1. Values are
/// tabulated on a half-offset grid (nodes) and on edge points, so no
/// node sits at r = 0.
#[derive(Debug, Clone)]
pub struct RevolutionProfile {
    pub length: f64,
    pub n: usize,
    /// r at nodes s_i = (i + 1/2) h, i = 0..n, h = L/n.
    pub r_nodes: Vec<f64>,
    /// r at edges s = i h, i = 0..=n; first and last are 0.
    pub r_edges: Vec<f64>,
    /// One-sided derivatives at the poles (Richardson-extrapolated).
    pub d_start: f64,
    pub d_end: f64,
}

impl RevolutionProfile {
    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Tabulate an analytic profile on an n-point staggered grid.
    pub fn from_fn(length: f64, n: usize, r: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 50 {
            return Err(Error::Argument(format!("profile grid must have n >= 50, got {n}")));
        }
        if r(0.0).abs() > 1e-12 || r(length).abs() > 1e-12 {
            return Err(Error::Geometry("profile must vanish at both poles".into()));
        }
        let h = length / n as f64;
        let r_nodes: Vec<f64> = (0..n).map(|i| r((i as f64 + 0.5) * h)).collect();
        let r_edges: Vec<f64> = (0..=n).map(|i| r(i as f64 * h)).collect();
        let eps = 1e-3;
        let slope = |f: &dyn Fn(f64) -> f64| {
            let g = |e: f64| f(e) / e;
            (4.0 * g(eps / 2.0) - g(eps)) / 3.0
        };
        let d_start = slope(&|e| r(e));
        let d_end = -slope(&|e| r(length - e));
        let p = Self { length, n, r_nodes, r_edges, d_start, d_end };
        p.validate()?;
        Ok(p)
    }

    /// Round sphere: r(s) = sin(s) on [0, pi].
    pub fn sphere(n: usize) -> Result<Self> {
        Self::from_fn(PI, n, |s| s.sin())
    }

    /// Equatorial bulge r(s) = sin(s)(1 + eps sin^2 s): elliptic equator
    /// at s = pi/2 with -r0 r'' = (1 + eps)(1 + 3 eps).
    pub fn bulge(eps: f64, n: usize) -> Result<Self> {
        Self::from_fn(PI, n, move |s| s.sin() * (1.0 + eps * s.sin() * s.sin()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_nodes.iter().any(|&r| r <= 0.0) {
            return Err(Error::Geometry("profile r(s) must be positive on the interior grid".into()));
        }
        if self.r_edges[1..self.n].iter().any(|&r| r <= 0.0) {
            return Err(Error::Geometry("profile r(s) has an interior zero".into()));
        }
        if (self.d_start - 1.0).abs() > 1e-6 || (self.d_end + 1.0).abs() > 1e-6 {
            return Err(Error::Geometry(format!(
                "pole closure not smooth: r'(0) = {}, r'(L) = {}",
                self.d_start, self.d_end
            )));
        }
        Ok(())
    }

    /// r at arbitrary s by linear interpolation of the edge/node tables.
    pub fn r_at(&self, s: f64) -> f64 {
        let h = self.h();
        let u = (s / h - 0.5).clamp(0.0, (self.n - 1) as f64);
        let j = (u.floor() as usize).min(self.n - 2);
        let t = u - j as f64;
        self.r_nodes[j] * (1.0 - t) + self.r_nodes[j + 1] * t
    }
}

/// Per-angular-mode discretization of the surface of revolution.
///
/// L_m v = -(1/r)(r v')' + (m^2/r^2) v, Galerkin finite differences on
/// the staggered grid with mass diag(r_i h), symmetrized by w = M^{1/2} v
/// (the discrete r^{1/2} substitution). The vanishing edge weight at the
/// poles gives the natural regularity condition for m = 0; for m != 0
/// the m^2/r^2 potential enforces decay.
pub fn build_revolution_model(
    profile: &RevolutionProfile,
    m: u32,
    a: &DampingSpec,
) -> Result<SpectralModel> {
    profile.validate()?;
    a.validate_nonneg(GeometryKind::Revolution, profile.length)?;
    let n = profile.n;
    let h = profile.h();

    // Stiffness S (tridiagonal) in the v variables, then K = M^{-1/2} S M^{-1/2}.
    let mut k_mat = CMat::zeros((n, n));
    for i in 0..n {
        let re_lo = profile.r_edges[i];
        let re_hi = profile.r_edges[i + 1];
        let mass_i = profile.r_nodes[i] * h;
        let mut diag = (re_lo + re_hi) / h;
        diag += (m as f64 * m as f64) * h / profile.r_nodes[i];
        k_mat[(i, i)] = (diag / mass_i).into();
        if i + 1 < n {
            let mass_j = profile.r_nodes[i + 1] * h;
            let off = -re_hi / h / (mass_i * mass_j).sqrt();
            k_mat[(i, i + 1)] = off.into();
            k_mat[(i + 1, i)] = off.into();
        }
    }

    let mut a_mat = CMat::zeros((n, n));
    for i in 0..n {
        a_mat[(i, i)] = a.eval_revolution((i as f64 + 0.5) * h, profile.length).into();
    }

    let (k_eigs, _) = k_mat.eigh(UPLO::Lower)?;
    let lambda_max = k_eigs.iter().cloned().fold(0.0, f64::max);

    let labels = (0..n)
        .map(|i| BasisLabel::Node { s: (i as f64 + 0.5) * h })
        .collect();
    let volume = 2.0 * PI * profile.r_nodes.iter().sum::<f64>() * h;
    let model = SpectralModel {
        geometry: ModelGeometry::Revolution { m, profile: profile.clone() },
        dim: n,
        k_mat,
        a_mat,
        labels,
        lap_diag: None,
        lambda_max,
        trust_radius: 0.5 * lambda_max.sqrt(),
        a_sup: a.sup_on_grid(GeometryKind::Revolution, profile.length),
        volume,
        quadrature: QuadratureInfo::Staggered { n, h },
        damping: a.clone(),
    };
    model.validate()?;
    Ok(model)
}
