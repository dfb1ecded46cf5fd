use crate::error::{Error, Result};
use crate::linalg;
use crate::manifolds::damping::{DampingSpec, GeometryKind};
use crate::manifolds::revolution::RevolutionProfile;
use crate::{CMat, CVec, C64};
use ndarray_linalg::{Eigh, UPLO};
use serde_json::json;

#[derive(Debug, Clone)]
pub enum ModelGeometry {
    Torus { kmax: i64 },
    Sphere { lmax: u32 },
    Revolution { m: u32, profile: RevolutionProfile },
}

impl ModelGeometry {
    pub fn kind(&self) -> GeometryKind {
        match self {
            ModelGeometry::Torus { .. } => GeometryKind::Torus,
            ModelGeometry::Sphere { .. } => GeometryKind::Sphere,
            ModelGeometry::Revolution { .. } => GeometryKind::Revolution,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelGeometry::Torus { .. } => "torus",
            ModelGeometry::Sphere { .. } => "sphere",
            ModelGeometry::Revolution { .. } => "revolution",
        }
    }
}

#[derive(Debug, Clone)]
pub enum BasisLabel {
    /// Fourier mode e^{i k.x}/(2 pi) on the torus.
    Fourier { k: [i64; 2] },
    /// Real spherical harmonic Y_{l,m}.
    Harmonic { l: u32, m: i32 },
    /// Node function at meridian arclength s (half-offset grid).
    Node { s: f64 },
}

impl BasisLabel {
    pub fn text(&self) -> String {
        match self {
            BasisLabel::Fourier { k } => format!("k=({},{})", k[0], k[1]),
            BasisLabel::Harmonic { l, m } => format!("Y({l},{m})"),
            BasisLabel::Node { s } => format!("s={s:.6}"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum QuadratureInfo {
    /// Exact convolution in the Fourier basis; no quadrature grid.
    Exact,
    /// Gauss-Legendre in theta times uniform in phi.
    GaussUniform { n_theta: usize, n_phi: usize },
    /// Uniform half-offset meridian grid with spacing h.
    Staggered { n: usize, h: f64 },
}

/// Truncated orthonormal-basis discretization of (-Laplacian, mult by a).
#[derive(Debug, Clone)]
pub struct SpectralModel {
    pub geometry: ModelGeometry,
    pub dim: usize,
    pub k_mat: CMat,
    pub a_mat: CMat,
    pub labels: Vec<BasisLabel>,
    /// Diagonal of K when the basis diagonalizes the Laplacian.
    pub lap_diag: Option<Vec<f64>>,
    pub lambda_max: f64,
    pub trust_radius: f64,
    /// sup of a over the damping check grid.
    pub a_sup: f64,
    pub volume: f64,
    pub quadrature: QuadratureInfo,
    pub damping: DampingSpec,
}

impl SpectralModel {
    /// Unit-norm coefficient vector of the constant function, when the
    /// constant lies in the truncated basis (torus, sphere, revolution
    /// mode m = 0).
    pub fn const_vector(&self) -> Option<CVec> {
        match &self.geometry {
            ModelGeometry::Torus { .. } | ModelGeometry::Sphere { .. } => {
                let mut v = CVec::zeros(self.dim);
                v[0] = C64::new(1.0, 0.0);
                Some(v)
            }
            ModelGeometry::Revolution { m, profile } => {
                if *m != 0 {
                    return None;
                }
                let h = profile.h();
                let mut v = CVec::zeros(self.dim);
                for (i, &r) in profile.r_nodes.iter().enumerate() {
                    v[i] = C64::new((r * h).sqrt(), 0.0);
                }
                let n = linalg::norm2(&v);
                Some(v.mapv(|z| z / n))
            }
        }
    }

    /// Integral of the basis-coefficient function over the surface.
    pub fn integral(&self, coeffs: &CVec) -> Option<C64> {
        let e0 = self.const_vector()?;
        Some(linalg::inner(&e0, coeffs) * self.volume.sqrt())
    }

    /// Integral of the damping coefficient, evaluated through A.
    pub fn damping_integral(&self) -> Option<f64> {
        let e0 = self.const_vector()?;
        let ae0 = self.a_mat.dot(&e0);
        Some(linalg::inner(&e0, &ae0).re * self.volume)
    }

    /// Hermiticity and positive-semidefiniteness checks from the module
    /// contract; builders run this before returning a model.
    pub fn validate(&self) -> Result<()> {
        let kh = self.k_mat.t().mapv(|z| z.conj());
        let herm_k = linalg::max_norm(&(&self.k_mat - &kh));
        if herm_k > 1e-12 * (1.0 + self.lambda_max) {
            return Err(Error::Model(format!("K not Hermitian: |K-K*| = {herm_k:e}")));
        }
        let ah = self.a_mat.t().mapv(|z| z.conj());
        let herm_a = linalg::max_norm(&(&self.a_mat - &ah));
        if herm_a > 1e-12 * (1.0 + self.a_sup) {
            return Err(Error::Model(format!("A not Hermitian: |A-A*| = {herm_a:e}")));
        }
        let (k_eigs, _) = self.k_mat.eigh(UPLO::Lower)?;
        let k_min = k_eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if k_min < -1e-10 * self.lambda_max.max(1.0) {
            return Err(Error::Model(format!("K has eigenvalue {k_min:e} < 0")));
        }
        let (a_eigs, _) = self.a_mat.eigh(UPLO::Lower)?;
        let a_min = a_eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if a_min < -1e-8 * self.a_sup.max(1e-300) {
            return Err(Error::Model(format!("A has eigenvalue {a_min:e} < 0")));
        }
        Ok(())
    }

    /// JSON document with dimension, basis labels, and dense matrices as
    /// row-major split real/imaginary arrays.
    pub fn to_json(&self) -> serde_json::Value {
        let split = |m: &CMat| {
            let re: Vec<f64> = m.iter().map(|z| z.re).collect();
            let im: Vec<f64> = m.iter().map(|z| z.im).collect();
            (re, im)
        };
        let (k_re, k_im) = split(&self.k_mat);
        let (a_re, a_im) = split(&self.a_mat);
        json!({
            "geometry": self.geometry.name(),
            "dim": self.dim,
            "basis": self.labels.iter().map(|l| l.text()).collect::<Vec<_>>(),
            "lambda_max": self.lambda_max,
            "trust_radius": self.trust_radius,
            "a_sup": self.a_sup,
            "volume": self.volume,
            "k_re": k_re, "k_im": k_im,
            "a_re": a_re, "a_im": a_im,
        })
    }

    /// Coefficient weights (1 + lambda_j)^{-theta/2} realizing Sobolev
    /// H^theta scaling on a Laplacian-diagonal basis.
    pub fn sobolev_weights(&self, theta: f64) -> Option<Vec<f64>> {
        self.lap_diag
            .as_ref()
            .map(|d| d.iter().map(|l| (1.0 + l).powf(-theta / 2.0)).collect())
    }
}
