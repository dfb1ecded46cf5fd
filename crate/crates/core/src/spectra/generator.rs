use crate::manifolds::SpectralModel;
use crate::{CMat, CVec, C64};

/// Companion linearization of the quadratic pencil: the block matrix
/// (0, I; K, 2iA) acting on Cauchy-data coefficient pairs.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    pub g: CMat,
    /// N: dimension of each block.
    pub half_dim: usize,
    pub a_sup: f64,
    pub trust_radius: f64,
    pub lambda_max: f64,
}

pub fn assemble_generator(model: &SpectralModel) -> GeneratorMatrix {
    let n = model.dim;
    let mut g = CMat::zeros((2 * n, 2 * n));
    for i in 0..n {
        g[(i, n + i)] = C64::new(1.0, 0.0);
        for j in 0..n {
            g[(n + i, j)] = model.k_mat[(i, j)];
            g[(n + i, n + j)] = C64::new(0.0, 2.0) * model.a_mat[(i, j)];
        }
    }
    GeneratorMatrix {
        g,
        half_dim: n,
        a_sup: model.a_sup,
        trust_radius: model.trust_radius,
        lambda_max: model.lambda_max,
    }
}

impl GeneratorMatrix {
    /// Apply the quadratic pencil P(tau) = K + 2 i tau A - tau^2 to a
    /// half-dimension vector, reading K and 2iA out of the blocks.
    pub fn pencil_apply(&self, tau: C64, u: &CVec) -> CVec {
        let n = self.half_dim;
        let mut out = CVec::zeros(n);
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                // K u + tau * (2iA) u
                acc += self.g[(n + i, j)] * u[j] + tau * self.g[(n + i, n + j)] * u[j];
            }
            out[i] = acc - tau * tau * u[i];
        }
        out
    }
}
