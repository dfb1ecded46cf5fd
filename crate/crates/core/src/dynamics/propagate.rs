use crate::error::{Error, Result};
use crate::linalg;
use crate::manifolds::SpectralModel;
use crate::ode::rk45;
use crate::spectra::GeneratorMatrix;
use crate::{CVec, IM};

/// Cauchy data pair at a time: u and D_t u in basis coefficients.
#[derive(Debug, Clone)]
pub struct FieldState {
    pub t: f64,
    pub u0: CVec,
    pub u1: CVec,
}

impl FieldState {
    pub fn from_flat(t: f64, x: &CVec) -> Self {
        let n = x.len() / 2;
        FieldState {
            t,
            u0: x.slice(ndarray::s![..n]).to_owned(),
            u1: x.slice(ndarray::s![n..]).to_owned(),
        }
    }

    pub fn to_flat(&self) -> CVec {
        let n = self.u0.len();
        let mut x = CVec::zeros(2 * n);
        x.slice_mut(ndarray::s![..n]).assign(&self.u0);
        x.slice_mut(ndarray::s![n..]).assign(&self.u1);
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationMethod {
    Expm,
    Stepper,
}

/// Solution operator applied to the propagator data (0, f): states
/// exp(itG)(0, f) on the given increasing time grid.
pub fn propagate(
    gen: &GeneratorMatrix,
    f: &CVec,
    t_grid: &[f64],
    method: PropagationMethod,
) -> Result<Vec<FieldState>> {
    let n = gen.half_dim;
    if f.len() != n {
        return Err(Error::Argument(format!(
            "data has {} coefficients, model has {n}",
            f.len()
        )));
    }
    if t_grid.is_empty() || t_grid[0] < 0.0 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("time grid must be nonnegative and increasing".into()));
    }
    let mut x = CVec::zeros(2 * n);
    x.slice_mut(ndarray::s![n..]).assign(f);
    propagate_state(gen, &x, t_grid, method)
}

/// Same as `propagate` for general Cauchy data (u0, u1) given flat.
pub fn propagate_state(
    gen: &GeneratorMatrix,
    x0: &CVec,
    t_grid: &[f64],
    method: PropagationMethod,
) -> Result<Vec<FieldState>> {
    let dim = 2 * gen.half_dim;
    if x0.len() != dim {
        return Err(Error::Argument("flat state has the wrong dimension".into()));
    }
    let mut out = Vec::with_capacity(t_grid.len());
    match method {
        PropagationMethod::Expm => {
            let ig = gen.g.mapv(|z| z * IM);
            let mut x = x0.clone();
            let mut t_prev = 0.0;
            let mut cached: Option<(f64, crate::CMat)> = None;
            for &t in t_grid {
                let dt = t - t_prev;
                if dt > 0.0 {
                    let reuse = matches!(&cached, Some((d, _)) if (d - dt).abs() <= 1e-12 * dt.max(1.0));
                    if !reuse {
                        let e = linalg::expm(&ig.mapv(|z| z * dt))?;
                        cached = Some((dt, e));
                    }
                    let (_, e) = cached.as_ref().unwrap();
                    x = e.dot(&x);
                }
                t_prev = t;
                out.push(FieldState::from_flat(t, &x));
            }
        }
        PropagationMethod::Stepper => {
            let scale = linalg::norm2(x0).max(1e-30);
            let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
                // y packs the complex state as interleaved re/im
                let x = CVec::from_shape_fn(dim, |i| crate::C64::new(y[2 * i], y[2 * i + 1]));
                let gx = gen.g.dot(&x);
                for i in 0..dim {
                    let v = IM * gx[i];
                    dy[2 * i] = v.re;
                    dy[2 * i + 1] = v.im;
                }
            };
            let mut y = vec![0.0; 2 * dim];
            for i in 0..dim {
                y[2 * i] = x0[i].re;
                y[2 * i + 1] = x0[i].im;
            }
            let mut t_prev = 0.0;
            for &t in t_grid {
                rk45(&rhs, t_prev, t, &mut y, 1e-10, 1e-13 * scale)?;
                t_prev = t;
                let x = CVec::from_shape_fn(dim, |i| crate::C64::new(y[2 * i], y[2 * i + 1]));
                out.push(FieldState::from_flat(t, &x));
            }
        }
    }
    Ok(out)
}

/// E = (|grad u|^2 + |D_t u|^2) / 2 in coefficient form.
pub fn energy(state: &FieldState, model: &SpectralModel) -> f64 {
    let ku = model.k_mat.dot(&state.u0);
    let grad = linalg::inner(&state.u0, &ku).re;
    let kin: f64 = state.u1.iter().map(|z| z.norm_sqr()).sum();
    0.5 * (grad + kin)
}
