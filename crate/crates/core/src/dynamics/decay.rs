use crate::dynamics::propagate::{energy, propagate_state, PropagationMethod};
use crate::error::{Error, Result};
use crate::linalg;
use crate::manifolds::SpectralModel;
use crate::spectra::{spectral_projector, GeneratorMatrix, Spectrum};
use crate::{CVec, C64};
use rand::{Rng, SeedableRng};

/// Fitted worst-case energy decay rate against the band formula
/// 2 min(D, A(infinity)).
#[derive(Debug, Clone)]
pub struct DecayFit {
    /// -2 x (slowest fitted slope of (1/2) log E) over the ensemble.
    pub alpha_hat: f64,
    pub d_hat: f64,
    pub a_inf_hat: f64,
    /// 2 min(d_hat, a_inf_hat).
    pub alpha_formula: f64,
    pub ratio: f64,
    /// Per-sample fitted slopes of (1/2) log E.
    pub slopes: Vec<f64>,
}

/// Propagates a random ensemble of mean-free Cauchy data over a late
/// time window and fits the exponential energy rate sample by sample.
pub fn fit_decay_rate(
    model: &SpectralModel,
    gen: &GeneratorMatrix,
    spectrum: &Spectrum,
    a_inf_hat: f64,
    n_ensemble: usize,
    seed: u64,
    window: (f64, f64),
) -> Result<DecayFit> {
    if n_ensemble < 10 {
        return Err(Error::Argument("decay fit needs an ensemble of at least 10".into()));
    }
    let (t1, t2) = window;
    if !(0.0 < t1 && t1 < t2) {
        return Err(Error::Argument("decay window must satisfy 0 < t1 < t2".into()));
    }
    let d_hat = spectrum
        .d_hat()
        .ok_or_else(|| Error::Numerical("no nonzero trusted eigenfrequencies".into()))?;

    // remove the stationary zero-mode component before propagating
    let gid0 = spectrum
        .group_near(C64::new(0.0, 0.0))
        .ok_or_else(|| Error::Numerical("tau = 0 group not found".into()))?;
    let p0 = spectral_projector(spectrum, gen, gid0)?;

    let n_t = 21;
    let ts: Vec<f64> = (0..n_t)
        .map(|j| t1 + (t2 - t1) * j as f64 / (n_t - 1) as f64)
        .collect();
    let dim = 2 * gen.half_dim;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    let mut slopes = Vec::with_capacity(n_ensemble);
    for _ in 0..n_ensemble {
        let raw = CVec::from_shape_fn(dim, |_| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let x0 = &raw - &p0.apply(&raw);
        let states = propagate_state(gen, &x0, &ts, PropagationMethod::Expm)?;
        let e_ref = energy(&states[0], model);
        let mut xs = Vec::with_capacity(n_t);
        let mut ys = Vec::with_capacity(n_t);
        for st in &states {
            let e = energy(st, model);
            if e <= 1e-14 * e_ref.max(1e-300) {
                return Err(Error::Numerical(
                    "energy below the fit floor inside the window".into(),
                ));
            }
            xs.push(st.t);
            ys.push(0.5 * e.ln());
        }
        let (slope, _, _) = linalg::ols_slope(&xs, &ys)?;
        slopes.push(slope);
    }

    let worst = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let alpha_hat = -2.0 * worst;
    let alpha_formula = 2.0 * d_hat.min(a_inf_hat);
    let ratio = if alpha_formula != 0.0 { alpha_hat / alpha_formula } else { f64::NAN };
    Ok(DecayFit { alpha_hat, d_hat, a_inf_hat, alpha_formula, ratio, slopes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::propagate::propagate_state;
    use crate::manifolds::{build_torus_model, DampingSpec};
    use crate::spectra::{assemble_generator, compute_eigenfrequencies};

    #[test]
    fn constant_damping_rate_matches_formula() {
        let c = 0.1;
        let model = build_torus_model(3, &DampingSpec::constant(c)).unwrap();
        let gen = assemble_generator(&model);
        let spec = compute_eigenfrequencies(&gen, 1e-8).unwrap();
        let fit = fit_decay_rate(&model, &gen, &spec, c, 10, 7, (5.0, 30.0)).unwrap();
        assert!((fit.alpha_formula - 2.0 * c).abs() < 1e-8);
        assert!(
            fit.ratio > 0.85 && fit.ratio < 1.1,
            "ratio {} (alpha_hat {})",
            fit.ratio,
            fit.alpha_hat
        );
    }

    #[test]
    fn pure_eigenmode_decays_at_two_beta() {
        let c = 0.15;
        let model = build_torus_model(2, &DampingSpec::constant(c)).unwrap();
        let gen = assemble_generator(&model);
        let spec = compute_eigenfrequencies(&gen, 1e-8).unwrap();
        let rec = spec
            .trusted()
            .filter(|r| r.tau.re > 0.5)
            .min_by(|a, b| a.tau.re.partial_cmp(&b.tau.re).unwrap())
            .unwrap();
        let beta = rec.tau.im;
        let ts: Vec<f64> = (0..21).map(|j| 5.0 + j as f64).collect();
        let states = propagate_state(&gen, &rec.right, &ts, PropagationMethod::Expm).unwrap();
        let xs: Vec<f64> = states.iter().map(|s| s.t).collect();
        let ys: Vec<f64> = states.iter().map(|s| energy(s, &model).ln()).collect();
        let (slope, _, _) = linalg::ols_slope(&xs, &ys).unwrap();
        assert!(
            (slope + 2.0 * beta).abs() < 0.01 * (2.0 * beta),
            "slope {slope} vs {}",
            -2.0 * beta
        );
    }

    #[test]
    fn small_ensemble_rejected() {
        let model = build_torus_model(1, &DampingSpec::constant(0.1)).unwrap();
        let gen = assemble_generator(&model);
        let spec = compute_eigenfrequencies(&gen, 1e-8).unwrap();
        assert!(fit_decay_rate(&model, &gen, &spec, 0.1, 3, 1, (5.0, 30.0)).is_err());
    }
}
