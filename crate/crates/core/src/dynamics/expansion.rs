use crate::dynamics::propagate::{propagate, FieldState, PropagationMethod};
use crate::error::{Error, Result};
use crate::linalg;
use crate::manifolds::SpectralModel;
use crate::spectra::{spectral_projector, ClusterReport, GeneratorMatrix, Spectrum};
use crate::{CVec, C64, IM};

/// p_{tau=0}(t) f = i Int f / Int 2a, evaluated through the exact basis
/// coefficients.
pub fn zero_mode(f: &CVec, model: &SpectralModel) -> Result<C64> {
    let int_2a = 2.0 * model
        .damping_integral()
        .ok_or_else(|| Error::Model("no constant mode in this basis".into()))?;
    if int_2a <= 0.0 {
        return Err(Error::Damping("zero mode needs Int a > 0".into()));
    }
    let int_f = model
        .integral(f)
        .ok_or_else(|| Error::Model("no constant mode in this basis".into()))?;
    Ok(IM * int_f / int_2a)
}

/// Modal partial sum below a horizontal cutoff versus the exact
/// propagator, with the fitted exponential rate of the remainder.
#[derive(Debug, Clone)]
pub struct ExpansionResult {
    /// Group ids included in the partial sum.
    pub included: Vec<usize>,
    pub times: Vec<f64>,
    /// ||U(t)f - partial_sum(t)|| in L2 (first block).
    pub errors: Vec<f64>,
    pub partial: Vec<FieldState>,
    /// OLS (slope, stderr) of log error over the points above the
    /// numerical floor; None when too few points stand out.
    pub slope: Option<(f64, f64)>,
}

pub fn modal_expansion(
    spectrum: &Spectrum,
    gen: &GeneratorMatrix,
    f: &CVec,
    t_grid: &[f64],
    strip_cutoff: f64,
) -> Result<ExpansionResult> {
    let gap = spectrum
        .trusted()
        .map(|r| (r.tau.im - strip_cutoff).abs())
        .fold(f64::INFINITY, f64::min);
    if gap < 1e-3 {
        return Err(Error::Argument(format!(
            "strip cutoff {strip_cutoff} passes within {gap:e} of an eigenfrequency"
        )));
    }

    let included: Vec<usize> = (0..spectrum.groups.len())
        .filter(|&gid| {
            let rep = spectrum.groups[gid][0];
            spectrum.records[rep].tau.im < strip_cutoff
        })
        .collect();
    let terms: Vec<_> = included
        .iter()
        .map(|&gid| spectral_projector(spectrum, gen, gid))
        .collect::<Result<_>>()?;

    let n = gen.half_dim;
    let mut x0 = CVec::zeros(2 * n);
    x0.slice_mut(ndarray::s![n..]).assign(f);

    let oracle = propagate(gen, f, t_grid, PropagationMethod::Expm)?;
    let mut errors = Vec::with_capacity(t_grid.len());
    let mut partial = Vec::with_capacity(t_grid.len());
    for (ti, st) in t_grid.iter().zip(&oracle) {
        let mut sum = CVec::zeros(2 * n);
        for term in &terms {
            sum = sum + term.apply_at(*ti, &x0)?;
        }
        let ps = FieldState::from_flat(*ti, &sum);
        let err = linalg::norm2(&(&st.u0 - &ps.u0));
        errors.push(err);
        partial.push(ps);
    }

    let floor = 1e-13 * linalg::norm2(f).max(1e-300);
    let (xs, ys): (Vec<f64>, Vec<f64>) = t_grid
        .iter()
        .zip(&errors)
        .filter(|(_, e)| **e > floor)
        .map(|(t, e)| (*t, e.ln()))
        .unzip();
    let slope = if xs.len() >= 3 {
        linalg::ols_slope(&xs, &ys).ok().map(|(s, _, se)| (s, se))
    } else {
        None
    };

    Ok(ExpansionResult { included, times: t_grid.to_vec(), errors, partial, slope })
}

/// Cluster-wise partial sums U_k(t) on the sphere, with tail norms and
/// cumulative convergence against the exact propagator.
#[derive(Debug, Clone)]
pub struct ClusterExpansion {
    pub t_ref: f64,
    pub theta: f64,
    /// Cluster labels in ascending order (low part excluded).
    pub ks: Vec<i64>,
    /// ||U_k(t_ref) f|| per cluster (first block, L2).
    pub tail_norms: Vec<f64>,
    /// Relative error of low + sum_{k' <= k} U_{k'} versus U(t_ref) f.
    pub cumulative_errors: Vec<(i64, f64)>,
    /// OLS (slope, stderr) of log tail norm against log k.
    pub tail_slope: Option<(f64, f64)>,
    pub final_error: f64,
}

pub fn cluster_expansion(
    spectrum: &Spectrum,
    gen: &GeneratorMatrix,
    report: &ClusterReport,
    f: &CVec,
    t_ref: f64,
    theta: f64,
) -> Result<ClusterExpansion> {
    if theta <= 0.0 {
        return Err(Error::Argument("cluster expansion requires theta > 0".into()));
    }
    let quarter = report.maslov_alpha as f64 / 4.0;
    let threshold = report.k0 as f64 - 0.25;

    // assign every group (both reflection sides) by |Re tau|
    let mut low_groups = Vec::new();
    let mut by_k: std::collections::BTreeMap<i64, Vec<usize>> = std::collections::BTreeMap::new();
    for (gid, members) in spectrum.groups.iter().enumerate() {
        let tau = spectrum.records[members[0]].tau;
        let re = tau.re.abs();
        if re < threshold {
            low_groups.push(gid);
        } else {
            let k = ((re - quarter).round() as i64).max(report.k0);
            by_k.entry(k).or_default().push(gid);
        }
    }

    let n = gen.half_dim;
    let mut x0 = CVec::zeros(2 * n);
    x0.slice_mut(ndarray::s![n..]).assign(f);
    let oracle = propagate(gen, f, &[t_ref], PropagationMethod::Expm)?;
    let target = &oracle[0].u0;
    let target_norm = linalg::norm2(target).max(1e-300);

    let mut acc = CVec::zeros(2 * n);
    for &gid in &low_groups {
        let term = spectral_projector(spectrum, gen, gid)?;
        acc = acc + term.apply_at(t_ref, &x0)?;
    }

    let mut ks = Vec::new();
    let mut tail_norms = Vec::new();
    let mut cumulative_errors = Vec::new();
    for (&k, gids) in &by_k {
        let mut uk = CVec::zeros(2 * n);
        for &gid in gids {
            let term = spectral_projector(spectrum, gen, gid)?;
            uk = uk + term.apply_at(t_ref, &x0)?;
        }
        let uk_state = FieldState::from_flat(t_ref, &uk);
        ks.push(k);
        tail_norms.push(linalg::norm2(&uk_state.u0));
        acc = acc + &uk;
        let acc_state = FieldState::from_flat(t_ref, &acc);
        let err = linalg::norm2(&(&acc_state.u0 - target)) / target_norm;
        cumulative_errors.push((k, err));
    }
    let final_error = cumulative_errors.last().map(|&(_, e)| e).unwrap_or(1.0);

    // fit the decay of the tail norms over the trusted cluster range
    let trusted_ks: std::collections::BTreeSet<i64> =
        report.clusters.iter().map(|c| c.k).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = ks
        .iter()
        .zip(&tail_norms)
        .filter(|(k, v)| trusted_ks.contains(k) && **v > 1e-14)
        .map(|(k, v)| ((*k as f64).ln(), v.ln()))
        .unzip();
    let tail_slope = if xs.len() >= 3 {
        linalg::ols_slope(&xs, &ys).ok().map(|(s, _, se)| (s, se))
    } else {
        None
    };

    Ok(ClusterExpansion {
        t_ref,
        theta,
        ks,
        tail_norms,
        cumulative_errors,
        tail_slope,
        final_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::{build_sphere_model, build_torus_model, BasisLabel, DampingSpec};
    use crate::spectra::{assemble_generator, cluster_partition, compute_eigenfrequencies};
    use rand::{Rng, SeedableRng};

    fn random_cvec(n: usize, seed: u64) -> CVec {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        CVec::from_shape_fn(n, |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn zero_mode_closed_forms() {
        let c = 0.25;
        let model = build_torus_model(2, &DampingSpec::constant(c)).unwrap();
        // f === 1: coefficient vector sqrt(Vol) e0
        let mut f = CVec::zeros(model.dim);
        f[0] = C64::new(model.volume.sqrt(), 0.0);
        let z = zero_mode(&f, &model).unwrap();
        assert!((z - IM / (2.0 * c)).norm() < 1e-13);
        // zero-mean f
        let mut g = CVec::zeros(model.dim);
        g[3] = C64::new(0.7, -0.2);
        assert!(zero_mode(&g, &model).unwrap().norm() < 1e-15);
    }

    #[test]
    fn zero_mode_matches_projector() {
        let a = DampingSpec::torus_trig(
            0.6,
            vec![crate::manifolds::TrigTerm { k: [1, 1], cos_coef: 0.2, sin_coef: 0.1 }],
        );
        let model = build_torus_model(3, &a).unwrap();
        let gen = assemble_generator(&model);
        let spec = compute_eigenfrequencies(&gen, 1e-8).unwrap();
        let gid = spec.group_near(C64::new(0.0, 0.0)).unwrap();
        let term = spectral_projector(&spec, &gen, gid).unwrap();
        let f = random_cvec(model.dim, 21);
        let mut x0 = CVec::zeros(2 * model.dim);
        x0.slice_mut(ndarray::s![model.dim..]).assign(&f);
        let y = term.apply(&x0);
        let e0 = model.const_vector().unwrap();
        let u0 = FieldState::from_flat(0.0, &y).u0;
        let c_hat = linalg::inner(&e0, &u0) / model.volume.sqrt();
        let z = zero_mode(&f, &model).unwrap();
        assert!((c_hat - z).norm() < 1e-10, "{c_hat} vs {z}");
    }

    #[test]
    fn constant_damping_zero_term_and_rate() {
        let c = 0.3;
        let model = build_torus_model(2, &DampingSpec::constant(c)).unwrap();
        let gen = assemble_generator(&model);
        let spec = compute_eigenfrequencies(&gen, 1e-8).unwrap();
        let f = random_cvec(model.dim, 5);
        let ts: Vec<f64> = (2..=14).map(|j| j as f64).collect();
        let res = modal_expansion(&spec, &gen, &f, &ts, 0.5 * c).unwrap();
        // only the tau = 0 group sits below the cutoff
        assert_eq!(res.included.len(), 1);
        let (slope, _) = res.slope.expect("visible error curve");
        assert!((slope + c).abs() < 0.05, "slope {slope} vs {}", -c);
        // the partial sum is the constant zero-mode term at all times
        let z = zero_mode(&f, &model).unwrap();
        for ps in &res.partial {
            let cexp = z * model.volume.sqrt();
            assert!((ps.u0[0] - cexp).norm() < 1e-10);
        }
    }

    #[test]
    fn full_inclusion_is_exact() {
        let c = 0.2;
        let model = build_torus_model(2, &DampingSpec::constant(c)).unwrap();
        let gen = assemble_generator(&model);
        let spec = compute_eigenfrequencies(&gen, 1e-8).unwrap();
        let f = random_cvec(model.dim, 31);
        let res = modal_expansion(&spec, &gen, &f, &[1.0], 2.0 * c + 1.0).unwrap();
        assert_eq!(res.included.len(), spec.groups.len());
        assert!(res.errors[0] <= 1e-7, "error {}", res.errors[0]);
    }

    #[test]
    fn cutoff_through_spectrum_rejected() {
        let c = 0.3;
        let model = build_torus_model(2, &DampingSpec::constant(c)).unwrap();
        let gen = assemble_generator(&model);
        let spec = compute_eigenfrequencies(&gen, 1e-8).unwrap();
        let f = random_cvec(model.dim, 8);
        assert!(modal_expansion(&spec, &gen, &f, &[1.0, 2.0], c).is_err());
    }

    #[test]
    fn single_degree_data_occupies_one_cluster() {
        let c = 0.2;
        let model = build_sphere_model(8, &DampingSpec::constant(c)).unwrap();
        let gen = assemble_generator(&model);
        let spec = compute_eigenfrequencies(&gen, 1e-8).unwrap();
        let rep = cluster_partition(&spec, &model, 2, 1).unwrap();
        let mut f = CVec::zeros(model.dim);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for i in 0..model.dim {
            if matches!(model.labels[i], BasisLabel::Harmonic { l: 5, .. }) {
                f[i] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let ce = cluster_expansion(&spec, &gen, &rep, &f, 1.0, 1.0).unwrap();
        for (k, v) in ce.ks.iter().zip(&ce.tail_norms) {
            if *k != 5 {
                assert!(*v < 1e-8, "cluster {k} carries {v}");
            }
        }
        assert!(ce.final_error < 1e-8, "final error {}", ce.final_error);
    }

    #[test]
    fn theta_two_partial_sums_converge() {
        let a = DampingSpec::sphere_zonal(vec![0.05, 0.0, 0.3]);
        let model = build_sphere_model(12, &a).unwrap();
        let gen = assemble_generator(&model);
        let spec = compute_eigenfrequencies(&gen, 1e-8).unwrap();
        let rep = cluster_partition(&spec, &model, 2, 1).unwrap();
        let theta = 2.0;
        let w = model.sobolev_weights(theta).unwrap();
        let raw = random_cvec(model.dim, 11);
        let f = CVec::from_shape_fn(model.dim, |i| raw[i] * w[i]);
        let ce = cluster_expansion(&spec, &gen, &rep, &f, 1.0, theta).unwrap();
        assert!(ce.final_error < 1e-6, "final error {}", ce.final_error);
        // cumulative error decreases overall
        let first = ce.cumulative_errors.first().unwrap().1;
        assert!(ce.final_error < first);
    }

    #[test]
    fn nonpositive_theta_rejected() {
        let model = build_sphere_model(4, &DampingSpec::constant(0.1)).unwrap();
        let gen = assemble_generator(&model);
        let spec = compute_eigenfrequencies(&gen, 1e-8).unwrap();
        let rep = cluster_partition(&spec, &model, 2, 1).unwrap();
        let f = random_cvec(model.dim, 3);
        assert!(cluster_expansion(&spec, &gen, &rep, &f, 1.0, 0.0).is_err());
    }
}
