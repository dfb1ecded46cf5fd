use crate::bundle::Bundle;
use crate::config::RunConfig;
use anyhow::{bail, Result};
use dampwave::dynamics::{cluster_expansion, fit_decay_rate, modal_expansion};
use dampwave::geometry::{
    check_geometric_control, estimate_A, geodesic_flow, poincare_map, revolution_state,
    sphere_state, torus_state, ACurve, ControlResult, FlowGeometry, FlowProfile, SamplingGrid,
};
use dampwave::manifolds::{
    build_revolution_model, build_sphere_model, build_torus_model, DampingSpec,
    RevolutionProfile, SpectralModel, DEFAULT_CHECK_RESOLUTION,
};
use dampwave::report;
use dampwave::spectra::{
    assemble_generator, cluster_partition, compute_eigenfrequencies, resolvent_scan,
    GeneratorMatrix, Spectrum,
};
use dampwave::{CVec, C64};
use rand::{Rng, SeedableRng};
use serde_json::json;
use std::path::Path;

#[derive(Debug, Clone, Copy)]
pub enum Command {
    Spectrum,
    ResolventScan,
    Band,
    Clusters,
    Control,
    Averages,
    Poincare,
    Expansion,
    Decay,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::ResolventScan => "resolvent-scan",
            Command::Band => "band",
            Command::Clusters => "clusters",
            Command::Control => "control",
            Command::Averages => "averages",
            Command::Poincare => "poincare",
            Command::Expansion => "expansion",
            Command::Decay => "decay",
        }
    }
}

pub fn run(command: Command, cfg: &RunConfig, out: &Path) -> Result<std::path::PathBuf> {
    let echo = serde_json::to_value(cfg)?;
    let mut b = Bundle::new(command.name(), out, echo)?;
    match command {
        Command::Spectrum => spectrum(cfg, &mut b)?,
        Command::ResolventScan => scan(cfg, &mut b)?,
        Command::Band => band(cfg, &mut b)?,
        Command::Clusters => clusters(cfg, &mut b)?,
        Command::Control => control(cfg, &mut b)?,
        Command::Averages => averages(cfg, &mut b)?,
        Command::Poincare => poincare(cfg, &mut b)?,
        Command::Expansion => expansion(cfg, &mut b)?,
        Command::Decay => decay(cfg, &mut b)?,
    }
    b.finish()
}

fn damping(cfg: &RunConfig) -> DampingSpec {
    DampingSpec { kind: cfg.damping.clone(), check_resolution: DEFAULT_CHECK_RESOLUTION }
}

fn build_model(cfg: &RunConfig) -> Result<SpectralModel> {
    let a = damping(cfg);
    let g = &cfg.geometry;
    let model = match g.kind.as_str() {
        "torus" => build_torus_model(g.kmax, &a)?,
        "sphere" => build_sphere_model(g.lmax, &a)?,
        "revolution" => {
            let profile = match g.profile.as_str() {
                "sphere" => RevolutionProfile::sphere(g.profile_n)?,
                "bulge" => RevolutionProfile::bulge(g.eps, g.profile_n)?,
                other => bail!("unknown revolution profile `{other}`"),
            };
            build_revolution_model(&profile, g.m, &a)?
        }
        other => bail!("unknown geometry kind `{other}`"),
    };
    Ok(model)
}

fn flow_geometry(cfg: &RunConfig) -> Result<FlowGeometry> {
    let g = &cfg.geometry;
    Ok(match g.kind.as_str() {
        "torus" => FlowGeometry::Torus,
        "sphere" => FlowGeometry::Sphere,
        "revolution" => FlowGeometry::Revolution(match g.profile.as_str() {
            "sphere" => FlowProfile::sphere(),
            "bulge" => FlowProfile::bulge(g.eps),
            other => bail!("unknown revolution profile `{other}`"),
        }),
        other => bail!("unknown geometry kind `{other}`"),
    })
}

fn grid(cfg: &RunConfig) -> SamplingGrid {
    SamplingGrid {
        positions: cfg.experiment.grid_positions,
        directions: cfg.experiment.grid_directions,
    }
}

fn linspace(n: usize, a: f64, b: f64) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn eig_pipeline(cfg: &RunConfig) -> Result<(SpectralModel, GeneratorMatrix, Spectrum)> {
    let model = build_model(cfg)?;
    let gen = assemble_generator(&model);
    let spec = compute_eigenfrequencies(&gen, cfg.spectra.residual_tol)?;
    Ok((model, gen, spec))
}

fn a_inf_estimate(cfg: &RunConfig) -> Result<(f64, Option<ACurve>)> {
    if let Some(v) = cfg.experiment.a_inf_hat {
        return Ok((v, None));
    }
    let geo = flow_geometry(cfg)?;
    let curve = estimate_A(&geo, &damping(cfg), &cfg.experiment.t_list, &grid(cfg))?;
    Ok((curve.a_inf_hat, Some(curve)))
}

fn random_data(cfg: &RunConfig, model: &SpectralModel) -> CVec {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let raw = CVec::from_shape_fn(model.dim, |_| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    match model.sobolev_weights(cfg.experiment.theta) {
        Some(w) => CVec::from_shape_fn(model.dim, |i| raw[i] * w[i]),
        None => raw,
    }
}

fn spectrum(cfg: &RunConfig, b: &mut Bundle) -> Result<()> {
    let (model, _, spec) = eig_pipeline(cfg)?;
    b.write_text("spectrum.csv", &report::spectrum_csv(&spec, None))?;
    b.write_json(
        "spectrum.json",
        json!({
            "dim": model.dim,
            "records": spec.records.len(),
            "trusted": spec.trusted().count(),
            "groups": spec.groups.len(),
            "d_hat": spec.d_hat(),
            "a_sup": model.a_sup,
            "trust_radius": model.trust_radius,
        }),
    )
}

fn scan(cfg: &RunConfig, b: &mut Bundle) -> Result<()> {
    let model = build_model(cfg)?;
    let e = &cfg.experiment;
    let mut taus = Vec::new();
    for im in linspace(e.im_steps, e.im_min, e.im_max) {
        for re in linspace(e.re_steps, e.re_min, e.re_max) {
            taus.push(C64::new(re, im));
        }
    }
    let points = resolvent_scan(&model, &taus)?;
    b.write_text("scan.csv", &report::scan_csv(&points))?;
    let max_l2 = points.iter().map(|p| p.norm_l2).fold(0.0, f64::max);
    let max_h = points.iter().map(|p| p.norm_h).fold(0.0, f64::max);
    b.write_json(
        "scan.json",
        json!({
            "points": points.len(),
            "max_norm_L2": max_l2,
            "max_norm_H": max_h,
        }),
    )
}

fn band(cfg: &RunConfig, b: &mut Bundle) -> Result<()> {
    let (model, _, spec) = eig_pipeline(cfg)?;
    let (a_inf, curve) = a_inf_estimate(cfg)?;
    let rep = dampwave::spectra::band_summary(&spec, &model, a_inf, cfg.experiment.band_eps)?;
    b.write_text("spectrum.csv", &report::spectrum_csv(&spec, None))?;
    if let Some(c) = &curve {
        b.write_text("averages.csv", &report::acurve_csv(c))?;
    }
    b.write_json(
        "band.json",
        json!({
            "d_hat": rep.d_hat,
            "a_inf_hat": rep.a_inf_hat,
            "eps": rep.eps,
            "strip_counts": rep
                .strip_counts
                .iter()
                .map(|((lo, hi), n)| json!([lo, hi, n]))
                .collect::<Vec<_>>(),
            "strip_total": rep.strip_total(),
            "zero_mode_ok": rep.zero_mode_ok,
        }),
    )
}

fn clusters(cfg: &RunConfig, b: &mut Bundle) -> Result<()> {
    let (model, _, spec) = eig_pipeline(cfg)?;
    let rep = cluster_partition(&spec, &model, cfg.experiment.alpha, cfg.experiment.k0)?;
    b.write_text("spectrum.csv", &report::spectrum_csv(&spec, Some(&rep)))?;
    b.write_json(
        "clusters.json",
        json!({
            "maslov_alpha": rep.maslov_alpha,
            "c_fit": rep.c_fit,
            "k0": rep.k0,
            "outliers": rep.outliers.len(),
            "clusters": rep
                .clusters
                .iter()
                .map(|c| json!({
                    "k": c.k,
                    "center": c.center,
                    "members": c.members.len(),
                    "half_width": c.half_width,
                    "im_max": c.im_max,
                }))
                .collect::<Vec<_>>(),
        }),
    )
}

fn control(cfg: &RunConfig, b: &mut Bundle) -> Result<()> {
    let geo = flow_geometry(cfg)?;
    let verdict = check_geometric_control(&geo, &damping(cfg), cfg.experiment.t0, &grid(cfg))?;
    let counterexample = match &verdict.result {
        ControlResult::Counterexample(y) => Some(y.to_vec()),
        ControlResult::NoViolationFound => None,
    };
    b.write_json(
        "control.json",
        json!({
            "t0": verdict.t0,
            "grid_positions": verdict.grid.positions,
            "grid_directions": verdict.grid.directions,
            "min_mass": verdict.min_mass,
            "controlled": counterexample.is_none(),
            "counterexample": counterexample,
        }),
    )
}

fn averages(cfg: &RunConfig, b: &mut Bundle) -> Result<()> {
    let geo = flow_geometry(cfg)?;
    let curve = estimate_A(&geo, &damping(cfg), &cfg.experiment.t_list, &grid(cfg))?;
    b.write_text("averages.csv", &report::acurve_csv(&curve))?;
    b.write_json(
        "averages.json",
        json!({
            "a_inf_hat": curve.a_inf_hat,
            "gap": curve.gap,
            "stabilized": curve.stabilized,
        }),
    )
}

fn poincare(cfg: &RunConfig, b: &mut Bundle) -> Result<()> {
    let geo = flow_geometry(cfg)?;
    let y0 = match &geo {
        FlowGeometry::Torus => {
            let xi = cfg.experiment.orbit_xi;
            let n = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            if n == 0.0 {
                bail!("orbit direction must be nonzero");
            }
            torus_state([0.0, 0.0], [xi[0] / n, xi[1] / n])
        }
        FlowGeometry::Sphere => sphere_state([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
        FlowGeometry::Revolution(p) => {
            let s0 = 0.5 * p.length;
            revolution_state(s0, 0.0, 0.0, (p.r)(s0))
        }
    };
    let orbit = geodesic_flow(&geo, &y0, cfg.experiment.flow_time, cfg.experiment.flow_step)?;
    let data = poincare_map(&geo, &orbit, cfg.experiment.n_max)?;
    b.write_text("orbit.csv", &report::orbit_csv(&orbit))?;
    b.write_json(
        "poincare.json",
        json!({
            "class": format!("{:?}", data.class),
            "p_matrix": data.p_matrix,
            "eigenvalues": data
                .eigenvalues
                .iter()
                .map(|e| json!([e.re, e.im]))
                .collect::<Vec<_>>(),
            "rotation_angle": data.rotation_angle,
            "n_elementary_up_to": data.n_elementary_up_to,
            "det": data.det,
            "closure": orbit.closure.map(|(t, d)| json!([t, d])),
        }),
    )
}

fn expansion(cfg: &RunConfig, b: &mut Bundle) -> Result<()> {
    let (model, gen, spec) = eig_pipeline(cfg)?;
    let e = &cfg.experiment;
    let f = random_data(cfg, &model);
    let ts = linspace(e.t_steps, e.t_min, e.t_max);
    let cutoff = match e.strip_cutoff {
        Some(v) => v,
        None => a_inf_estimate(cfg)?.0 - e.band_eps,
    };
    let res = modal_expansion(&spec, &gen, &f, &ts, cutoff)?;
    let curve: Vec<(f64, f64)> =
        res.times.iter().cloned().zip(res.errors.iter().cloned()).collect();
    b.write_text("error_curve.csv", &report::series_csv("t", "error", &curve))?;
    let mut payload = json!({
        "strip_cutoff": cutoff,
        "included_groups": res.included.len(),
        "seed": cfg.seed,
        "slope": res.slope.map(|(s, _)| s),
        "slope_stderr": res.slope.map(|(_, se)| se),
    });
    if cfg.geometry.kind == "sphere" {
        let rep = cluster_partition(&spec, &model, e.alpha, e.k0)?;
        let ce = cluster_expansion(&spec, &gen, &rep, &f, e.t_ref, e.theta)?;
        let mut csv = String::from("k,tail_norm,cumulative_error\n");
        for ((k, v), (_, err)) in ce.ks.iter().zip(&ce.tail_norms).zip(&ce.cumulative_errors) {
            csv.push_str(&format!(
                "{k},{},{}\n",
                report::fmt_f64(*v),
                report::fmt_f64(*err)
            ));
        }
        b.write_text("cluster_tails.csv", &csv)?;
        payload["cluster"] = json!({
            "t_ref": ce.t_ref,
            "theta": ce.theta,
            "tail_slope": ce.tail_slope.map(|(s, _)| s),
            "final_error": ce.final_error,
        });
    }
    b.write_json("expansion.json", payload)
}

fn decay(cfg: &RunConfig, b: &mut Bundle) -> Result<()> {
    let (model, gen, spec) = eig_pipeline(cfg)?;
    let e = &cfg.experiment;
    let (a_inf, _) = a_inf_estimate(cfg)?;
    let fit = fit_decay_rate(
        &model,
        &gen,
        &spec,
        a_inf,
        e.ensemble,
        cfg.seed,
        (e.window[0], e.window[1]),
    )?;
    let rows: Vec<(f64, f64)> =
        fit.slopes.iter().enumerate().map(|(i, s)| (i as f64, *s)).collect();
    b.write_text("slopes.csv", &report::series_csv("sample", "slope", &rows))?;
    b.write_json(
        "decay.json",
        json!({
            "alpha_hat": fit.alpha_hat,
            "d_hat": fit.d_hat,
            "a_inf_hat": fit.a_inf_hat,
            "alpha_formula": fit.alpha_formula,
            "ratio": fit.ratio,
            "ensemble": e.ensemble,
            "seed": cfg.seed,
            "window": e.window,
        }),
    )
}
