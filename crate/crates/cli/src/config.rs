use anyhow::{Context, Result};
use dampwave::manifolds::DampingKind;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Full experiment configuration. Every field has a default and unknown
/// keys are rejected; the resolved value is echoed into every output.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub damping: DampingKind,
    pub spectra: SpectraConfig,
    pub experiment: ExperimentConfig,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            geometry: GeometryConfig::default(),
            damping: DampingKind::Constant { level: 0.1 },
            spectra: SpectraConfig::default(),
            experiment: ExperimentConfig::default(),
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    /// torus | sphere | revolution
    pub kind: String,
    pub kmax: i64,
    pub lmax: u32,
    /// Angular mode of a revolution model.
    pub m: u32,
    /// Revolution profile family: sphere | bulge.
    pub profile: String,
    /// Bulge strength.
    pub eps: f64,
    /// Meridian grid size of the revolution discretization.
    pub profile_n: usize,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            kind: "torus".into(),
            kmax: 4,
            lmax: 12,
            m: 0,
            profile: "sphere".into(),
            eps: 0.0,
            profile_n: 400,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectraConfig {
    pub residual_tol: f64,
}

impl Default for SpectraConfig {
    fn default() -> Self {
        SpectraConfig { residual_tol: 1e-8 }
    }
}

/// Command-specific knobs, shared in one defaulted block.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Resolvent scan rectangle and resolution.
    pub re_min: f64,
    pub re_max: f64,
    pub re_steps: usize,
    pub im_min: f64,
    pub im_max: f64,
    pub im_steps: usize,
    /// Averaging horizons T for A(T).
    pub t_list: Vec<f64>,
    /// Phase-space sampling grid for averages and control.
    pub grid_positions: [usize; 2],
    pub grid_directions: usize,
    /// Geometric control length (arclength units).
    pub t0: f64,
    /// Geodesic flow step and total H_p-time.
    pub flow_step: f64,
    pub flow_time: f64,
    /// Torus orbit direction (normalized internally).
    pub orbit_xi: [f64; 2],
    /// Elementarity order for the Poincare map.
    pub n_max: u32,
    /// Time grid for expansions and error curves.
    pub t_min: f64,
    pub t_max: f64,
    pub t_steps: usize,
    /// Modal expansion cutoff; computed as a_inf_hat - band_eps when
    /// absent.
    pub strip_cutoff: Option<f64>,
    pub band_eps: f64,
    /// Sobolev scaling of random data and cluster parameters.
    pub theta: f64,
    pub alpha: i64,
    pub k0: i64,
    pub t_ref: f64,
    /// Decay-fit ensemble and time window.
    pub ensemble: usize,
    pub window: [f64; 2],
    /// Override for the trajectory-average infimum (skips the flow
    /// estimate).
    pub a_inf_hat: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            re_min: 0.5,
            re_max: 5.0,
            re_steps: 10,
            im_min: -0.5,
            im_max: 1.0,
            im_steps: 4,
            t_list: vec![5.0, 10.0, 20.0, 40.0],
            grid_positions: [16, 16],
            grid_directions: 32,
            t0: 10.0,
            flow_step: 0.005,
            flow_time: 30.0,
            orbit_xi: [1.0, 0.0],
            n_max: 10,
            t_min: 1.0,
            t_max: 20.0,
            t_steps: 20,
            strip_cutoff: None,
            band_eps: 0.05,
            theta: 1.0,
            alpha: 2,
            k0: 1,
            t_ref: 1.0,
            ensemble: 10,
            window: [5.0, 30.0],
            a_inf_hat: None,
        }
    }
}

pub fn load(path: Option<&Path>, seed_override: Option<u64>) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    Ok(cfg)
}
