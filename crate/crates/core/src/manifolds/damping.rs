use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_CHECK_RESOLUTION: usize = 512;

/// One real trigonometric term `cos_coef*cos(k.x) + sin_coef*sin(k.x)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: [i64; 2],
    #[serde(default)]
    pub cos_coef: f64,
    #[serde(default)]
    pub sin_coef: f64,
}

/// Parametric damping families, one per geometry plus the constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DampingKind {
    Constant { level: f64 },
    /// Real trigonometric polynomial on the 2-torus.
    TorusTrig { c0: f64, terms: Vec<TrigTerm> },
    /// Zonal polynomial in cos(theta) on the sphere: sum c_j cos(theta)^j.
    SphereZonal { cos_poly: Vec<f64> },
    /// Smooth bump supported within distance `cut*L` of both poles of a
    /// surface of revolution, with a C-infinity taper of width `taper*L`.
    RevolutionCaps { amplitude: f64, cut: f64, taper: f64 },
    /// Tabulated rotationally invariant profile a(s), linearly interpolated.
    RevolutionTabulated { s: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DampingSpec {
    pub kind: DampingKind,
    #[serde(default = "default_resolution")]
    pub check_resolution: usize,
}

fn default_resolution() -> usize {
    DEFAULT_CHECK_RESOLUTION
}

/// C-infinity step: 0 for u <= 0, 1 for u >= 1.
fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let e0 = (-1.0 / u).exp();
        let e1 = (-1.0 / (1.0 - u)).exp();
        e0 / (e0 + e1)
    }
}

impl DampingSpec {
    pub fn constant(level: f64) -> Self {
        Self { kind: DampingKind::Constant { level }, check_resolution: DEFAULT_CHECK_RESOLUTION }
    }

    pub fn torus_trig(c0: f64, terms: Vec<TrigTerm>) -> Self {
        Self { kind: DampingKind::TorusTrig { c0, terms }, check_resolution: DEFAULT_CHECK_RESOLUTION }
    }

    pub fn sphere_zonal(cos_poly: Vec<f64>) -> Self {
        Self { kind: DampingKind::SphereZonal { cos_poly }, check_resolution: DEFAULT_CHECK_RESOLUTION }
    }

    pub fn revolution_caps(amplitude: f64, cut: f64, taper: f64) -> Self {
        Self {
            kind: DampingKind::RevolutionCaps { amplitude, cut, taper },
            check_resolution: DEFAULT_CHECK_RESOLUTION,
        }
    }

    pub fn eval_torus(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            DampingKind::Constant { level } => *level,
            DampingKind::TorusTrig { c0, terms } => {
                let mut v = *c0;
                for t in terms {
                    let phase = t.k[0] as f64 * x + t.k[1] as f64 * y;
                    v += t.cos_coef * phase.cos() + t.sin_coef * phase.sin();
                }
                v
            }
            _ => f64::NAN,
        }
    }

    /// Zonal evaluation by the polar angle cosine.
    pub fn eval_sphere(&self, cos_theta: f64) -> f64 {
        match &self.kind {
            DampingKind::Constant { level } => *level,
            DampingKind::SphereZonal { cos_poly } => {
                let mut v = 0.0;
                for &c in cos_poly.iter().rev() {
                    v = v * cos_theta + c;
                }
                v
            }
            _ => f64::NAN,
        }
    }

    /// Rotationally invariant evaluation by meridian arclength on [0, L].
    pub fn eval_revolution(&self, s: f64, length: f64) -> f64 {
        match &self.kind {
            DampingKind::Constant { level } => *level,
            DampingKind::RevolutionCaps { amplitude, cut, taper } => {
                let w = taper * length;
                let lo = smooth_step((cut * length - s) / w);
                let hi = smooth_step((s - (length - cut * length)) / w);
                amplitude * (lo + hi)
            }
            DampingKind::RevolutionTabulated { s: grid, values } => {
                if grid.is_empty() {
                    return f64::NAN;
                }
                if s <= grid[0] {
                    return values[0];
                }
                if s >= *grid.last().unwrap() {
                    return *values.last().unwrap();
                }
                let j = grid.partition_point(|&g| g <= s).saturating_sub(1);
                let t = (s - grid[j]) / (grid[j + 1] - grid[j]);
                values[j] * (1.0 - t) + values[j + 1] * t
            }
            _ => f64::NAN,
        }
    }

    fn check_values(&self, kind_name: &str, geometry: GeometryKind, length: f64) -> Vec<f64> {
        let res = self.check_resolution.max(8);
        match geometry {
            GeometryKind::Torus => {
                let mut vals = Vec::with_capacity(res * res);
                let h = 2.0 * std::f64::consts::PI / res as f64;
                for i in 0..res {
                    for j in 0..res {
                        vals.push(self.eval_torus(i as f64 * h, j as f64 * h));
                    }
                }
                vals
            }
            GeometryKind::Sphere => (0..=res)
                .map(|i| {
                    let theta = std::f64::consts::PI * i as f64 / res as f64;
                    self.eval_sphere(theta.cos())
                })
                .collect(),
            GeometryKind::Revolution => (1..res)
                .map(|i| self.eval_revolution(length * i as f64 / res as f64, length))
                .collect(),
        }
        .into_iter()
        .inspect(|v| {
            debug_assert!(!v.is_nan(), "damping kind {kind_name} evaluated on wrong geometry")
        })
        .collect()
    }

    /// Nonnegativity on the check grid (tolerance zero). Rejects NaN,
    /// i.e. a kind used on the wrong geometry.
    pub fn validate_nonneg(&self, geometry: GeometryKind, length: f64) -> Result<()> {
        let vals = self.check_values(self.kind_name(), geometry, length);
        for v in &vals {
            if v.is_nan() {
                return Err(Error::Damping(format!(
                    "damping kind `{}` is not usable on {:?} geometry",
                    self.kind_name(),
                    geometry
                )));
            }
            if *v < 0.0 {
                return Err(Error::Damping(format!(
                    "damping takes negative value {v:e} on the check grid"
                )));
            }
        }
        Ok(())
    }

    /// Full spec validation: nonnegative and not identically zero.
    pub fn validate(&self, geometry: GeometryKind, length: f64) -> Result<()> {
        self.validate_nonneg(geometry, length)?;
        if self.sup_on_grid(geometry, length) <= 0.0 {
            return Err(Error::Damping("damping is identically zero on the check grid".into()));
        }
        Ok(())
    }

    /// Max over the check grid; used as the numerical sup norm.
    pub fn sup_on_grid(&self, geometry: GeometryKind, length: f64) -> f64 {
        self.check_values(self.kind_name(), geometry, length)
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            DampingKind::Constant { .. } => "constant",
            DampingKind::TorusTrig { .. } => "torus-trig",
            DampingKind::SphereZonal { .. } => "sphere-zonal",
            DampingKind::RevolutionCaps { .. } => "revolution-caps",
            DampingKind::RevolutionTabulated { .. } => "revolution-tabulated",
        }
    }

    /// Largest Fourier mode component used by a torus spec.
    pub fn torus_degree(&self) -> i64 {
        match &self.kind {
            DampingKind::TorusTrig { terms, .. } => terms
                .iter()
                .map(|t| t.k[0].abs().max(t.k[1].abs()))
                .max()
                .unwrap_or(0),
            _ => 0,
        }
    }

    /// Polynomial degree in cos(theta) of a zonal sphere spec.
    pub fn sphere_degree(&self) -> usize {
        match &self.kind {
            DampingKind::SphereZonal { cos_poly } => cos_poly.len().saturating_sub(1),
            _ => 0,
        }
    }

    /// Fourier coefficient a_hat(k) of a torus spec (convention
    /// a(x) = sum_k a_hat(k) e^{i k.x}).
    pub fn torus_fourier(&self, k: [i64; 2]) -> crate::C64 {
        use crate::C64;
        match &self.kind {
            DampingKind::Constant { level } => {
                if k == [0, 0] {
                    C64::new(*level, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            DampingKind::TorusTrig { c0, terms } => {
                let mut v = if k == [0, 0] { C64::new(*c0, 0.0) } else { C64::new(0.0, 0.0) };
                for t in terms {
                    if t.k == k {
                        v += C64::new(t.cos_coef / 2.0, -t.sin_coef / 2.0);
                    }
                    if t.k == [-k[0], -k[1]] {
                        v += C64::new(t.cos_coef / 2.0, t.sin_coef / 2.0);
                    }
                }
                v
            }
            _ => crate::C64::new(f64::NAN, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    Torus,
    Sphere,
    Revolution,
}
