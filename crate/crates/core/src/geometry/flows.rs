use crate::error::{Error, Result};
use crate::manifolds::GeometryKind;
use crate::ode::rk45;
use std::f64::consts::PI;
use std::sync::Arc;

/// Phase-space state, layout depending on the geometry:
/// torus (x1, x2, xi1, xi2, 0, 0); sphere (x, xi) as two unit 3-vectors;
/// revolution (s, theta, xi_s, xi_theta, 0, 0).
pub type State = [f64; 6];

/// Analytic profile of a surface of revolution for flow purposes: r and
/// its first two derivatives as closures (the spectral side uses the
/// tabulated `RevolutionProfile`; flows need smooth derivatives).
#[derive(Clone)]
pub struct FlowProfile {
    pub length: f64,
    pub r: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub dr: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d2r: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for FlowProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FlowProfile {{ length: {} }}", self.length)
    }
}

impl FlowProfile {
    /// r(s) = sin s on [0, pi].
    pub fn sphere() -> Self {
        Self {
            length: PI,
            r: Arc::new(|s| s.sin()),
            dr: Arc::new(|s| s.cos()),
            d2r: Arc::new(|s| -s.sin()),
        }
    }

    /// r(s) = sin s (1 + eps sin^2 s) on [0, pi]: elliptic equator at
    /// s = pi/2.
    pub fn bulge(eps: f64) -> Self {
        Self {
            length: PI,
            r: Arc::new(move |s| s.sin() * (1.0 + eps * s.sin() * s.sin())),
            dr: Arc::new(move |s| s.cos() * (1.0 + 3.0 * eps * s.sin() * s.sin())),
            d2r: Arc::new(move |s| {
                -s.sin() * (1.0 + 3.0 * eps * s.sin() * s.sin())
                    + 6.0 * eps * s.sin() * s.cos() * s.cos()
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub enum FlowGeometry {
    Torus,
    Sphere,
    Revolution(FlowProfile),
}

impl FlowGeometry {
    pub fn kind(&self) -> GeometryKind {
        match self {
            FlowGeometry::Torus => GeometryKind::Torus,
            FlowGeometry::Sphere => GeometryKind::Sphere,
            FlowGeometry::Revolution(_) => GeometryKind::Revolution,
        }
    }
}

pub fn torus_state(x: [f64; 2], xi: [f64; 2]) -> State {
    [x[0], x[1], xi[0], xi[1], 0.0, 0.0]
}

/// Sphere state from a position and a tangent direction; both are
/// normalized and the tangential part of xi extracted.
pub fn sphere_state(x: [f64; 3], xi: [f64; 3]) -> State {
    let xn = norm3(&x);
    let x = [x[0] / xn, x[1] / xn, x[2] / xn];
    let d = dot3(&x, &xi);
    let mut t = [xi[0] - d * x[0], xi[1] - d * x[1], xi[2] - d * x[2]];
    let tn = norm3(&t);
    for v in &mut t {
        *v /= tn;
    }
    [x[0], x[1], x[2], t[0], t[1], t[2]]
}

pub fn revolution_state(s: f64, theta: f64, xi_s: f64, xi_theta: f64) -> State {
    [s, theta, xi_s, xi_theta, 0.0, 0.0]
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// p = |xi|^2 in the metric of the given geometry.
pub fn p_value(geometry: &FlowGeometry, y: &State) -> f64 {
    match geometry {
        FlowGeometry::Torus => y[2] * y[2] + y[3] * y[3],
        FlowGeometry::Sphere => y[3] * y[3] + y[4] * y[4] + y[5] * y[5],
        FlowGeometry::Revolution(p) => {
            let r = (p.r)(y[0]);
            y[2] * y[2] + y[3] * y[3] / (r * r)
        }
    }
}

fn wrap_2pi(x: f64) -> f64 {
    x.rem_euclid(2.0 * PI)
}

fn wrap_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Advance one state by H_p-time dt (exact where the flow is known in
/// closed form, adaptive RK elsewhere).
pub fn flow_step(geometry: &FlowGeometry, y: &State, dt: f64) -> Result<State> {
    match geometry {
        FlowGeometry::Torus => Ok([
            wrap_2pi(y[0] + 2.0 * dt * y[2]),
            wrap_2pi(y[1] + 2.0 * dt * y[3]),
            y[2],
            y[3],
            0.0,
            0.0,
        ]),
        FlowGeometry::Sphere => {
            // great circle: angular speed 2 in the plane span(x, xi)
            let (c, s) = ((2.0 * dt).cos(), (2.0 * dt).sin());
            let mut out = [0.0; 6];
            for i in 0..3 {
                out[i] = y[i] * c + y[3 + i] * s;
                out[3 + i] = -y[i] * s + y[3 + i] * c;
            }
            Ok(out)
        }
        FlowGeometry::Revolution(prof) => {
            if y[3].abs() < 1e-13 {
                return Ok(meridian_step(prof, y, dt));
            }
            let pr = prof.clone();
            let rhs = move |_t: f64, v: &[f64], dv: &mut [f64]| {
                let r = (pr.r)(v[0]);
                let drds = (pr.dr)(v[0]);
                dv[0] = 2.0 * v[2];
                dv[1] = 2.0 * v[3] / (r * r);
                dv[2] = 2.0 * v[3] * v[3] * drds / (r * r * r);
                dv[3] = 0.0;
            };
            let mut v = vec![y[0], y[1], y[2], y[3]];
            rk45(&rhs, 0.0, dt, &mut v, 1e-11, 1e-13)?;
            Ok([v[0], wrap_2pi(v[1]), v[2], v[3], 0.0, 0.0])
        }
    }
}

/// Meridian geodesic (xi_theta = 0): s moves at speed 2 |xi_s| and
/// reflects at the poles, where theta jumps by pi (chart switch).
/// Unfolds the motion onto the circle [0, 2L): u = s when moving in
/// +s direction, u = 2L - s otherwise.
fn meridian_step(prof: &FlowProfile, y: &State, dt: f64) -> State {
    let l = prof.length;
    let speed = y[2].abs();
    let u0 = if y[2] >= 0.0 { y[0] } else { 2.0 * l - y[0] };
    let travel = 2.0 * dt * speed;
    let u = (u0 + travel).rem_euclid(2.0 * l);
    let (s_new, xi_dir) = if u <= l { (u, 1.0) } else { (2.0 * l - u, -1.0) };
    let crossings = ((u0 + travel) / l).floor() - (u0 / l).floor();
    let theta = wrap_2pi(y[1] + PI * crossings);
    [s_new, theta, speed * xi_dir, 0.0, 0.0, 0.0]
}

/// Phase-space distance used for closure detection, with angular
/// coordinates compared modulo 2 pi.
pub fn state_distance(geometry: &FlowGeometry, a: &State, b: &State) -> f64 {
    match geometry {
        FlowGeometry::Torus => (wrap_dist(a[0], b[0]).powi(2)
            + wrap_dist(a[1], b[1]).powi(2)
            + (a[2] - b[2]).powi(2)
            + (a[3] - b[3]).powi(2))
        .sqrt(),
        FlowGeometry::Sphere => a
            .iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        FlowGeometry::Revolution(_) => ((a[0] - b[0]).powi(2)
            + wrap_dist(a[1], b[1]).powi(2)
            + (a[2] - b[2]).powi(2)
            + (a[3] - b[3]).powi(2))
        .sqrt(),
    }
}

#[derive(Debug, Clone)]
pub struct GeodesicOrbit {
    pub kind: GeometryKind,
    /// Meridian length for revolution geometries (damping evaluation
    /// needs it); 0 elsewhere.
    pub length: f64,
    pub step: f64,
    pub samples: Vec<State>,
    /// (H_p-time of first return, phase-space distance at return).
    pub closure: Option<(f64, f64)>,
}

impl GeodesicOrbit {
    pub fn time_of(&self, j: usize) -> f64 {
        j as f64 * self.step
    }

    pub fn duration(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.step
    }
}

pub fn geodesic_flow(
    geometry: &FlowGeometry,
    state0: &State,
    total_time: f64,
    step: f64,
) -> Result<GeodesicOrbit> {
    if step > 1e-2 + 1e-15 || step <= 0.0 {
        return Err(Error::Argument(format!("flow step must lie in (0, 1e-2], got {step}")));
    }
    let p0 = p_value(geometry, state0);
    if (p0 - 1.0).abs() > 1e-10 {
        return Err(Error::Geometry(format!("initial state off p^-1(1): p = {p0}")));
    }
    let n = (total_time / step - 1e-12).ceil().max(1.0) as usize;
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(*state0);
    let mut y = *state0;
    let mut drift: f64 = 0.0;
    for _ in 0..n {
        y = flow_step(geometry, &y, step)?;
        drift = drift.max((p_value(geometry, &y) - 1.0).abs());
        samples.push(y);
    }
    if drift > 1e-8 {
        return Err(Error::Numerical(format!("energy drift {drift:e} along flow (step too large)")));
    }

    let closure = detect_closure(geometry, &samples, step)?;
    let length = match geometry {
        FlowGeometry::Revolution(p) => p.length,
        _ => 0.0,
    };
    Ok(GeodesicOrbit { kind: geometry.kind(), length, step, samples, closure })
}

/// Find the first return of the orbit to its initial state: coarse scan
/// over the samples, then golden-section refinement of the continuous
/// distance function.
fn detect_closure(
    geometry: &FlowGeometry,
    samples: &[State],
    step: f64,
) -> Result<Option<(f64, f64)>> {
    let y0 = &samples[0];
    let dist_at = |t: f64| -> Result<f64> {
        let y = flow_step(geometry, y0, t)?;
        Ok(state_distance(geometry, &y, y0))
    };
    // phase-space speed is at most ~sqrt(8); a true return can miss the
    // sample grid by up to speed * step / 2
    let coarse = 4.0 * step;
    let d: Vec<f64> = samples
        .iter()
        .map(|y| state_distance(geometry, y, y0))
        .collect();
    for j in 2..d.len() - 1 {
        if d[j] >= coarse || d[j] > d[j - 1] || d[j] > d[j + 1] {
            continue;
        }
        let (mut lo, mut hi) = ((j as f64 - 1.0) * step, (j as f64 + 1.0) * step);
        let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = dist_at(x1)?;
        let mut f2 = dist_at(x2)?;
        for _ in 0..200 {
            if hi - lo < 1e-12 {
                break;
            }
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = dist_at(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = dist_at(x2)?;
            }
        }
        let t = 0.5 * (lo + hi);
        let dd = dist_at(t)?;
        if dd < 1e-6 {
            return Ok(Some((t, dd)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_closes_at_pi() {
        let y0 = sphere_state([1.0, 0.2, -0.4], [0.0, 1.0, 0.3]);
        let orbit = geodesic_flow(&FlowGeometry::Sphere, &y0, 4.0, 0.01).unwrap();
        let (t, d) = orbit.closure.expect("great circle must close");
        assert!((t - PI).abs() < 1e-8, "closure time {t}");
        assert!(d < 1e-8);
        for y in &orbit.samples {
            assert!((p_value(&FlowGeometry::Sphere, y) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn torus_straight_line_speed_two() {
        let y0 = torus_state([0.3, 1.1], [1.0, 0.0]);
        let orbit = geodesic_flow(&FlowGeometry::Torus, &y0, 4.0, 0.01).unwrap();
        // x(t) = x0 + (2t, 0) mod 2 pi; closure at t = pi
        let j = 150;
        let t = orbit.time_of(j);
        assert!((orbit.samples[j][0] - wrap_2pi(0.3 + 2.0 * t)).abs() < 1e-12);
        assert!((orbit.samples[j][1] - 1.1).abs() < 1e-12);
        let (tc, _) = orbit.closure.expect("rational direction must close");
        assert!((tc - PI).abs() < 1e-9, "closure time {tc}");
    }

    #[test]
    fn revolution_equator_is_invariant() {
        let prof = FlowProfile::bulge(0.3);
        let s0 = PI / 2.0;
        let r0 = (prof.r)(s0);
        let geom = FlowGeometry::Revolution(prof);
        let y0 = revolution_state(s0, 0.0, 0.0, r0);
        let orbit = geodesic_flow(&geom, &y0, 6.0, 0.01).unwrap();
        for y in &orbit.samples {
            assert!((y[0] - s0).abs() < 1e-9, "left the equator: s = {}", y[0]);
            assert!((p_value(&geom, y) - 1.0).abs() < 1e-9);
        }
        let (t, d) = orbit.closure.expect("equator must close");
        assert!((t - PI * r0).abs() < 1e-7, "closure time {t} vs {}", PI * r0);
        assert!(d < 1e-7);
    }

    #[test]
    fn revolution_clairaut_conserved() {
        let geom = FlowGeometry::Revolution(FlowProfile::sphere());
        // generic orbit: tilted start
        let s0 = 1.1_f64;
        let r0 = s0.sin();
        let xi_th = 0.6 * r0;
        let xi_s = (1.0_f64 - (xi_th / r0) * (xi_th / r0)).sqrt();
        let y0 = revolution_state(s0, 0.0, xi_s, xi_th);
        let orbit = geodesic_flow(&geom, &y0, 5.0, 0.005).unwrap();
        for y in &orbit.samples {
            assert!((y[3] - xi_th).abs() < 1e-12, "Clairaut drift");
            assert!((p_value(&geom, y) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn revolution_sphere_matches_round_sphere_flow() {
        // the surface of revolution r = sin s is the round sphere; a
        // meridian-tilted orbit must still close at H_p-time pi.
        let geom = FlowGeometry::Revolution(FlowProfile::sphere());
        let s0 = PI / 2.0;
        let xi_th = 0.5_f64;
        let xi_s = (1.0 - xi_th * xi_th).sqrt();
        let y0 = revolution_state(s0, 0.0, xi_s, xi_th);
        let orbit = geodesic_flow(&geom, &y0, 4.0, 0.005).unwrap();
        let (t, _) = orbit.closure.expect("sphere geodesic closes");
        assert!((t - PI).abs() < 1e-6, "closure time {t}");
    }

    #[test]
    fn meridian_passes_poles() {
        let geom = FlowGeometry::Revolution(FlowProfile::sphere());
        let y0 = revolution_state(1.0, 0.3, 1.0, 0.0);
        let orbit = geodesic_flow(&geom, &y0, 4.0, 0.01).unwrap();
        // meridian great circle: closes at H_p-time pi
        let (t, _) = orbit.closure.expect("meridian closes");
        assert!((t - PI).abs() < 1e-9, "closure time {t}");
        for y in &orbit.samples {
            assert!(y[0] >= 0.0 && y[0] <= PI);
        }
    }

    #[test]
    fn off_shell_start_rejected() {
        let y0 = torus_state([0.0, 0.0], [1.0, 1.0]);
        assert!(geodesic_flow(&FlowGeometry::Torus, &y0, 1.0, 0.01).is_err());
    }

    proptest::proptest! {
        #[test]
        fn torus_flow_stays_on_shell(psi in 0.0_f64..std::f64::consts::TAU, t in 0.0_f64..10.0) {
            let y0 = torus_state([0.2, 1.7], [psi.cos(), psi.sin()]);
            let y = flow_step(&FlowGeometry::Torus, &y0, t).unwrap();
            approx::assert_relative_eq!(p_value(&FlowGeometry::Torus, &y), 1.0, epsilon = 1e-12);
            // direction is carried unchanged
            approx::assert_relative_eq!(y[2], y0[2], epsilon = 1e-12);
            approx::assert_relative_eq!(y[3], y0[3], epsilon = 1e-12);
        }

        #[test]
        fn sphere_flow_stays_on_shell(psi in 0.0_f64..std::f64::consts::TAU, t in 0.0_f64..10.0) {
            let y0 = sphere_state([0.3, -0.5, 0.8], [psi.cos(), psi.sin(), 0.4]);
            let y = flow_step(&FlowGeometry::Sphere, &y0, t).unwrap();
            approx::assert_relative_eq!(p_value(&FlowGeometry::Sphere, &y), 1.0, epsilon = 1e-10);
        }
    }
}
