//! Real spherical harmonics and Gauss-Legendre quadrature.

use std::f64::consts::PI;

/// Fully normalized associated Legendre values \bar P_l^m(x) for all
/// l <= lmax at fixed m, such that the real spherical harmonics below
/// are orthonormal on the unit sphere. Returns values indexed by l - m.
pub fn normalized_plm(lmax: u32, m: u32, x: f64) -> Vec<f64> {
    let lmax = lmax as i64;
    let m = m as i64;
    debug_assert!(m <= lmax);
    let sx = (1.0 - x * x).max(0.0).sqrt();
    let mut out = Vec::with_capacity((lmax - m + 1) as usize);
    // P_m^m
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        pmm *= -(((2 * k + 1) as f64) / ((2 * k) as f64)).sqrt() * sx;
    }
    out.push(pmm);
    if lmax == m {
        return out;
    }
    let mut p_prev = pmm;
    let mut p = ((2 * m + 3) as f64).sqrt() * x * pmm;
    out.push(p);
    for l in (m + 2)..=lmax {
        let a = (((4 * l * l - 1) as f64) / ((l * l - m * m) as f64)).sqrt();
        let b = ((((l - 1) * (l - 1) - m * m) as f64) / ((4 * (l - 1) * (l - 1) - 1) as f64)).sqrt();
        let p_next = a * (x * p - b * p_prev);
        p_prev = p;
        p = p_next;
        out.push(p);
    }
    out
}

/// Real spherical harmonic Y_{l,m}(theta, phi); m > 0 pairs with
/// sqrt(2) cos(m phi), m < 0 with sqrt(2) sin(|m| phi).
pub fn real_ylm(l: u32, m: i32, cos_theta: f64, phi: f64) -> f64 {
    let am = m.unsigned_abs();
    let plm = normalized_plm(l, am, cos_theta)[(l - am) as usize];
    if m == 0 {
        plm
    } else if m > 0 {
        std::f64::consts::SQRT_2 * plm * (m as f64 * phi).cos()
    } else {
        std::f64::consts::SQRT_2 * plm * (am as f64 * phi).sin()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], exact for polynomials
/// of degree <= 2n - 1. Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// (P_n(x), P_n'(x)).
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = (((2 * k - 1) as f64) * x * p1 - ((k - 1) as f64) * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
