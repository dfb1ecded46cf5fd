//! Adaptive Dormand-Prince 5(4) integrator over flat real state
//! vectors, shared by the geodesic flow and the time-domain stepper.

use crate::error::{Error, Result};

const MAX_STEPS: usize = 50_000_000;

/// Integrate y' = f(t, y) from t0 to t1 in place with embedded 5(4)
/// error control. `f` writes the derivative into its third argument.
pub fn rk45<F>(f: &F, t0: f64, t1: f64, y: &mut [f64], rtol: f64, atol: f64) -> Result<()>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if t1 < t0 {
        return Err(Error::Argument("rk45 integrates forward only".into()));
    }
    if t1 == t0 {
        return Ok(());
    }
    let n = y.len();
    let mut k = vec![vec![0.0; n]; 7];
    let mut ytmp = vec![0.0; n];
    let mut y5 = vec![0.0; n];

    let mut t = t0;
    let mut h = ((t1 - t0) / 100.0).min(0.1).max(1e-8);
    let mut steps = 0usize;
    f(t, y, &mut k[0]);

    while t < t1 {
        if steps >= MAX_STEPS {
            return Err(Error::Numerical("rk45 exceeded the step budget".into()));
        }
        steps += 1;
        if t + h > t1 {
            h = t1 - t;
        }

        for (stage, (ci, row)) in STAGES.iter().enumerate() {
            for j in 0..n {
                let mut acc = 0.0;
                for (l, &a) in row.iter().enumerate() {
                    acc += a * k[l][j];
                }
                ytmp[j] = y[j] + h * acc;
            }
            f(t + ci * h, &ytmp, &mut k[stage + 1]);
        }

        let mut err: f64 = 0.0;
        for j in 0..n {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for l in 0..7 {
                d5 += B5[l] * k[l][j];
                d4 += B4[l] * k[l][j];
            }
            y5[j] = y[j] + h * d5;
            let sc = atol + rtol * y[j].abs().max(y5[j].abs());
            let e = h * (d5 - d4) / sc;
            err += e * e;
        }
        let err = (err / n as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&y5);
            // FSAL: k7 of the accepted step is k1 of the next.
            let last = k[6].clone();
            k[0].copy_from_slice(&last);
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * factor).min(t1 - t + 1e-300).max(1e-12);
        if err > 1.0 {
            // rejected: k1 still belongs to the current point, recompute
            f(t, y, &mut k[0]);
        }
    }
    Ok(())
}

// Dormand-Prince tableau: c_i and the a_{ij} rows for stages 2..7.
const STAGES: [(f64, &[f64]); 6] = [
    (1.0 / 5.0, &[1.0 / 5.0]),
    (3.0 / 10.0, &[3.0 / 40.0, 9.0 / 40.0]),
    (4.0 / 5.0, &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0]),
    (
        8.0 / 9.0,
        &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    ),
    (
        1.0,
        &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    ),
    (
        1.0,
        &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ),
];

const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];
