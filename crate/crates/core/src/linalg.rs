//! Dense complex linear-algebra kernels shared across the crate.

use crate::error::{Error, Result};
use crate::{CMat, CVec, C64};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, Inverse, Solve, UPLO, SVD};

/// Max-column-sum norm.
pub fn one_norm(a: &CMat) -> f64 {
    let mut best = 0.0;
    for col in a.columns() {
        let s: f64 = col.iter().map(|z| z.norm()).sum();
        if s > best {
            best = s;
        }
    }
    best
}

/// Entrywise max norm.
pub fn max_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest singular value.
pub fn opnorm(a: &CMat) -> Result<f64> {
    let (_, s, _) = a.svd(false, false)?;
    Ok(s.iter().cloned().fold(0.0, f64::max))
}

/// Smallest singular value.
pub fn sigma_min(a: &CMat) -> Result<f64> {
    let (_, s, _) = a.svd(false, false)?;
    Ok(s.iter().cloned().fold(f64::INFINITY, f64::min))
}

pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    let (_, s, _) = a.svd(false, false)?;
    Ok(s.to_vec())
}

/// Principal square root of a Hermitian positive-definite matrix,
/// together with its inverse.
pub fn hermitian_sqrt_pair(a: &CMat) -> Result<(CMat, CMat)> {
    let (vals, vecs) = a.eigh(UPLO::Lower)?;
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::Numerical(format!(
            "hermitian sqrt of non-positive matrix (min eigenvalue {min:e})"
        )));
    }
    let n = a.nrows();
    let mut sqrt = Array2::<C64>::zeros((n, n));
    let mut inv = Array2::<C64>::zeros((n, n));
    // V diag(s) V^H with s = sqrt(vals) resp. 1/sqrt(vals).
    // eigh here hands back conjugated columns for complex input
    // (row-major LAPACK round trip), so the true eigenvector entries
    // are conj(vecs[(r, j)]).
    for j in 0..n {
        let s = vals[j].sqrt();
        for r in 0..n {
            for c in 0..n {
                let w = vecs[(r, j)].conj() * vecs[(c, j)];
                sqrt[(r, c)] += w * s;
                inv[(r, c)] += w / s;
            }
        }
    }
    Ok((sqrt, inv))
}

pub fn identity(n: usize) -> CMat {
    Array2::eye(n)
}

/// exp(A) by scaling-and-squaring with Pade(13) (Higham 2005).
pub fn expm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Argument("expm requires a square matrix".into()));
    }
    let theta13 = 5.371920351148152;
    let norm = one_norm(a);
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    let scale = C64::new((0.5f64).powi(s), 0.0);
    let a = a.mapv(|z| z * scale);

    let b: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let id = identity(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let u_inner = a6.mapv(|z| z * b[13]) + a4.mapv(|z| z * b[11]) + a2.mapv(|z| z * b[9]);
    let u_poly = a6.dot(&u_inner)
        + a6.mapv(|z| z * b[7])
        + a4.mapv(|z| z * b[5])
        + a2.mapv(|z| z * b[3])
        + id.mapv(|z| z * b[1]);
    let u = a.dot(&u_poly);

    let v_inner = a6.mapv(|z| z * b[12]) + a4.mapv(|z| z * b[10]) + a2.mapv(|z| z * b[8]);
    let v = a6.dot(&v_inner)
        + a6.mapv(|z| z * b[6])
        + a4.mapv(|z| z * b[4])
        + a2.mapv(|z| z * b[2])
        + id.mapv(|z| z * b[0]);

    // (V - U)^{-1} (V + U)
    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut r = solve_matrix(&lhs, &rhs)?;
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}

/// Solve A X = B column by column via LU.
pub fn solve_matrix(a: &CMat, b: &CMat) -> Result<CMat> {
    use ndarray_linalg::{Factorize, Solve as _};
    let lu = a.factorize()?;
    let n = b.nrows();
    let m = b.ncols();
    let mut x = Array2::<C64>::zeros((n, m));
    for j in 0..m {
        let col: CVec = b.column(j).to_owned();
        let sol = lu.solve(&col)?;
        x.column_mut(j).assign(&sol);
    }
    Ok(x)
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    Ok(a.inv()?)
}

pub fn solve_vec(a: &CMat, b: &CVec) -> Result<CVec> {
    Ok(a.solve(b)?)
}

pub fn norm2(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Ordinary least-squares slope of y against x, with the standard
/// error of the slope. Returns (slope, intercept, stderr).
pub fn ols_slope(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n < 3 || n != y.len() {
        return Err(Error::Argument(format!("ols_slope needs >= 3 points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Argument("degenerate abscissae in ols_slope".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(u, v)| {
            let e = v - (intercept + slope * u);
            e * e
        })
        .sum();
    let stderr = (ss_res / (nf - 2.0) / sxx).sqrt();
    Ok((slope, intercept, stderr))
}

pub fn cvec_from(re: impl IntoIterator<Item = f64>) -> CVec {
    Array1::from_iter(re.into_iter().map(|x| C64::new(x, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn expm_diagonal() {
        let a = array![[c(0.0, 1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-0.3, 0.0)]];
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - c(0.0, 1.0).exp()).norm() < 1e-14);
        assert!((e[(1, 1)] - c(-0.3, 0.0).exp()).norm() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn expm_nilpotent_large_norm() {
        // exp([[0, t],[0,0]]) = [[1,t],[0,1]] exactly, also after scaling
        let t = 1.0e3;
        let a = array![[c(0.0, 0.0), c(t, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        let e = expm(&a).unwrap();
        assert!((e[(0, 1)] - c(t, 0.0)).norm() / t < 1e-12);
    }

    #[test]
    fn expm_vs_series_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 6;
        let a = Array2::from_shape_fn((n, n), |_| {
            c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
        });
        // Taylor series converges fast for ||A|| < 1
        let mut sum = identity(n);
        let mut term = identity(n);
        for k in 1..40 {
            term = term.dot(&a).mapv(|z| z / k as f64);
            sum = sum + &term;
        }
        let e = expm(&a).unwrap();
        assert!(max_norm(&(&e - &sum)) < 1e-12);
    }

    #[test]
    fn sigma_min_diagonal() {
        let a = array![[c(3.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.5)]];
        assert!((sigma_min(&a).unwrap() - 0.5).abs() < 1e-14);
        assert!((opnorm(&a).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_sqrt_roundtrip() {
        let a = array![[c(2.0, 0.0), c(0.5, 0.5)], [c(0.5, -0.5), c(3.0, 0.0)]];
        let (s, si) = hermitian_sqrt_pair(&a).unwrap();
        assert!(max_norm(&(&s.dot(&s) - &a)) < 1e-12);
        assert!(max_norm(&(&s.dot(&si) - &identity(2))) < 1e-12);
    }

    #[test]
    fn ols_recovers_line() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.25 * v).collect();
        let (m, b, se) = ols_slope(&x, &y).unwrap();
        assert!((m + 0.25).abs() < 1e-12);
        assert!((b - 3.0).abs() < 1e-12);
        assert!(se < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn ols_exact_on_affine_data(slope in -5.0_f64..5.0, icept in -5.0_f64..5.0) {
            let x: Vec<f64> = (0..12).map(|i| 0.3 * i as f64).collect();
            let y: Vec<f64> = x.iter().map(|v| icept + slope * v).collect();
            let (m, b, _) = ols_slope(&x, &y).unwrap();
            approx::assert_relative_eq!(m, slope, epsilon = 1e-9);
            approx::assert_relative_eq!(b, icept, epsilon = 1e-9);
        }

        #[test]
        fn expm_of_scalar_matches_exp(re in -1.0_f64..1.0, im in -1.0_f64..1.0) {
            let a = array![[c(re, im)]];
            let e = expm(&a).unwrap();
            let exact = c(re, im).exp();
            approx::assert_relative_eq!(e[[0, 0]].re, exact.re, epsilon = 1e-12);
            approx::assert_relative_eq!(e[[0, 0]].im, exact.im, epsilon = 1e-12);
        }
    }
}
