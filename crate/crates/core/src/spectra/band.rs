use crate::error::{Error, Result};
use crate::linalg;
use crate::manifolds::SpectralModel;
use crate::spectra::eig::Spectrum;
use crate::CVec;

/// Summary of the horizontal band structure of a computed spectrum.
#[derive(Debug, Clone)]
pub struct BandReport {
    /// min Im tau over trusted records with |tau| > 0.
    pub d_hat: f64,
    /// Trajectory-average infimum estimate, imported from the flow side.
    pub a_inf_hat: f64,
    pub eps: f64,
    /// Trusted records with Im tau < a_inf_hat - eps, counted per
    /// |Re tau| decade: bins [0,1), [1,10), [10,100), ...
    pub strip_counts: Vec<((f64, f64), usize)>,
    pub zero_mode_ok: bool,
}

pub fn band_summary(
    spectrum: &Spectrum,
    model: &SpectralModel,
    a_inf_hat: f64,
    eps: f64,
) -> Result<BandReport> {
    if spectrum.trusted().next().is_none() {
        return Err(Error::Numerical("band summary of a spectrum with no trusted records".into()));
    }
    let d_hat = spectrum
        .d_hat()
        .ok_or_else(|| Error::Numerical("no trusted records away from tau = 0".into()))?;

    let zero_mode_ok = spectrum
        .trusted()
        .filter(|r| r.tau.norm() <= 1e-8)
        .any(|r| {
            let n = spectrum.half_dim;
            let Some(e0) = model.const_vector() else { return false };
            let u0: CVec = r.right.slice(ndarray::s![..n]).to_owned();
            let u0n = linalg::norm2(&u0);
            if u0n == 0.0 {
                return false;
            }
            let phase = linalg::inner(&e0, &u0);
            let dev: f64 = (0..n)
                .map(|i| (u0[i] - phase * e0[i]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            dev / u0n <= 1e-6
        });

    let cutoff = a_inf_hat - eps;
    let max_re = spectrum
        .trusted()
        .map(|r| r.tau.re.abs())
        .fold(0.0, f64::max);
    let mut strip_counts = Vec::new();
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while lo <= max_re {
        let count = spectrum
            .trusted()
            .filter(|r| r.tau.im < cutoff && r.tau.re.abs() >= lo && r.tau.re.abs() < hi)
            .count();
        strip_counts.push(((lo, hi), count));
        lo = hi;
        hi *= 10.0;
    }

    Ok(BandReport { d_hat, a_inf_hat, eps, strip_counts, zero_mode_ok })
}

impl BandReport {
    pub fn strip_total(&self) -> usize {
        self.strip_counts.iter().map(|(_, c)| c).sum()
    }
}
