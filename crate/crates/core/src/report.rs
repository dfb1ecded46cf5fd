//! Plain-text table emission: CSV with comma separators, LF endings,
//! and every float printed with 17 significant digits so reruns hash
//! identically.

use crate::geometry::{ACurve, GeodesicOrbit};
use crate::spectra::{ClusterReport, ScanPoint, Spectrum};

/// 17 significant digits, enough to round-trip an f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

pub fn spectrum_csv(spectrum: &Spectrum, clusters: Option<&ClusterReport>) -> String {
    let mut out = String::from("re_tau,im_tau,residual,group_id,trusted,cluster_k\n");
    for (i, r) in spectrum.records.iter().enumerate() {
        let k = clusters
            .and_then(|c| c.cluster_of(i))
            .map(|k| k.to_string())
            .unwrap_or_default();
        out.push_str(&line(&[
            fmt_f64(r.tau.re),
            fmt_f64(r.tau.im),
            fmt_f64(r.residual),
            r.group_id.to_string(),
            r.trusted.to_string(),
            k,
        ]));
    }
    out
}

pub fn scan_csv(points: &[ScanPoint]) -> String {
    let mut out = String::from("re_tau,im_tau,norm_L2,norm_H\n");
    for p in points {
        out.push_str(&line(&[
            fmt_f64(p.tau.re),
            fmt_f64(p.tau.im),
            fmt_f64(p.norm_l2),
            fmt_f64(p.norm_h),
        ]));
    }
    out
}

pub fn orbit_csv(orbit: &GeodesicOrbit) -> String {
    let mut out = String::from("t,x1,x2,x3,xi1,xi2,xi3\n");
    for (j, y) in orbit.samples.iter().enumerate() {
        let mut fields = vec![fmt_f64(orbit.time_of(j))];
        fields.extend(y.iter().map(|v| fmt_f64(*v)));
        out.push_str(&line(&fields));
    }
    out
}

pub fn acurve_csv(curve: &ACurve) -> String {
    let mut out = String::from("T,A_T\n");
    for (t, v) in curve.t_list.iter().zip(&curve.values) {
        out.push_str(&line(&[fmt_f64(*t), fmt_f64(*v)]));
    }
    out
}

/// Generic (t, value) table for error curves and energy traces.
pub fn series_csv(t_name: &str, v_name: &str, rows: &[(f64, f64)]) -> String {
    let mut out = format!("{t_name},{v_name}\n");
    for (t, v) in rows {
        out.push_str(&line(&[fmt_f64(*t), fmt_f64(*v)]));
    }
    out
}
