use crate::error::{Error, Result};
use crate::manifolds::{GeometryKind, SpectralModel};
use crate::spectra::eig::Spectrum;

/// One Zoll cluster: trusted records near the center k + alpha/4.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub k: i64,
    pub center: f64,
    /// Record indices (into the spectrum) assigned to this cluster.
    pub members: Vec<usize>,
    /// Rectangle half-width C_fit / k.
    pub half_width: f64,
    /// Largest Im tau among members (rectangle height).
    pub im_max: f64,
}

#[derive(Debug, Clone)]
pub struct ClusterReport {
    pub maslov_alpha: i64,
    pub c_fit: f64,
    pub k0: i64,
    pub clusters: Vec<Cluster>,
    /// Record indices rejected as outliers of their nearest cluster.
    pub outliers: Vec<usize>,
}

/// Partition trusted records with Re tau >= k0 - 1/4 into clusters
/// around k + alpha/4. Assignment ties break toward smaller k. The fit
/// constant comes from the scaled deviations d = k |Re tau - center|:
/// records beyond three times a high quantile of d are set aside as
/// outliers and C_fit is the max over the rest.
pub fn cluster_partition(
    spectrum: &Spectrum,
    model: &SpectralModel,
    alpha: i64,
    k0: i64,
) -> Result<ClusterReport> {
    if model.geometry.kind() != GeometryKind::Sphere {
        return Err(Error::Geometry(format!(
            "cluster partition requires the Zoll (sphere) geometry, got {}",
            model.geometry.name()
        )));
    }
    if k0 < 1 {
        return Err(Error::Argument(format!("k0 must be >= 1, got {k0}")));
    }
    let quarter = alpha as f64 / 4.0;
    let threshold = k0 as f64 - 0.25;

    // (record index, assigned k, scaled deviation)
    let mut assigned: Vec<(usize, i64, f64)> = Vec::new();
    for (i, r) in spectrum.records.iter().enumerate() {
        if !r.trusted || r.tau.re < threshold {
            continue;
        }
        let raw = r.tau.re - quarter;
        // nearest integer center; exact halves go to the smaller k
        let mut k = raw.round() as i64;
        if (raw - raw.floor() - 0.5).abs() < 1e-12 {
            k = raw.floor() as i64;
        }
        let k = k.max(k0);
        let dev = k as f64 * (r.tau.re - (k as f64 + quarter)).abs();
        assigned.push((i, k, dev));
    }

    if assigned.is_empty() {
        return Ok(ClusterReport {
            maslov_alpha: alpha,
            c_fit: 0.0,
            k0,
            clusters: Vec::new(),
            outliers: Vec::new(),
        });
    }

    let mut devs: Vec<f64> = assigned.iter().map(|&(_, _, d)| d).collect();
    devs.sort_by(f64::total_cmp);
    let q90 = devs[((devs.len() as f64 * 0.9) as usize).min(devs.len() - 1)];
    let cut = 3.0 * q90.max(f64::EPSILON);
    let outliers: Vec<usize> = assigned
        .iter()
        .filter(|&&(_, _, d)| d > cut)
        .map(|&(i, _, _)| i)
        .collect();
    let c_fit = assigned
        .iter()
        .filter(|&&(_, _, d)| d <= cut)
        .map(|&(_, _, d)| d)
        .fold(0.0, f64::max);

    let kmin = assigned.iter().map(|&(_, k, _)| k).min().unwrap();
    let kmax = assigned.iter().map(|&(_, k, _)| k).max().unwrap();
    let mut clusters = Vec::new();
    for k in kmin..=kmax {
        let members: Vec<usize> = assigned
            .iter()
            .filter(|&&(i, kk, d)| kk == k && d <= cut && !outliers.contains(&i))
            .map(|&(i, _, _)| i)
            .collect();
        if members.is_empty() {
            continue;
        }
        let im_max = members
            .iter()
            .map(|&i| spectrum.records[i].tau.im)
            .fold(0.0, f64::max);
        clusters.push(Cluster {
            k,
            center: k as f64 + quarter,
            members,
            half_width: c_fit / k as f64,
            im_max,
        });
    }

    Ok(ClusterReport { maslov_alpha: alpha, c_fit, k0, clusters, outliers })
}

impl ClusterReport {
    /// Cluster id (index into clusters) per record, if any.
    pub fn cluster_of(&self, record: usize) -> Option<i64> {
        self.clusters
            .iter()
            .find(|c| c.members.contains(&record))
            .map(|c| c.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::{build_sphere_model, DampingSpec};
    use crate::spectra::eig::compute_eigenfrequencies;
    use crate::spectra::generator::assemble_generator;

    /// Undamped sphere: Re tau = sqrt(l(l+1)) = l + 1/2 - 1/(8l) + ...,
    /// so the scaled deviations approach 1/8 from below.
    #[test]
    fn undamped_sphere_c_fit() {
        let model = build_sphere_model(30, &DampingSpec::constant(0.0)).unwrap();
        let gen = assemble_generator(&model);
        let spec = compute_eigenfrequencies(&gen, 1e-8).unwrap();
        let rep = cluster_partition(&spec, &model, 2, 1).unwrap();
        assert!(rep.outliers.is_empty());
        assert!(
            rep.c_fit >= 0.12 && rep.c_fit <= 0.13,
            "C_fit = {} outside [0.12, 0.13]",
            rep.c_fit
        );
        // every trusted record in range lands in exactly one cluster
        for c in &rep.clusters {
            assert_eq!(c.members.len(), 2 * c.k as usize + 1, "cluster k = {}", c.k);
            for &i in &c.members {
                let l = c.k as f64;
                let exact = (l * (l + 1.0)).sqrt();
                assert!((spec.records[i].tau.re - exact).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn damped_membership_matches_undamped() {
        let a = DampingSpec::sphere_zonal(vec![0.05, 0.0, 0.3]);
        let undamped = build_sphere_model(20, &DampingSpec::constant(0.0)).unwrap();
        let damped = build_sphere_model(20, &a).unwrap();
        let s0 = compute_eigenfrequencies(&assemble_generator(&undamped), 1e-8).unwrap();
        let s1 = compute_eigenfrequencies(&assemble_generator(&damped), 1e-8).unwrap();
        let r0 = cluster_partition(&s0, &undamped, 2, 1).unwrap();
        let r1 = cluster_partition(&s1, &damped, 2, 1).unwrap();
        // damping moves Re tau by O(1/k): per-cluster counts are
        // preserved over the common trusted range
        for (c0, c1) in r0.clusters.iter().zip(&r1.clusters) {
            assert_eq!(c0.k, c1.k);
            if c0.k < r0.clusters.last().unwrap().k {
                assert_eq!(c0.members.len(), c1.members.len(), "cluster k = {}", c0.k);
            }
        }
    }

    #[test]
    fn no_records_above_k0() {
        let model = build_sphere_model(4, &DampingSpec::constant(0.0)).unwrap();
        let spec = compute_eigenfrequencies(&assemble_generator(&model), 1e-8).unwrap();
        let rep = cluster_partition(&spec, &model, 2, 50).unwrap();
        assert!(rep.clusters.is_empty());
    }

    #[test]
    fn torus_rejected() {
        use crate::manifolds::build_torus_model;
        let model = build_torus_model(2, &DampingSpec::constant(0.1)).unwrap();
        let spec = compute_eigenfrequencies(&assemble_generator(&model), 1e-8).unwrap();
        assert!(cluster_partition(&spec, &model, 2, 1).is_err());
    }
}
