use crate::error::{Error, Result};
use crate::linalg;
use crate::spectra::generator::GeneratorMatrix;
use crate::{CVec, C64};
use ndarray_linalg::Eig;

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;
pub const DEFAULT_GROUP_TOL: f64 = 1e-6;
/// Biorthogonality floor below which a group is treated as defective.
pub const DEFECTIVE_TOL: f64 = 1e-12;

/// One eigenfrequency of the pencil P(tau) = K + 2 i tau A - tau^2,
/// with unit-normalized right and left eigenvectors of the companion
/// matrix and a residual measured against the pencil itself.
#[derive(Debug, Clone)]
pub struct EigenRecord {
    pub tau: C64,
    /// Right eigenvector of G, unit norm.
    pub right: CVec,
    /// Left eigenvector of G, unit norm (G^H left = conj(tau) left).
    pub left: CVec,
    /// <left, right> after unit normalization; the rank-one spectral
    /// weight is right <left, .> / biorth.
    pub biorth: C64,
    /// ||P(tau) u0|| / ((1 + |tau|^2) ||u0||) with u0 the first block
    /// of the right vector.
    pub residual: f64,
    pub group_id: usize,
    pub trusted: bool,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub records: Vec<EigenRecord>,
    /// Record indices per group id.
    pub groups: Vec<Vec<usize>>,
    pub half_dim: usize,
    pub a_sup: f64,
    pub trust_radius: f64,
    pub residual_tol: f64,
}

impl Spectrum {
    pub fn trusted(&self) -> impl Iterator<Item = &EigenRecord> {
        self.records.iter().filter(|r| r.trusted)
    }

    /// Minimal Im tau over trusted records away from tau = 0.
    pub fn d_hat(&self) -> Option<f64> {
        self.trusted()
            .filter(|r| r.tau.norm() > 1e-8)
            .map(|r| r.tau.im)
            .min_by(f64::total_cmp)
    }

    pub fn group_defective(&self, group_id: usize) -> bool {
        self.groups[group_id]
            .iter()
            .any(|&i| self.records[i].biorth.norm() < DEFECTIVE_TOL)
    }

    /// Group containing the eigenfrequency closest to tau.
    pub fn group_near(&self, tau: C64) -> Option<usize> {
        self.records
            .iter()
            .min_by(|a, b| (a.tau - tau).norm().total_cmp(&(b.tau - tau).norm()))
            .map(|r| r.group_id)
    }
}

pub fn compute_eigenfrequencies(gen: &GeneratorMatrix, tol: f64) -> Result<Spectrum> {
    compute_eigenfrequencies_with(gen, tol, DEFAULT_GROUP_TOL)
}

pub fn compute_eigenfrequencies_with(
    gen: &GeneratorMatrix,
    tol: f64,
    group_tol: f64,
) -> Result<Spectrum> {
    if tol <= 0.0 || group_tol <= 0.0 {
        return Err(Error::Argument("tolerances must be positive".into()));
    }
    let n = gen.half_dim;
    let dim = gen.g.nrows();
    let (vals, vecs) = gen
        .g
        .eig()
        .map_err(|e| Error::Eigensolver(format!("dense eigensolve failed: {e}")))?;
    // Left eigenvectors from the inverse: rows of V^{-1} satisfy
    // w_i^T G = tau_i w_i^T and w_i^T v_j = delta_ij.
    let vinv = linalg::inverse(&vecs)
        .map_err(|e| Error::Eigensolver(format!("eigenvector matrix singular: {e}")))?;

    // Deterministic order: sort by (Re, Im).
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| {
        vals[i]
            .re
            .total_cmp(&vals[j].re)
            .then(vals[i].im.total_cmp(&vals[j].im))
    });

    let mut records = Vec::with_capacity(dim);
    for &idx in &order {
        let tau = vals[idx];
        let right: CVec = vecs.column(idx).to_owned();
        let w: CVec = vinv.row(idx).to_owned();
        let left: CVec = w.mapv(|z| z.conj());
        let rnorm = linalg::norm2(&right);
        let lnorm = linalg::norm2(&left);
        let right = right.mapv(|z| z / rnorm);
        let left = left.mapv(|z| z / lnorm);
        let biorth = linalg::inner(&left, &right);

        let u0: CVec = right.slice(ndarray::s![..n]).to_owned();
        let u0_norm = linalg::norm2(&u0);
        let residual = if u0_norm > 0.0 {
            linalg::norm2(&gen.pencil_apply(tau, &u0)) / ((1.0 + tau.norm_sqr()) * u0_norm)
        } else {
            f64::INFINITY
        };
        let trusted = tau.re.abs() <= gen.trust_radius && residual <= tol;
        records.push(EigenRecord {
            tau,
            right,
            left,
            biorth,
            residual,
            group_id: usize::MAX,
            trusted,
        });
    }

    assign_groups(&mut records, group_tol);
    let n_groups = records.iter().map(|r| r.group_id + 1).max().unwrap_or(0);
    let mut groups = vec![Vec::new(); n_groups];
    for (i, r) in records.iter().enumerate() {
        groups[r.group_id].push(i);
    }

    Ok(Spectrum {
        records,
        groups,
        half_dim: n,
        a_sup: gen.a_sup,
        trust_radius: gen.trust_radius,
        residual_tol: tol,
    })
}

/// Single-linkage grouping: records i, j are linked whenever
/// |tau_i - tau_j| <= group_tol (1 + max(|tau_i|, |tau_j|)). Records
/// arrive sorted by Re, so linking only needs a bounded forward scan.
fn assign_groups(records: &mut [EigenRecord], group_tol: f64) {
    let m = records.len();
    let max_abs = records.iter().map(|r| r.tau.norm()).fold(0.0, f64::max);
    let reach = group_tol * (1.0 + max_abs);
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..m {
        for j in i + 1..m {
            if records[j].tau.re - records[i].tau.re > reach {
                break;
            }
            let scale = 1.0 + records[i].tau.norm().max(records[j].tau.norm());
            if (records[i].tau - records[j].tau).norm() <= group_tol * scale {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = rj.min(ri);
                }
            }
        }
    }
    // Group ids in order of first appearance in the sorted record list.
    let mut next = 0usize;
    let mut id_of_root = vec![usize::MAX; m];
    for i in 0..m {
        let r = find(&mut parent, i);
        if id_of_root[r] == usize::MAX {
            id_of_root[r] = next;
            next += 1;
        }
        records[i].group_id = id_of_root[r];
    }
}
