use crate::error::{Error, Result};
use crate::linalg;
use crate::spectra::eig::Spectrum;
use crate::spectra::generator::GeneratorMatrix;
use crate::{CMat, CVec, C64, IM};
use ndarray_linalg::QR;

/// Biorthogonality floor below which the rank-one sum is abandoned for
/// the invariant-subspace construction. Numerically defective groups
/// surface with <l, r> near sqrt(machine eps), so the cut sits well
/// above that; the subspace route is exact for semisimple groups too,
/// only costlier.
const FALLBACK_TOL: f64 = 1e-6;

/// One term of the modal expansion: the spectral projector of a group
/// of eigenfrequencies in factored form Pi = Q C^H, together with the
/// compression S = C^H G Q of the generator onto the group subspace, so
/// that exp(itG) Pi = Q exp(itS) C^H covers semisimple and defective
/// groups alike.
#[derive(Debug, Clone)]
pub struct ModeTerm {
    pub group_id: usize,
    pub taus: Vec<C64>,
    pub rank: usize,
    pub defective: bool,
    pub idempotency_residual: f64,
    basis: CMat,
    cobasis: CMat,
    small: CMat,
}

impl ModeTerm {
    /// Pi x.
    pub fn apply(&self, x: &CVec) -> CVec {
        let c = self.coeffs(x);
        self.basis.dot(&c)
    }

    /// exp(itG) Pi x = e^{i tau t} p_tau(t) x on the group subspace.
    pub fn apply_at(&self, t: f64, x: &CVec) -> Result<CVec> {
        let c = self.coeffs(x);
        let e = linalg::expm(&self.small.mapv(|z| z * IM * t))?;
        Ok(self.basis.dot(&e.dot(&c)))
    }

    fn coeffs(&self, x: &CVec) -> CVec {
        let g = self.rank;
        let mut c = CVec::zeros(g);
        for j in 0..g {
            let col = self.cobasis.column(j);
            c[j] = col.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum();
        }
        c
    }

    /// Dense 2N x 2N projector matrix (test and report scale only).
    pub fn dense(&self) -> CMat {
        let ch = self.cobasis.t().mapv(|z| z.conj());
        self.basis.dot(&ch)
    }
}

pub fn spectral_projector(
    spectrum: &Spectrum,
    gen: &GeneratorMatrix,
    group_id: usize,
) -> Result<ModeTerm> {
    let members = spectrum
        .groups
        .get(group_id)
        .ok_or_else(|| Error::Argument(format!("no group {group_id}")))?;
    if members.is_empty() {
        return Err(Error::Argument(format!("group {group_id} is empty")));
    }
    let dim = spectrum.records[members[0]].right.len();
    let g = members.len();
    let taus: Vec<C64> = members.iter().map(|&i| spectrum.records[i].tau).collect();
    let min_biorth = members
        .iter()
        .map(|&i| spectrum.records[i].biorth.norm())
        .fold(f64::INFINITY, f64::min);

    let (basis, cobasis, small, defective) = if min_biorth >= FALLBACK_TOL {
        // Semisimple: Pi = sum_i v_i <l_i, .> / <l_i, v_i>.
        let mut q = CMat::zeros((dim, g));
        let mut c = CMat::zeros((dim, g));
        let mut s = CMat::zeros((g, g));
        for (j, &i) in members.iter().enumerate() {
            let r = &spectrum.records[i];
            q.column_mut(j).assign(&r.right);
            c.column_mut(j).assign(&r.left.mapv(|z| z / r.biorth.conj()));
            s[(j, j)] = r.tau;
        }
        (q, c, s, false)
    } else {
        // Defective group: the individual eigenvectors are unreliable,
        // but the right and left invariant subspaces are not. Build the
        // oblique projector Pi = Q (Z^H Q)^{-1} Z^H from orthonormalized
        // subspace bases and compress G onto it.
        let mut vr = CMat::zeros((dim, g));
        let mut vl = CMat::zeros((dim, g));
        for (j, &i) in members.iter().enumerate() {
            vr.column_mut(j).assign(&spectrum.records[i].right);
            vl.column_mut(j).assign(&spectrum.records[i].left);
        }
        let (q, _) = vr.qr()?;
        let (z, _) = vl.qr()?;
        let m = z.t().mapv(|x| x.conj()).dot(&q);
        let m_inv = linalg::inverse(&m).map_err(|_| {
            Error::Eigensolver(format!(
                "defective group {group_id}: left/right subspaces nearly orthogonal"
            ))
        })?;
        // cobasis C with C^H = M^{-1} Z^H, i.e. C = Z M^{-H}.
        let c = z.dot(&m_inv.t().mapv(|x| x.conj()));
        let gq = gen.g.dot(&q);
        let s = c.t().mapv(|x| x.conj()).dot(&gq);
        (q, c, s, true)
    };

    // || Pi^2 - Pi || = || Q (C^H Q - I) C^H || via thin QR factors.
    let chq = cobasis.t().mapv(|z: C64| z.conj()).dot(&basis);
    let dev = &chq - &linalg::identity(g);
    let (_, rq) = basis.qr()?;
    let (_, rc) = cobasis.qr()?;
    let core = rq.dot(&dev).dot(&rc.t().mapv(|z: C64| z.conj()));
    let idempotency_residual = linalg::opnorm(&core)?;

    Ok(ModeTerm {
        group_id,
        taus,
        rank: g,
        defective,
        idempotency_residual,
        basis,
        cobasis,
        small,
    })
}
