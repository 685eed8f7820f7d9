//! System Hamiltonians: the linear chain, its passive conjugation, the
//! passivity lemma, dark-mode diagnostics and chiral-symmetry reports.
//!
//! All energies and rates are in units of κ. Site 0 is the auxiliary mode
//! attached to the squeezed reservoir.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, c, cluster_sorted, complex_eigenvalues, fro, hermitian_eigh, hermiticity_residual,
    unitarity_residual, wrap_angle, CMatrix, I,
};
use crate::symplectic::{
    bloch_messiah, compose, passive_embed, squeezer, squeezers, to_covariance, BogoliubovTransform,
    CovarianceState, DEFAULT_TOL,
};

/// Hermitian hopping matrix `𝒥` of `H = Σ 𝒥_jk b_j† b_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianCoupling {
    j: CMatrix,
}

impl HermitianCoupling {
    /// Validates Hermiticity; the stored matrix is exactly Hermitian.
    pub fn new(j: CMatrix, tol: f64) -> Result<Self> {
        if !j.is_square() || j.nrows() == 0 {
            return Err(Error::Dimension(format!("coupling matrix is {:?}", j.shape())));
        }
        let r = hermiticity_residual(&j);
        if r > tol * fro(&j).max(1.0) {
            return Err(Error::NotHermitian(r));
        }
        Ok(Self {
            j: (&j + j.adjoint()).scale(0.5),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.j.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.j
    }

    pub fn norm(&self) -> f64 {
        fro(&self.j)
    }

    /// Eigenvalues (ascending) and eigenvectors (columns).
    pub fn normal_modes(&self) -> (Vec<f64>, CMatrix) {
        hermitian_eigh(&self.j)
    }
}

/// Squeezed reservoir `(κ, n̄, m̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedBathSpec {
    pub kappa: f64,
    pub n_bar: f64,
    pub m_bar: Complex64,
}

impl SqueezedBathSpec {
    pub fn new(kappa: f64, n_bar: f64, m_bar: Complex64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa must be ≥ 0, got {kappa}")));
        }
        if !(n_bar >= 0.0) || !n_bar.is_finite() {
            return Err(Error::InvalidParameter(format!("n_bar must be ≥ 0, got {n_bar}")));
        }
        let bound = (n_bar * (n_bar + 1.0)).sqrt();
        if m_bar.norm() > bound * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::UnphysicalBath {
                m_abs: m_bar.norm(),
                bound,
            });
        }
        Ok(Self { kappa, n_bar, m_bar })
    }

    /// Pure squeezed bath with `m̄ = √(n̄(n̄+1)) e^{iφ₀}`.
    pub fn pure(kappa: f64, n_bar: f64, phase: f64) -> Result<Self> {
        let m = Complex64::from_polar((n_bar * (n_bar + 1.0)).sqrt(), phase);
        Self::new(kappa, n_bar, m)
    }

    pub fn vacuum(kappa: f64) -> Result<Self> {
        Self::new(kappa, 0.0, c(0.0, 0.0))
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        ((self.n_bar * (self.n_bar + 1.0)).sqrt() - self.m_bar.norm()).abs() <= tol
    }

    /// `tanh z₀ = √(n̄/(n̄+1))`.
    pub fn z0(&self) -> f64 {
        (self.n_bar / (self.n_bar + 1.0)).sqrt().atanh()
    }

    /// `e^{iφ₀} = m̄/|m̄|`; defined only for a pure bath with `m̄ ≠ 0`.
    pub fn phi0(&self) -> Option<f64> {
        if self.is_pure(1e-12) && self.m_bar.norm() > 0.0 {
            Some(self.m_bar.arg())
        } else {
            None
        }
    }
}

/// Per-site squeezing strengths and phases, sites `0 … N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezingProfile {
    pub z: Vec<f64>,
    pub phi: Vec<f64>,
}

impl SqueezingProfile {
    pub fn new(z: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if z.len() != phi.len() {
            return Err(Error::Dimension("strengths and phases differ in length".into()));
        }
        if let Some(bad) = z.iter().find(|&&v| !(v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("negative squeezing strength {bad}")));
        }
        Ok(Self { z, phi })
    }

    pub fn uniform(z: f64, phi: Vec<f64>) -> Result<Self> {
        Self::new(vec![z; phi.len()], phi)
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// Chain phases `θ_j = (φ_j − φ_{j−1})/2`, `j = 1 … N`.
pub fn chain_thetas(phi: &[f64]) -> Vec<f64> {
    phi.windows(2).map(|w| 0.5 * (w[1] - w[0])).collect()
}

/// Open linear chain with `𝒥_{j−1,j} = i J_j e^{−iθ_j}` and zero diagonal.
pub fn linear_chain(couplings: &[f64], thetas: &[f64]) -> Result<HermitianCoupling> {
    if couplings.len() != thetas.len() {
        return Err(Error::Dimension(format!(
            "{} couplings but {} phases",
            couplings.len(),
            thetas.len()
        )));
    }
    if let Some(bad) = couplings.iter().find(|&&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("chain coupling must be > 0, got {bad}")));
    }
    let m = couplings.len() + 1;
    let mut j = CMatrix::zeros(m, m);
    for (k, (&jk, &th)) in couplings.iter().zip(thetas).enumerate() {
        let e = I * Complex64::from_polar(jk, -th);
        j[(k, k + 1)] = e;
        j[(k + 1, k)] = e.conj();
    }
    Ok(HermitianCoupling { j })
}

/// `𝒥 = 𝒰 𝒥⁽ˢ⁾ 𝒰†` with `𝒰 = diag(1, V_p)`, where `U_p† b_j U_p = Σ_k (V_p)_jk b_k`.
pub fn conjugate_hamiltonian(js: &HermitianCoupling, vp: &CMatrix, tol: f64) -> Result<HermitianCoupling> {
    let m = js.n_sites();
    if vp.shape() != (m - 1, m - 1) {
        return Err(Error::Dimension(format!(
            "passive matrix is {:?}, expected {}×{}",
            vp.shape(),
            m - 1,
            m - 1
        )));
    }
    let r = unitarity_residual(vp);
    if r > tol {
        return Err(Error::NotUnitary(r));
    }
    let mut u = CMatrix::identity(m, m);
    u.view_mut((1, 1), (m - 1, m - 1)).copy_from(vp);
    let j = &u * js.matrix() * u.adjoint();
    Ok(HermitianCoupling {
        j: (&j + j.adjoint()).scale(0.5),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LemmaViolation {
    /// on-site energy on a squeezed site
    OnSite { site: usize },
    /// coupled sites with different squeezing strengths
    Strength { j: usize, k: usize },
    /// coupling phase incompatible with the squeezing phases
    Phase { j: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub passive: bool,
    pub violations: Vec<LemmaViolation>,
}

/// Tests whether `H⁽ˢ⁾` stays passive under the single-mode squeezers of `prof`.
pub fn check_lemma_passivity(js: &HermitianCoupling, prof: &SqueezingProfile, tol: f64) -> Result<LemmaReport> {
    let m = js.n_sites();
    if prof.len() != m {
        return Err(Error::Dimension(format!("{} sites but profile of {}", m, prof.len())));
    }
    let jm = js.matrix();
    let mut violations = Vec::new();
    for s in 0..m {
        if prof.z[s] > tol && jm[(s, s)].norm() > tol {
            violations.push(LemmaViolation::OnSite { site: s });
        }
    }
    for j in 0..m {
        for k in (j + 1)..m {
            let e = jm[(j, k)];
            if e.norm() <= tol {
                continue;
            }
            if (prof.z[j] - prof.z[k]).abs() > tol {
                violations.push(LemmaViolation::Strength { j, k });
                continue;
            }
            if prof.z[j] <= tol {
                continue;
            }
            // arg 𝒥_jk ≡ (φ_j − φ_k + π)/2 (mod π)
            let want = 0.5 * (prof.phi[j] - prof.phi[k] + PI);
            let mut d = wrap_angle(e.arg() - want);
            if d > PI / 2.0 {
                d -= PI;
            } else if d <= -PI / 2.0 {
                d += PI;
            }
            if d.abs() > tol.max(1e-12) * 10.0 {
                violations.push(LemmaViolation::Phase { j, k });
            }
        }
    }
    Ok(LemmaReport {
        passive: violations.is_empty(),
        violations,
    })
}

/// One eigenspace of `𝒥` and the norm of the auxiliary mode's projection on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenspace {
    pub eigenvalue: f64,
    pub dimension: usize,
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub eigenvalues: Vec<f64>,
    pub eigenspaces: Vec<Eigenspace>,
    pub min_overlap: f64,
    /// min Re spec(ℛ), ℛ = i𝒥 + Γ
    pub min_real_part: f64,
    pub dark_mode_free: bool,
}

/// Overlap threshold below which a normal mode counts as dark.
pub const DARK_MODE_THRESHOLD: f64 = 1e-8;

fn eigenspaces(j: &HermitianCoupling) -> (Vec<f64>, CMatrix, Vec<(std::ops::Range<usize>, f64)>) {
    let (vals, vecs) = j.normal_modes();
    let tol = 1e-8 * j.norm().max(1e-300);
    let spaces = cluster_sorted(&vals, tol)
        .into_iter()
        .map(|r| {
            let o = r
                .clone()
                .map(|k| vecs[(0, k)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            (r, o)
        })
        .collect();
    (vals, vecs, spaces)
}

pub fn stability_report(js: &HermitianCoupling, kappa: f64) -> StabilityReport {
    let (vals, _, spaces) = eigenspaces(js);
    let eigenspaces: Vec<Eigenspace> = spaces
        .iter()
        .map(|(r, o)| Eigenspace {
            eigenvalue: r.clone().map(|k| vals[k]).sum::<f64>() / r.len() as f64,
            dimension: r.len(),
            overlap: *o,
        })
        .collect();
    // A degenerate eigenspace always contains a vector orthogonal to v₀.
    let min_overlap = eigenspaces
        .iter()
        .map(|e| if e.dimension > 1 { 0.0 } else { e.overlap })
        .fold(f64::INFINITY, f64::min);
    let mut r = js.matrix() * I;
    r[(0, 0)] += c(kappa, 0.0);
    let min_real_part = complex_eigenvalues(&r)
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    StabilityReport {
        eigenvalues: vals,
        eigenspaces,
        min_overlap,
        min_real_part,
        dark_mode_free: min_overlap > DARK_MODE_THRESHOLD,
    }
}

/// A pair of opposite-frequency eigenspaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiralPair {
    pub lambda: f64,
    pub pairing_residual: f64,
    pub overlap_residual: f64,
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiralReport {
    pub eigenvalues: Vec<f64>,
    pub pairs: Vec<ChiralPair>,
    pub zero_mode: bool,
    pub max_pairing_residual: f64,
    pub max_overlap_residual: f64,
}

/// Pairing of the spectrum into `(λ, −λ)` with equal auxiliary overlaps.
/// Never fails; see [`chiral_report`] for the checked variant.
pub fn chiral_residuals(j: &HermitianCoupling) -> ChiralReport {
    let (vals, _, spaces) = eigenspaces(j);
    let c = spaces.len();
    let mut pairs = Vec::new();
    let mut max_p: f64 = 0.0;
    let mut max_o: f64 = 0.0;
    for i in 0..c / 2 {
        let (lo, olo) = &spaces[i];
        let (hi, ohi) = &spaces[c - 1 - i];
        let llo = lo.clone().map(|k| vals[k]).sum::<f64>() / lo.len() as f64;
        let lhi = hi.clone().map(|k| vals[k]).sum::<f64>() / hi.len() as f64;
        let mut pr = (llo + lhi).abs();
        if lo.len() != hi.len() {
            pr = pr.max(f64::INFINITY);
        }
        let or = (olo - ohi).abs();
        max_p = max_p.max(pr);
        max_o = max_o.max(or);
        pairs.push(ChiralPair {
            lambda: lhi,
            pairing_residual: pr,
            overlap_residual: or,
            overlap: *ohi,
        });
    }
    let zero_mode = c % 2 == 1;
    if zero_mode {
        let (r, _) = &spaces[c / 2];
        let l = r.clone().map(|k| vals[k]).sum::<f64>() / r.len() as f64;
        max_p = max_p.max(l.abs());
    }
    ChiralReport {
        eigenvalues: vals,
        pairs,
        zero_mode,
        max_pairing_residual: max_p,
        max_overlap_residual: max_o,
    }
}

/// [`chiral_residuals`], failing when the spectrum does not pair up within `tol`.
pub fn chiral_report(j: &HermitianCoupling, tol: f64) -> Result<ChiralReport> {
    let r = chiral_residuals(j);
    if r.max_pairing_residual > tol {
        return Err(Error::ChiralPairing {
            residual: r.max_pairing_residual,
        });
    }
    Ok(r)
}

/// Auxiliary-mode overlaps `|v₀·w_j|` of every normal mode, ascending in energy.
pub fn auxiliary_overlaps(j: &HermitianCoupling) -> Vec<f64> {
    let (_, vecs) = j.normal_modes();
    (0..vecs.ncols()).map(|k| vecs[(0, k)].norm()).collect()
}

/// A complete model sustaining `|ψ₀⟩ ⊗ U_p U_S |0⟩` as its unique steady state.
#[derive(Debug, Clone)]
pub struct TheoremModel {
    pub bath: SqueezedBathSpec,
    /// `𝒥⁽ˢ⁾`, the linear chain
    pub chain: HermitianCoupling,
    /// `𝒥 = 𝒰 𝒥⁽ˢ⁾ 𝒰†`
    pub coupling: HermitianCoupling,
    /// `V_p`, N×N
    pub passive: CMatrix,
    /// squeezing on sites `0 … N`
    pub profile: SqueezingProfile,
    /// N-mode transform `B_p B_S` of the target state
    pub target: BogoliubovTransform,
}

impl TheoremModel {
    /// Builds the model from the passive part `V_p` of the target and chain
    /// couplings; all target modes are squeezed by `z₀` with zero phase.
    pub fn from_passive(vp: &CMatrix, bath: SqueezedBathSpec, couplings: &[f64]) -> Result<Self> {
        let n = vp.nrows();
        if couplings.len() != n {
            return Err(Error::Dimension(format!(
                "{} target modes need {} chain couplings, got {}",
                n,
                n,
                couplings.len()
            )));
        }
        if !bath.is_pure(1e-10) {
            return Err(Error::NotPreparable("the reservoir must be pure, |m| = sqrt(n(n+1))".into()));
        }
        let z0 = bath.z0();
        let phi0 = bath.phi0().unwrap_or(0.0);
        let mut phi = vec![0.0; n + 1];
        phi[0] = phi0;
        let profile = SqueezingProfile::uniform(z0, phi.clone())?;
        let chain = linear_chain(couplings, &chain_thetas(&phi))?;
        let coupling = conjugate_hamiltonian(&chain, vp, 1e-8)?;
        let target = compose(
            &passive_embed(vp, 1e-8)?,
            &squeezers(&vec![z0; n], &vec![0.0; n])?,
        )?;
        Ok(Self {
            bath,
            chain,
            coupling,
            passive: vp.clone(),
            profile,
            target,
        })
    }

    /// Builds the model for an arbitrary target transform, which must have all
    /// Bloch-Messiah squeezing strengths equal to the bath's `z₀`.
    pub fn new(target: &BogoliubovTransform, bath: SqueezedBathSpec, couplings: &[f64]) -> Result<Self> {
        let f = bloch_messiah(target, DEFAULT_TOL.max(1e-9 * fro(target.x())))?;
        let z0 = bath.z0();
        if let Some(z) = f.dz.iter().find(|&&z| (z - z0).abs() > 1e-7 * z0.max(1.0)) {
            return Err(Error::NotPreparable(format!(
                "squeezing strength {z:.6} differs from the reservoir's z0 = {z0:.6}"
            )));
        }
        Self::from_passive(&f.passive_v(), bath, couplings)
    }

    pub fn n_sites(&self) -> usize {
        self.chain.n_sites()
    }

    /// Covariance of the full steady state (auxiliary mode first).
    pub fn steady_target(&self) -> CovarianceState {
        let aux = to_covariance(&squeezer(self.bath.z0(), self.bath.phi0().unwrap_or(0.0)));
        aux.direct_sum(&to_covariance(&self.target))
    }
}

/// `v₀ = (1, 0, …, 0)`.
pub fn auxiliary_vector(m: usize) -> nalgebra::DVector<Complex64> {
    basis_vector(m, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cidentity;

    #[test]
    fn two_site_chain_entries() {
        let j = linear_chain(&[1.0], &[0.0]).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]);
        assert!(fro(&(j.matrix() - want)) < 1e-15);
    }

    #[test]
    fn three_site_chain_spectrum() {
        let j = linear_chain(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let (vals, _) = j.normal_modes();
        let s = 2f64.sqrt();
        for (a, b) in vals.iter().zip([-s, 0.0, s]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn fig_chain_magnitudes() {
        let j = linear_chain(&[7.7; 25], &[0.0; 25]).unwrap();
        assert_eq!(j.n_sites(), 26);
        for k in 1..26 {
            assert!((j.matrix()[(k - 1, k)].norm() - 7.7).abs() < 1e-13);
        }
    }

    #[test]
    fn chain_rejects_nonpositive() {
        assert!(matches!(linear_chain(&[1.0, 0.0], &[0.0, 0.0]), Err(Error::InvalidParameter(_))));
        assert!(linear_chain(&[1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn conjugation_by_identity_and_phases() {
        let js = linear_chain(&[1.0, 2.0, 0.5], &[0.1, -0.2, 0.3]).unwrap();
        let same = conjugate_hamiltonian(&js, &cidentity(3), 1e-12).unwrap();
        assert!(fro(&(same.matrix() - js.matrix())) < 1e-15);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::from_polar(1.0, 0.4),
            Complex64::from_polar(1.0, -1.3),
            Complex64::from_polar(1.0, 2.2),
        ]));
        let ph = conjugate_hamiltonian(&js, &d, 1e-12).unwrap();
        for i in 0..4 {
            for k in 0..4 {
                assert!((ph.matrix()[(i, k)].norm() - js.matrix()[(i, k)].norm()).abs() < 1e-14);
            }
        }
        assert!(matches!(
            conjugate_hamiltonian(&js, &(cidentity(3) * c(2.0, 0.0)), 1e-9),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn lemma_without_squeezing_is_trivial() {
        let js = HermitianCoupling::new(
            CMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(1.0, 0.5), c(1.0, -0.5), c(-1.0, 0.0)]),
            1e-12,
        )
        .unwrap();
        let prof = SqueezingProfile::new(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert!(check_lemma_passivity(&js, &prof, 1e-10).unwrap().passive);
    }

    #[test]
    fn lemma_chain_construction_passes() {
        let phi = vec![0.3, -1.1, 2.0, 0.7];
        let js = linear_chain(&[1.0, 0.4, 2.5], &chain_thetas(&phi)).unwrap();
        let prof = SqueezingProfile::uniform(0.8, phi).unwrap();
        let r = check_lemma_passivity(&js, &prof, 1e-10).unwrap();
        assert!(r.passive, "{:?}", r.violations);
    }

    #[test]
    fn lemma_detects_unequal_strengths() {
        let phi = vec![0.0; 4];
        let js = linear_chain(&[1.0, 1.0, 1.0], &chain_thetas(&phi)).unwrap();
        let prof = SqueezingProfile::new(vec![0.5, 0.5, 0.9, 0.9], phi).unwrap();
        let r = check_lemma_passivity(&js, &prof, 1e-10).unwrap();
        assert!(!r.passive);
        assert_eq!(r.violations, vec![LemmaViolation::Strength { j: 1, k: 2 }]);
    }

    #[test]
    fn lemma_detects_onsite_and_phase() {
        let mut m = linear_chain(&[1.0], &[0.0]).unwrap().matrix().clone();
        m[(0, 0)] = c(0.2, 0.0);
        m[(0, 1)] = c(1.0, 0.0);
        m[(1, 0)] = c(1.0, 0.0);
        let js = HermitianCoupling::new(m, 1e-12).unwrap();
        let prof = SqueezingProfile::uniform(0.5, vec![0.0, 0.0]).unwrap();
        let r = check_lemma_passivity(&js, &prof, 1e-10).unwrap();
        assert!(r.violations.contains(&LemmaViolation::OnSite { site: 0 }));
        assert!(r.violations.contains(&LemmaViolation::Phase { j: 0, k: 1 }));
    }

    #[test]
    fn two_site_stability() {
        let j = linear_chain(&[1.0], &[0.0]).unwrap();
        let r = stability_report(&j, 1.0);
        assert_eq!(r.eigenspaces.len(), 2);
        for e in &r.eigenspaces {
            assert!((e.overlap - 0.5f64.sqrt()).abs() < 1e-14);
        }
        assert!(r.dark_mode_free);
        assert!(r.min_real_part > 0.0);
    }

    #[test]
    fn decoupled_site_is_dark() {
        let mut m = CMatrix::zeros(3, 3);
        m[(0, 1)] = c(0.0, 1.0);
        m[(1, 0)] = c(0.0, -1.0);
        let j = HermitianCoupling::new(m, 1e-12).unwrap();
        let r = stability_report(&j, 1.0);
        assert!(!r.dark_mode_free);
        assert!(r.min_overlap < 1e-12);
        assert!(r.min_real_part.abs() < 1e-12);
    }

    #[test]
    fn chiral_small_chains() {
        let j3 = linear_chain(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let r = chiral_report(&j3, 1e-10).unwrap();
        assert!(r.zero_mode);
        assert_eq!(r.pairs.len(), 1);
        assert!(r.max_overlap_residual < 1e-12);
        let j2 = linear_chain(&[1.3], &[0.4]).unwrap();
        let r = chiral_report(&j2, 1e-10).unwrap();
        assert!(!r.zero_mode);
        assert!((r.pairs[0].lambda - 1.3).abs() < 1e-13);
        assert!((r.pairs[0].overlap - 0.5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn chiral_failure_reports_residual() {
        let mut m = linear_chain(&[1.0, 1.0], &[0.0, 0.0]).unwrap().matrix().clone();
        m[(2, 2)] = c(0.5, 0.0);
        let j = HermitianCoupling::new(m, 1e-12).unwrap();
        match chiral_report(&j, 1e-10) {
            Err(Error::ChiralPairing { residual }) => assert!(residual > 0.1),
            other => panic!("expected pairing failure, got {other:?}"),
        }
    }

    #[test]
    fn bath_validation() {
        assert!(SqueezedBathSpec::new(1.0, 0.5, c(1.0, 0.0)).is_err());
        assert!(SqueezedBathSpec::new(-1.0, 0.5, c(0.0, 0.0)).is_err());
        let b = SqueezedBathSpec::pure(1.0, 1.0, 0.7).unwrap();
        assert!((b.z0().tanh() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((b.phi0().unwrap() - 0.7).abs() < 1e-15);
        let thermal = SqueezedBathSpec::new(1.0, 1.0, c(0.5, 0.0)).unwrap();
        assert!(thermal.phi0().is_none());
    }
}
