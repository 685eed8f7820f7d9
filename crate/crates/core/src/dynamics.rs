//! Second-moment dynamics of the lattice coupled to the squeezed reservoir
//! (plus optional local damping γ on every site).
//!
//! The covariance obeys `σ̇ = Aσ + σAᵀ + D` in the (q-block, p-block)
//! ordering used by [`CovarianceState`].

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, complex_schur, fro_r, realify, solve_upper_in_place, to_complex, wrap_angle, CMatrix, RMatrix, I,
};
use crate::model::{chiral_report, HermitianCoupling, SqueezedBathSpec};
use crate::symplectic::CovarianceState;

/// Drift `A` and diffusion `D` of the covariance equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftDiffusion {
    pub a: RMatrix,
    pub d: RMatrix,
}

impl DriftDiffusion {
    pub fn n_modes(&self) -> usize {
        self.a.nrows() / 2
    }

    /// Largest real part of the drift spectrum.
    pub fn spectral_abscissa(&self) -> f64 {
        let (_, t) = complex_schur(&to_complex(&self.a));
        (0..t.nrows()).map(|k| t[(k, k)].re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `‖Aσ + σAᵀ + D‖_F`.
    pub fn lyapunov_residual(&self, sigma: &RMatrix) -> f64 {
        fro_r(&(&self.a * sigma + sigma * self.a.transpose() + &self.d))
    }
}

/// Mean decay `⟨ḃ⟩ = −(i𝒥 + Γ + γ𝟙)⟨b⟩` with `Γ = κ|0⟩⟨0|`, and the diffusion
/// generated by the reservoir on site 0 and by vacuum damping on every site.
pub fn assemble(j: &HermitianCoupling, bath: &SqueezedBathSpec, gamma: f64) -> Result<DriftDiffusion> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma must be ≥ 0, got {gamma}")));
    }
    let bath = SqueezedBathSpec::new(bath.kappa, bath.n_bar, bath.m_bar)?;
    let m = j.n_sites();
    let mut cdrift = j.matrix() * (-I);
    cdrift[(0, 0)] -= c(bath.kappa, 0.0);
    for k in 0..m {
        cdrift[(k, k)] -= c(gamma, 0.0);
    }
    let a = realify(&cdrift);

    let mut d = RMatrix::identity(2 * m, 2 * m) * (2.0 * gamma);
    let k2 = 2.0 * bath.kappa;
    let (n, mb) = (bath.n_bar, bath.m_bar);
    d[(0, 0)] += k2 * (1.0 + 2.0 * n + 2.0 * mb.re);
    d[(m, m)] += k2 * (1.0 + 2.0 * n - 2.0 * mb.re);
    d[(0, m)] += k2 * 2.0 * mb.im;
    d[(m, 0)] += k2 * 2.0 * mb.im;
    Ok(DriftDiffusion { a, d })
}

#[derive(Debug, Clone)]
pub struct SteadySolution {
    pub state: CovarianceState,
    /// `‖Aσ + σAᵀ + D‖_F`
    pub residual: f64,
}

/// Relative stability margin: the drift must have spectral abscissa below `−ε‖A‖`.
pub const STABILITY_MARGIN: f64 = 1e-10;

pub fn steady_state(dd: &DriftDiffusion) -> Result<CovarianceState> {
    steady_state_with_residual(dd).map(|s| s.state)
}

pub fn steady_state_with_residual(dd: &DriftDiffusion) -> Result<SteadySolution> {
    let n = dd.a.nrows();
    if n == 0 || dd.a.shape() != dd.d.shape() || n % 2 != 0 {
        return Err(Error::Dimension(format!("drift {:?}, diffusion {:?}", dd.a.shape(), dd.d.shape())));
    }
    let anorm = fro_r(&dd.a);
    let (q, t) = complex_schur(&to_complex(&dd.a));
    let max_real = (0..n).map(|k| t[(k, k)].re).fold(f64::NEG_INFINITY, f64::max);
    if max_real >= -STABILITY_MARGIN * anorm {
        return Err(Error::Unstable { max_real });
    }
    let tol = 1e-10 * fro_r(&dd.d).max(f64::MIN_POSITIVE);
    let sigma = match lyapunov_schur(&q, &t, &dd.d) {
        Some(s) if dd.lyapunov_residual(&s) <= tol => s,
        _ => lyapunov_kronecker(&dd.a, &dd.d)?,
    };
    let residual = dd.lyapunov_residual(&sigma);
    // forward error of the solve; near-dark drifts amplify the residual
    let error_bound = residual / (2.0 * -max_real);
    let phys_tol = 1e-8 * fro_r(&sigma).max(1.0) + 10.0 * error_bound;
    let state = CovarianceState::new(sigma, 1e-8)?;
    if !state.is_physical(phys_tol) {
        return Err(Error::Unphysical(format!(
            "steady state violates the uncertainty relation (margin {:.3e})",
            state.uncertainty_margin()
        )));
    }
    Ok(SteadySolution { state, residual })
}

/// Bartels–Stewart on the complex Schur form `A = Q T Q†` (A real, so `Aᵀ = Q T† Q†`).
fn lyapunov_schur(q: &CMatrix, t: &CMatrix, d: &RMatrix) -> Option<RMatrix> {
    let n = t.nrows();
    let f = q.adjoint() * to_complex(d) * q;
    let mut s = CMatrix::zeros(n, n);
    for j in (0..n).rev() {
        let mut rhs: DVector<Complex64> = -f.column(j).into_owned();
        for k in (j + 1)..n {
            let w = t[(j, k)].conj();
            rhs.axpy(-w, &s.column(k).into_owned(), c(1.0, 0.0));
        }
        if !solve_upper_in_place(t, t[(j, j)].conj(), &mut rhs) {
            return None;
        }
        s.set_column(j, &rhs);
    }
    let sigma = (q * s * q.adjoint()).map(|z| z.re);
    Some((&sigma + sigma.transpose()) * 0.5)
}

/// Dense solve of `(𝟙⊗A + A⊗𝟙) vec σ = −vec D`.
pub fn lyapunov_kronecker(a: &RMatrix, d: &RMatrix) -> Result<RMatrix> {
    let n = a.nrows();
    let id = RMatrix::identity(n, n);
    let k = id.kronecker(a) + a.kronecker(&id);
    let rhs = -DVector::from_column_slice(d.as_slice());
    let x = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Decomposition("Lyapunov operator is singular".into()))?;
    let sigma = RMatrix::from_column_slice(n, n, x.as_slice());
    Ok((&sigma + sigma.transpose()) * 0.5)
}

/// Exact propagation `σ(t) = Φσ₀Φᵀ + Q(t)` with `Φ = e^{At}`.
///
/// One step `h` with `‖A‖h ≤ 1` is taken from the block exponential of
/// `[[A, D], [0, −Aᵀ]]`; the result is doubled `k` times via
/// `Φ₂ = Φ²`, `Q₂ = ΦQΦᵀ + Q`, so no large-argument exponential ever appears.
pub fn evolve(sigma0: &CovarianceState, dd: &DriftDiffusion, t: f64) -> Result<CovarianceState> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("evolution time must be ≥ 0, got {t}")));
    }
    let n = dd.a.nrows();
    if sigma0.matrix().shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "state has {} modes, drift has {}",
            sigma0.n_modes(),
            n / 2
        )));
    }
    if t == 0.0 {
        return Ok(sigma0.clone());
    }
    let scale = fro_r(&dd.a).max(fro_r(&dd.d)) * t;
    let k = if scale <= 1.0 { 0 } else { scale.log2().ceil() as i32 };
    let h = t / 2f64.powi(k);
    let mut big = RMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(&(&dd.a * h));
    big.view_mut((0, n), (n, n)).copy_from(&(&dd.d * h));
    big.view_mut((n, n), (n, n)).copy_from(&(-dd.a.transpose() * h));
    let e = big.exp();
    let mut phi = e.view((0, 0), (n, n)).into_owned();
    let mut qm = e.view((0, n), (n, n)) * phi.transpose();
    for _ in 0..k {
        qm = &phi * &qm * phi.transpose() + &qm;
        phi = &phi * &phi;
    }
    let sigma = &phi * sigma0.matrix() * phi.transpose() + qm;
    let state = CovarianceState::new((&sigma + sigma.transpose()) * 0.5, 1e-8)?;
    if !state.is_physical(1e-8) {
        return Err(Error::Unphysical("propagated state violates the uncertainty relation".into()));
    }
    Ok(state)
}

/// Normally ordered moments `N_jk = ⟨b_j† b_k⟩` and `M_jk = ⟨b_j b_k⟩`.
pub fn complex_moments(sigma: &CovarianceState) -> (CMatrix, CMatrix) {
    let m = sigma.n_modes();
    let s = sigma.matrix();
    let mut nm = CMatrix::zeros(m, m);
    let mut mm = CMatrix::zeros(m, m);
    for j in 0..m {
        for k in 0..m {
            let (qq, pp) = (s[(j, k)], s[(m + j, m + k)]);
            let (qp, pq) = (s[(j, m + k)], s[(m + j, k)]);
            mm[(j, k)] = c(qq - pp, qp + pq) * 0.25;
            nm[(j, k)] = c(qq + pp, qp - pq) * 0.25;
            if j == k {
                nm[(j, k)] -= c(0.5, 0.0);
            }
        }
    }
    (nm, mm)
}

/// One `(−λ, +λ)` pair of normal modes and its two-mode squeezing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmsPair {
    pub lambda: f64,
    /// index of the `−λ` mode (ascending spectrum)
    pub lower: usize,
    pub upper: usize,
    /// `asinh √⟨c†c⟩`, averaged over the two modes
    pub strength: f64,
    /// `arg ⟨c_lower c_upper⟩`
    pub phase: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TmsReport {
    pub z0: f64,
    pub phi0: f64,
    pub pairs: Vec<TmsPair>,
    /// squeezing strength and phase of the zero-frequency mode (odd mode count)
    pub zero_mode: Option<(f64, f64)>,
    /// largest deviation of any normal-mode moment from the ideal pair structure
    pub max_residual: f64,
    /// largest deviation of the pair phases from `φ₀`
    pub max_phase_residual: f64,
}

/// Checks that `σ`, rotated into the normal modes of `𝒥`, is a product of
/// two-mode squeezed vacua of strength `z₀` (plus a single-mode squeezed zero mode).
///
/// Normal-mode vectors are fixed in the gauge where `v₀·w_j` is real positive.
pub fn tms_pair_check(sigma: &CovarianceState, j: &HermitianCoupling, bath: &SqueezedBathSpec) -> Result<TmsReport> {
    let m = j.n_sites();
    if sigma.n_modes() != m {
        return Err(Error::Dimension(format!("state has {} modes, coupling {}", sigma.n_modes(), m)));
    }
    let chiral = chiral_report(j, 1e-8 * j.norm().max(1.0))?;
    if chiral.eigenvalues.len() != 2 * chiral.pairs.len() + usize::from(chiral.zero_mode) {
        return Err(Error::ChiralPairing { residual: f64::INFINITY });
    }
    let (_, mut w) = j.normal_modes();
    for k in 0..m {
        let a = w[(0, k)];
        if a.norm() > 0.0 {
            let ph = a.conj() / a.norm();
            for r in 0..m {
                w[(r, k)] *= ph;
            }
        }
    }
    // c = W† b
    let rot = realify(&w.adjoint());
    let (nm, mm) = complex_moments(&sigma.transform(&rot)?);

    let z0 = bath.z0();
    let phi0 = bath.phi0().unwrap_or(0.0);
    let (sh, ch) = (z0.sinh(), z0.cosh());
    let mut want_m = CMatrix::zeros(m, m);
    let mut pairs = Vec::new();
    for i in 0..m / 2 {
        let (lo, hi) = (i, m - 1 - i);
        let v = mm[(lo, hi)];
        want_m[(lo, hi)] = Complex64::from_polar(sh * ch, v.arg());
        want_m[(hi, lo)] = want_m[(lo, hi)];
        let occ = 0.5 * (nm[(lo, lo)].re + nm[(hi, hi)].re);
        pairs.push(TmsPair {
            lambda: chiral.eigenvalues[hi],
            lower: lo,
            upper: hi,
            strength: occ.max(0.0).sqrt().asinh(),
            phase: v.arg(),
            residual: 0.0,
        });
    }
    let zero_mode = if m % 2 == 1 {
        let z = m / 2;
        let v = mm[(z, z)];
        want_m[(z, z)] = Complex64::from_polar(sh * ch, v.arg());
        Some((nm[(z, z)].re.max(0.0).sqrt().asinh(), v.arg()))
    } else {
        None
    };
    let want_n = CMatrix::identity(m, m) * c(sh * sh, 0.0);
    let dn = &nm - &want_n;
    let dm = &mm - &want_m;
    for p in pairs.iter_mut() {
        let mut r: f64 = 0.0;
        for &a in &[p.lower, p.upper] {
            for b in 0..m {
                r = r.max(dn[(a, b)].norm()).max(dm[(a, b)].norm());
            }
        }
        p.residual = r;
    }
    let max_residual = dn.iter().chain(dm.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    let max_phase_residual = pairs
        .iter()
        .map(|p| wrap_angle(p.phase - phi0).abs())
        .fold(0.0, f64::max);
    Ok(TmsReport {
        z0,
        phi0,
        pairs,
        zero_mode,
        max_residual,
        max_phase_residual,
    })
}

/// Drift-spectrum helper used in diagnostics: eigenvalues of `−(i𝒥 + Γ)`.
pub fn mean_field_rates(j: &HermitianCoupling, kappa: f64) -> Vec<Complex64> {
    let mut r = j.matrix() * I;
    r[(0, 0)] += c(kappa, 0.0);
    let (_, t) = complex_schur(&(-r));
    (0..t.nrows()).map(|k| t[(k, k)]).collect()
}
