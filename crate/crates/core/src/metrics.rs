//! Gaussian state functionals: overlap, purity, quadratic-form variances.
//!
//! With the vacuum-equals-identity convention, for zero-mean Gaussian states
//! `Tr(ρ₁ρ₂) = 2^M / √det(σ₁ + σ₂)` and `Tr(ρ²) = 1/√det σ`. When one of the
//! two states is pure the overlap is the fidelity `⟨ψ|ρ|ψ⟩`; for two mixed
//! states it is only an overlap, not the Uhlmann fidelity.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::symplectic::CovarianceState;

const PHYSICAL_TOL: f64 = 1e-8;

/// Result of [`overlap_detailed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapResult {
    pub value: f64,
    /// log det(σ₁ + σ₂)
    pub det_term: f64,
}

/// log|det| from an LU factorization with partial pivoting.
fn log_det(m: &nalgebra::DMatrix<f64>) -> Result<f64> {
    let lu = m.clone().lu();
    let u = lu.u();
    let mut sign_neg = lu.p().determinant::<f64>() < 0.0;
    let mut acc = 0.0;
    for k in 0..u.nrows() {
        let d = u[(k, k)];
        if d == 0.0 {
            return Err(Error::Unphysical("singular covariance".into()));
        }
        if d < 0.0 {
            sign_neg = !sign_neg;
        }
        acc += d.abs().ln();
    }
    if sign_neg {
        return Err(Error::Unphysical("negative determinant".into()));
    }
    Ok(acc)
}

fn check_physical(s: &CovarianceState, which: &str) -> Result<()> {
    if !s.is_physical(PHYSICAL_TOL) {
        return Err(Error::Unphysical(format!(
            "{which} violates the uncertainty relation (margin {:.3e})",
            s.uncertainty_margin()
        )));
    }
    Ok(())
}

pub fn overlap_detailed(s1: &CovarianceState, s2: &CovarianceState) -> Result<OverlapResult> {
    if s1.n_modes() != s2.n_modes() {
        return Err(Error::Dimension(format!(
            "overlap of {}-mode and {}-mode states",
            s1.n_modes(),
            s2.n_modes()
        )));
    }
    check_physical(s1, "first state")?;
    check_physical(s2, "second state")?;
    let sum = s1.matrix() + s2.matrix();
    let ld = log_det(&sum)?;
    let m = s1.n_modes() as f64;
    Ok(OverlapResult {
        value: (m * std::f64::consts::LN_2 - 0.5 * ld).exp(),
        det_term: ld,
    })
}

/// `Tr(ρ₁ρ₂)`.
pub fn overlap(s1: &CovarianceState, s2: &CovarianceState) -> Result<f64> {
    overlap_detailed(s1, s2).map(|r| r.value)
}

/// Alias of [`overlap`]; equals `⟨ψ|ρ|ψ⟩` when `target` is pure.
pub fn fidelity_to_pure_target(state: &CovarianceState, target: &CovarianceState) -> Result<f64> {
    overlap(state, target)
}

/// `Tr(ρ²) = 1/√det σ`.
pub fn purity(s: &CovarianceState) -> Result<f64> {
    check_physical(s, "state")?;
    Ok((-0.5 * log_det(s.matrix())?).exp())
}

/// `cᵀ σ c`.
pub fn quadratic_form_variance(s: &CovarianceState, coeffs: &DVector<f64>) -> Result<f64> {
    if coeffs.len() != s.matrix().nrows() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} quadratures",
            coeffs.len(),
            s.matrix().nrows()
        )));
    }
    Ok(coeffs.dot(&(s.matrix() * coeffs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{squeezer, to_covariance};

    #[test]
    fn vacuum_overlap_is_one() {
        let v = CovarianceState::vacuum(3);
        assert!((overlap(&v, &v).unwrap() - 1.0).abs() < 1e-14);
        assert!((purity(&v).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn thermal_overlap_closed_form() {
        for (n1, n2) in [(0.0, 0.5), (0.3, 1.2), (2.0, 2.0)] {
            let o = overlap(&CovarianceState::thermal(&[n1]), &CovarianceState::thermal(&[n2])).unwrap();
            assert!((o - 1.0 / (n1 + n2 + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn thermal_purity() {
        for n in [0.0, 0.25, 3.0] {
            let p = purity(&CovarianceState::thermal(&[n])).unwrap();
            assert!((p - 1.0 / (2.0 * n + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn pure_target_self_overlap() {
        let s = to_covariance(&squeezer(1.3, 0.4));
        assert!((overlap(&s, &s).unwrap() - 1.0).abs() < 1e-10);
        assert!((purity(&s).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quadrature_variances() {
        let v = CovarianceState::vacuum(1);
        let eq = DVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(quadratic_form_variance(&v, &eq).unwrap(), 1.0);
        let z = 0.6;
        let s = to_covariance(&squeezer(z, 0.0));
        let ep = DVector::from_vec(vec![0.0, 1.0]);
        assert!((quadratic_form_variance(&s, &ep).unwrap() - (-2.0 * z).exp()).abs() < 1e-14);
        assert!(quadratic_form_variance(&s, &DVector::zeros(3)).is_err());
    }

    #[test]
    fn rejects_unphysical_and_mismatched() {
        let bad = CovarianceState::new(nalgebra::DMatrix::identity(2, 2) * 0.2, 1e-12).unwrap();
        assert!(purity(&bad).is_err());
        assert!(overlap(&CovarianceState::vacuum(1), &CovarianceState::vacuum(2)).is_err());
    }
}
