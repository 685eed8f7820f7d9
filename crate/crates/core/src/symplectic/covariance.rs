use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BogoliubovTransform;
use crate::error::{Error, Result};
use crate::linalg::{fro_r, CMatrix, RMatrix};

/// Zero-mean Gaussian state: real symmetric 2M×2M quadrature covariance
/// `σ_ij = ⟨{ξ_i, ξ_j}⟩/2` with `ξ = (q_0 … q_{M−1}, p_0 … p_{M−1})`.
/// The vacuum is `σ = 𝟙`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceState {
    sigma: RMatrix,
}

impl CovarianceState {
    /// Checks shape and symmetry; the matrix is symmetrized on success.
    pub fn new(sigma: RMatrix, tol: f64) -> Result<Self> {
        if !sigma.is_square() || sigma.nrows() % 2 != 0 {
            return Err(Error::Dimension(format!("covariance is {:?}", sigma.shape())));
        }
        let asym = fro_r(&(&sigma - sigma.transpose()));
        if asym > tol * fro_r(&sigma).max(1.0) {
            return Err(Error::Unphysical(format!("covariance not symmetric ({asym:.3e})")));
        }
        let sym = (&sigma + sigma.transpose()).scale(0.5);
        Ok(Self { sigma: sym })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            sigma: RMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Product of thermal states with the given mean occupations.
    pub fn thermal(occupations: &[f64]) -> Self {
        let m = occupations.len();
        let mut sigma = RMatrix::zeros(2 * m, 2 * m);
        for (j, n) in occupations.iter().enumerate() {
            sigma[(j, j)] = 2.0 * n + 1.0;
            sigma[(m + j, m + j)] = 2.0 * n + 1.0;
        }
        Self { sigma }
    }

    pub fn n_modes(&self) -> usize {
        self.sigma.nrows() / 2
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.sigma
    }

    pub fn into_matrix(self) -> RMatrix {
        self.sigma
    }

    /// Index of `q_j` and `p_j` in the quadrature vector.
    pub fn q_index(&self, j: usize) -> usize {
        j
    }

    pub fn p_index(&self, j: usize) -> usize {
        self.n_modes() + j
    }

    /// Symplectic form `Ω = ((0, 𝟙), (−𝟙, 0))`.
    pub fn symplectic_form(n_modes: usize) -> RMatrix {
        let mut o = RMatrix::zeros(2 * n_modes, 2 * n_modes);
        for k in 0..n_modes {
            o[(k, n_modes + k)] = 1.0;
            o[(n_modes + k, k)] = -1.0;
        }
        o
    }

    /// Smallest eigenvalue of the Hermitian matrix `σ + iΩ`.
    pub fn uncertainty_margin(&self) -> f64 {
        let m = self.n_modes();
        let o = Self::symplectic_form(m);
        let h = CMatrix::from_fn(2 * m, 2 * m, |i, j| Complex64::new(self.sigma[(i, j)], o[(i, j)]));
        SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `σ + iΩ ⪰ −tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.uncertainty_margin() >= -tol
    }

    /// Reduced state on a subset of modes (partial trace).
    pub fn reduce(&self, modes: &[usize]) -> Result<Self> {
        let m = self.n_modes();
        if let Some(&bad) = modes.iter().find(|&&k| k >= m) {
            return Err(Error::Dimension(format!("mode {bad} out of range for {m} modes")));
        }
        let idx: Vec<usize> = modes.iter().copied().chain(modes.iter().map(|&k| m + k)).collect();
        let k = idx.len();
        Ok(Self {
            sigma: RMatrix::from_fn(k, k, |i, j| self.sigma[(idx[i], idx[j])]),
        })
    }

    /// Tensor product with `other`; the modes of `self` come first.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.n_modes(), other.n_modes());
        let m = a + b;
        let place = |k: usize, first: bool, n: usize| -> usize {
            // quadrature index k of a subsystem with n modes → global index
            let (mode, is_p) = if k < n { (k, false) } else { (k - n, true) };
            let g = if first { mode } else { a + mode };
            if is_p {
                m + g
            } else {
                g
            }
        };
        let mut sigma = RMatrix::zeros(2 * m, 2 * m);
        for i in 0..2 * a {
            for j in 0..2 * a {
                sigma[(place(i, true, a), place(j, true, a))] = self.sigma[(i, j)];
            }
        }
        for i in 0..2 * b {
            for j in 0..2 * b {
                sigma[(place(i, false, b), place(j, false, b))] = other.sigma[(i, j)];
            }
        }
        Self { sigma }
    }

    /// Congruence `S σ Sᵀ`.
    pub fn transform(&self, s: &RMatrix) -> Result<Self> {
        if s.shape() != self.sigma.shape() {
            return Err(Error::Dimension(format!(
                "transform {:?} vs covariance {:?}",
                s.shape(),
                self.sigma.shape()
            )));
        }
        Ok(Self {
            sigma: s * &self.sigma * s.transpose(),
        })
    }
}

/// Covariance of `U|0⟩`: `σ = S_q S_qᵀ`.
pub fn to_covariance(b: &BogoliubovTransform) -> CovarianceState {
    let s = b.quadrature_matrix();
    let sigma = &s * s.transpose();
    CovarianceState {
        sigma: (&sigma + sigma.transpose()).scale(0.5),
    }
}
