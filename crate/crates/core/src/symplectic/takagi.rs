//! Autonne–Takagi factorization `M = V Vᵀ` of a symmetric unitary matrix.
//!
//! For symmetric unitary `M = A + iB` the real symmetric parts commute
//! (`A² + B² = 𝟙`, `AB = BA`), so a single real orthogonal `O` diagonalizes
//! both and `M = O e^{iΘ} Oᵀ`. Then `V = O e^{iΘ/2}` with principal square
//! roots of the eigenphases.

use num_complex::Complex64;

use super::DEFAULT_TOL;
use crate::error::{Error, Result};
use crate::linalg::{cluster_sorted, fro, symmetric_eigh, symmetry_residual, unitarity_residual, CMatrix, RMatrix};

pub fn takagi(m: &CMatrix) -> Result<CMatrix> {
    takagi_with_tol(m, DEFAULT_TOL)
}

pub fn takagi_with_tol(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("M is {:?}", m.shape())));
    }
    let sym = symmetry_residual(m);
    if sym > tol {
        return Err(Error::NotSymmetric(sym));
    }
    let uni = unitarity_residual(m);
    if uni > tol {
        return Err(Error::NotUnitary(uni));
    }
    let n = m.nrows();
    let a = RMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
    let b = RMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].im + m[(j, i)].im));

    let (avals, mut o) = symmetric_eigh(&a);
    // Refine each (near-)degenerate eigenspace of A with a generic combination
    // A + τB; joint eigenvectors diagonalize any such combination.
    const TAU: f64 = 0.754_877_666_2;
    let mix = &a + &b * TAU;
    for range in cluster_sorted(&avals, 1e-6) {
        let k = range.len();
        if k < 2 {
            continue;
        }
        let basis = o.columns(range.start, k).into_owned();
        let sub = basis.transpose() * &mix * &basis;
        let (_, rot) = symmetric_eigh(&sub);
        let rotated = basis * rot;
        o.columns_mut(range.start, k).copy_from(&rotated);
    }

    let oc = o.map(|x| Complex64::new(x, 0.0));
    let d = oc.transpose() * m * &oc;
    let mut v = oc.clone();
    for j in 0..n {
        let root = Complex64::from_polar(1.0, 0.5 * d[(j, j)].arg());
        for i in 0..n {
            v[(i, j)] *= root;
        }
    }
    let res = fro(&(&v * v.transpose() - m));
    if res > tol.max(1e-10 * n as f64) {
        return Err(Error::Decomposition(format!(
            "Takagi residual {res:.3e} exceeds tolerance"
        )));
    }
    Ok(v)
}
