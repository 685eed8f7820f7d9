//! Bogoliubov/symplectic algebra for zero-mean pure Gaussian states.
//!
//! Mode operators are collected in `b = (b_1 … b_N, b_1† … b_N†)`. A Gaussian
//! unitary `U` acts as `U† b U = B b` with
//!
//! ```text
//! B = ( X   Y  )
//!     ( Y*  X* )
//! ```
//!
//! and the bosonic commutators are preserved iff `X X† − Y Y† = 𝟙` and
//! `X Yᵀ = Y Xᵀ`. For a product of unitaries `U = U_1 U_2` the transform is
//! `B = B_1 B_2`, so [`compose`] multiplies in the same order as the operators.
//!
//! Quadratures are `q = b + b†`, `p = −i(b − b†)` ordered as
//! `ξ = (q_1 … q_N, p_1 … p_N) = Λ b` with `Λ = ((𝟙, 𝟙), (−i𝟙, i𝟙))`,
//! so that `[q_j, p_k] = 2i δ_jk` and the vacuum covariance is the identity.

mod bloch_messiah;
mod covariance;
mod takagi;

pub use bloch_messiah::{bloch_messiah, BlochMessiahFactors};
pub use covariance::{to_covariance, CovarianceState};
pub use takagi::{takagi, takagi_with_tol};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cidentity, complex_schur, fro, unitarity_residual, CMatrix, RMatrix, I};

/// Default absolute tolerance on Frobenius residuals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// The `(X, Y)` blocks of a Bogoliubov matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovTransform {
    x: CMatrix,
    y: CMatrix,
}

/// Residual report of [`validate_bogoliubov`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validation {
    pub valid: bool,
    /// max of ‖X X† − Y Y† − 𝟙‖_F and ‖X Yᵀ − Y Xᵀ‖_F
    pub residual: f64,
}

/// Checks the two Bogoliubov conditions on `(x, y)`.
pub fn validate_bogoliubov(x: &CMatrix, y: &CMatrix, tol: f64) -> Result<Validation> {
    let n = x.nrows();
    if !x.is_square() || y.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "X is {:?}, Y is {:?}; both must be square and equal",
            x.shape(),
            y.shape()
        )));
    }
    let r1 = fro(&(x * x.adjoint() - y * y.adjoint() - cidentity(n)));
    let r2 = fro(&(x * y.transpose() - y * x.transpose()));
    let residual = r1.max(r2);
    Ok(Validation {
        valid: residual <= tol,
        residual,
    })
}

impl BogoliubovTransform {
    /// Validated constructor.
    pub fn new(x: CMatrix, y: CMatrix, tol: f64) -> Result<Self> {
        let v = validate_bogoliubov(&x, &y, tol)?;
        if !v.valid {
            return Err(Error::NotBogoliubov {
                residual: v.residual,
                tol,
            });
        }
        Ok(Self { x, y })
    }

    #[cfg(test)]
    pub(crate) fn from_blocks_unchecked(x: CMatrix, y: CMatrix) -> Self {
        Self { x, y }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            x: cidentity(n),
            y: CMatrix::zeros(n, n),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.x.nrows()
    }

    pub fn x(&self) -> &CMatrix {
        &self.x
    }

    pub fn y(&self) -> &CMatrix {
        &self.y
    }

    pub fn validate(&self, tol: f64) -> Validation {
        validate_bogoliubov(&self.x, &self.y, tol).expect("blocks are square by construction")
    }

    /// The full 2N×2N matrix `((X, Y), (Y*, X*))`.
    pub fn full(&self) -> CMatrix {
        let n = self.n_modes();
        let mut b = CMatrix::zeros(2 * n, 2 * n);
        b.view_mut((0, 0), (n, n)).copy_from(&self.x);
        b.view_mut((0, n), (n, n)).copy_from(&self.y);
        b.view_mut((n, 0), (n, n)).copy_from(&self.y.conjugate());
        b.view_mut((n, n), (n, n)).copy_from(&self.x.conjugate());
        b
    }

    fn from_full(b: &CMatrix) -> Self {
        let n = b.nrows() / 2;
        Self {
            x: b.view((0, 0), (n, n)).into_owned(),
            y: b.view((0, n), (n, n)).into_owned(),
        }
    }

    /// Real symplectic matrix `S_q = Λ B Λ⁻¹` acting on `(q, p)`.
    pub fn quadrature_matrix(&self) -> RMatrix {
        let n = self.n_modes();
        let p = &self.x + self.y.conjugate();
        let m = &self.x - self.y.conjugate();
        let mut s = RMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] = p[(i, j)].re;
                s[(i, n + j)] = -p[(i, j)].im;
                s[(n + i, j)] = m[(i, j)].im;
                s[(n + i, n + j)] = m[(i, j)].re;
            }
        }
        s
    }

    /// Inverse transform: `B⁻¹ = ((X†, −Yᵀ), (−Y†, Xᵀ))`.
    pub fn inverse(&self) -> Self {
        Self {
            x: self.x.adjoint(),
            y: -self.y.transpose(),
        }
    }

    /// Transform acting on two disjoint sets of modes, `self` first.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n, m) = (self.n_modes(), other.n_modes());
        let mut x = CMatrix::zeros(n + m, n + m);
        let mut y = CMatrix::zeros(n + m, n + m);
        x.view_mut((0, 0), (n, n)).copy_from(&self.x);
        x.view_mut((n, n), (m, m)).copy_from(&other.x);
        y.view_mut((0, 0), (n, n)).copy_from(&self.y);
        y.view_mut((n, n), (m, m)).copy_from(&other.y);
        Self { x, y }
    }

    /// `true` when the transform conserves excitation number (`Y = 0`).
    pub fn is_passive(&self, tol: f64) -> bool {
        fro(&self.y) <= tol
    }
}

/// Transform of the operator product `U_1 U_2`, i.e. `B_1 B_2`.
pub fn compose(b1: &BogoliubovTransform, b2: &BogoliubovTransform) -> Result<BogoliubovTransform> {
    if b1.n_modes() != b2.n_modes() {
        return Err(Error::Dimension(format!(
            "cannot compose {}-mode and {}-mode transforms",
            b1.n_modes(),
            b2.n_modes()
        )));
    }
    let x = &b1.x * &b2.x + &b1.y * b2.y.conjugate();
    let y = &b1.x * &b2.y + &b1.y * b2.x.conjugate();
    Ok(BogoliubovTransform { x, y })
}

/// Single-mode squeezer `exp((z/2)(e^{iφ} b†² − e^{−iφ} b²))`, giving
/// `U† b U = cosh(z) b + sinh(z) e^{iφ} b†`.
pub fn squeezer(z: f64, phi: f64) -> BogoliubovTransform {
    squeezers(&[z], &[phi]).expect("length 1")
}

/// Independent single-mode squeezers on every mode.
pub fn squeezers(z: &[f64], phi: &[f64]) -> Result<BogoliubovTransform> {
    if z.len() != phi.len() {
        return Err(Error::Dimension(format!(
            "{} strengths but {} phases",
            z.len(),
            phi.len()
        )));
    }
    let n = z.len();
    let x = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(z[i].cosh(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let y = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::from_polar(z[i].sinh(), phi[i])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(BogoliubovTransform { x, y })
}

/// Passive transform with `X = V`, `Y = 0`.
pub fn passive_embed(v: &CMatrix, tol: f64) -> Result<BogoliubovTransform> {
    if !v.is_square() {
        return Err(Error::Dimension(format!("V is {:?}", v.shape())));
    }
    let r = unitarity_residual(v);
    if r > tol {
        return Err(Error::NotUnitary(r));
    }
    let n = v.nrows();
    Ok(BogoliubovTransform {
        x: v.clone(),
        y: CMatrix::zeros(n, n),
    })
}

/// Complex symmetric generator `S = ((Z*, K*), (K, Z))` of
/// `U = exp(−(i/2) bᵀ S b)`, with `Z = Zᵀ` and `K = K†`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    s: CMatrix,
}

impl GeneratorMatrix {
    /// Validates `S = Sᵀ` and `S = G S* G` (G swaps the two halves).
    pub fn new(s: CMatrix, tol: f64) -> Result<Self> {
        if !s.is_square() || s.nrows() % 2 != 0 {
            return Err(Error::Dimension(format!("S is {:?}", s.shape())));
        }
        let sym = fro(&(&s - s.transpose()));
        if sym > tol {
            return Err(Error::InvalidGenerator(format!("S − Sᵀ residual {sym:.3e}")));
        }
        let g = swap_matrix(s.nrows() / 2);
        let conj = fro(&(&s - &g * s.conjugate() * &g));
        if conj > tol {
            return Err(Error::InvalidGenerator(format!("S − G S* G residual {conj:.3e}")));
        }
        Ok(Self { s })
    }

    pub fn from_blocks(z: &CMatrix, k: &CMatrix, tol: f64) -> Result<Self> {
        let n = z.nrows();
        if !z.is_square() || k.shape() != (n, n) {
            return Err(Error::Dimension("Z and K must be square and equal".into()));
        }
        let mut s = CMatrix::zeros(2 * n, 2 * n);
        s.view_mut((0, 0), (n, n)).copy_from(&z.conjugate());
        s.view_mut((0, n), (n, n)).copy_from(&k.conjugate());
        s.view_mut((n, 0), (n, n)).copy_from(k);
        s.view_mut((n, n), (n, n)).copy_from(z);
        Self::new(s, tol)
    }

    pub fn zero(n: usize) -> Self {
        Self {
            s: CMatrix::zeros(2 * n, 2 * n),
        }
    }

    /// Generator of the passive transform with `X = V` (`V = e^{−iK}`).
    pub fn passive(v: &CMatrix, tol: f64) -> Result<Self> {
        let r = unitarity_residual(v);
        if r > tol {
            return Err(Error::NotUnitary(r));
        }
        // A unitary is normal, so its Schur form is diagonal.
        let (q, t) = complex_schur(v);
        let n = v.nrows();
        let d = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(-t[(i, i)].arg(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let k = &q * d * q.adjoint();
        let k = (&k + k.adjoint()).scale(0.5);
        Self::from_blocks(&CMatrix::zeros(n, n), &k, tol.max(1e-8))
    }

    /// Generator of independent squeezers with strengths `z` and phases `phi`.
    pub fn squeezing(z: &[f64], phi: &[f64]) -> Result<Self> {
        if z.len() != phi.len() {
            return Err(Error::Dimension("strengths and phases differ in length".into()));
        }
        let n = z.len();
        let zb = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                I * Complex64::from_polar(z[i], phi[i])
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::from_blocks(&zb, &CMatrix::zeros(n, n), DEFAULT_TOL)
    }

    pub fn n_modes(&self) -> usize {
        self.s.nrows() / 2
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.s
    }

    pub fn z_block(&self) -> CMatrix {
        let n = self.n_modes();
        self.s.view((n, n), (n, n)).into_owned()
    }

    pub fn k_block(&self) -> CMatrix {
        let n = self.n_modes();
        self.s.view((n, 0), (n, n)).into_owned()
    }
}

/// `G = ((0, 𝟙), (𝟙, 0))`.
pub fn swap_matrix(n: usize) -> CMatrix {
    let mut g = CMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        g[(k, n + k)] = Complex64::new(1.0, 0.0);
        g[(n + k, k)] = Complex64::new(1.0, 0.0);
    }
    g
}

/// `ℐ = ((0, 𝟙), (−𝟙, 0))`.
pub fn commutator_form(n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(k, n + k)] = Complex64::new(1.0, 0.0);
        m[(n + k, k)] = Complex64::new(-1.0, 0.0);
    }
    m
}

/// `B = exp(−i ℐ S)`.
pub fn exp_map(s: &GeneratorMatrix) -> Result<BogoliubovTransform> {
    let n = s.n_modes();
    let gen: DMatrix<Complex64> = (commutator_form(n) * s.matrix()) * (-I);
    let b = BogoliubovTransform::from_full(&gen.exp());
    let scale = fro(&b.x).max(1.0);
    let tol = DEFAULT_TOL * scale * scale;
    let v = b.validate(tol);
    if !v.valid {
        return Err(Error::NotBogoliubov {
            residual: v.residual,
            tol,
        });
    }
    Ok(b)
}
