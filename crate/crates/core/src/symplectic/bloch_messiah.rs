//! Joint Bloch-Messiah factorization `B = B_V B_D B_W`.

use nalgebra::DVector;
use num_complex::Complex64;

use super::{compose, passive_embed, squeezers, BogoliubovTransform, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::linalg::{cluster_sorted, fro, hermitian_eigh, symmetric_eigh, CMatrix, RMatrix};

/// Factors of `X = V° D_x W°†`, `Y = V° D_y° W°ᵀ`, optionally dressed with
/// squeezing phases `Φ` (`V = V° e^{−iΦ/2}`, `W = W° e^{−iΦ/2}`,
/// `D_y = sinh(D_z) e^{iΦ}`).
#[derive(Debug, Clone)]
pub struct BlochMessiahFactors {
    /// V° (unitary)
    pub v: CMatrix,
    /// squeezing strengths, descending
    pub dz: Vec<f64>,
    /// squeezing phases
    pub phi: Vec<f64>,
    /// W° (unitary)
    pub w: CMatrix,
}

impl BlochMessiahFactors {
    pub fn n_modes(&self) -> usize {
        self.dz.len()
    }

    /// Re-dresses the factors with new squeezing phases; the product is unchanged.
    pub fn with_phases(mut self, phi: Vec<f64>) -> Result<Self> {
        if phi.len() != self.dz.len() {
            return Err(Error::Dimension("phase vector length".into()));
        }
        self.phi = phi;
        Ok(self)
    }

    fn phase_dress(&self, m: &CMatrix) -> CMatrix {
        let mut out = m.clone();
        for (j, p) in self.phi.iter().enumerate() {
            let f = Complex64::from_polar(1.0, -0.5 * p);
            for i in 0..out.nrows() {
                out[(i, j)] *= f;
            }
        }
        out
    }

    /// Phase-dressed `V`; `B_V` has `X = V`.
    pub fn passive_v(&self) -> CMatrix {
        self.phase_dress(&self.v)
    }

    /// Phase-dressed `W`; `B_W` has `X = W†`.
    pub fn passive_w(&self) -> CMatrix {
        self.phase_dress(&self.w)
    }

    pub fn squeezing(&self) -> BogoliubovTransform {
        squeezers(&self.dz, &self.phi).expect("equal lengths")
    }

    pub fn reassemble(&self) -> BogoliubovTransform {
        let bv = passive_embed(&self.passive_v(), f64::INFINITY).expect("square");
        let bw = passive_embed(&self.passive_w().adjoint(), f64::INFINITY).expect("square");
        let bvd = compose(&bv, &self.squeezing()).expect("dims");
        compose(&bvd, &bw).expect("dims")
    }

    /// Generators `(S_V, S_D, S_W)` of the three factors.
    pub fn generators(&self) -> Result<(GeneratorMatrix, GeneratorMatrix, GeneratorMatrix)> {
        Ok((
            GeneratorMatrix::passive(&self.passive_v(), 1e-8)?,
            GeneratorMatrix::squeezing(&self.dz, &self.phi)?,
            GeneratorMatrix::passive(&self.passive_w().adjoint(), 1e-8)?,
        ))
    }
}

/// Joint Bloch-Messiah decomposition.
///
/// The singular vectors of `X` fix `V°`, `W°` up to a unitary gauge inside each
/// degenerate singular-value block; that gauge is resolved by a Takagi
/// factorization of `Y` restricted to the block, so the same pair
/// diagonalizes `X` and `Y`.
pub fn bloch_messiah(b: &BogoliubovTransform, tol: f64) -> Result<BlochMessiahFactors> {
    let v = b.validate(tol);
    if !v.valid {
        return Err(Error::NotBogoliubov {
            residual: v.residual,
            tol,
        });
    }
    let n = b.n_modes();
    // Singular values of X are cosh z ≥ 1, so X†X is well conditioned; its
    // eigendecomposition is far more accurate here than the complex SVD.
    let (vals, wv) = hermitian_eigh(&(b.x().adjoint() * b.x()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| vals[c].total_cmp(&vals[a]));
    let sv: Vec<f64> = order.iter().map(|&k| vals[k].max(0.0).sqrt()).collect();
    let w = CMatrix::from_fn(n, n, |i, j| wv[(i, order[j])]);
    let mut u = b.x() * &w;
    for (j, s) in sv.iter().enumerate() {
        u.column_mut(j).unscale_mut(*s);
    }

    let m = u.adjoint() * b.y() * w.conjugate();

    let scale = sv.first().copied().unwrap_or(1.0).max(1.0);
    let mut gauge = CMatrix::identity(n, n);
    for range in cluster_sorted(&sv, 1e-8 * scale) {
        let k = range.len();
        let block = m.view((range.start, range.start), (k, k)).into_owned();
        let block = (&block + block.transpose()).scale(0.5);
        gauge.view_mut((range.start, range.start), (k, k)).copy_from(&symmetric_takagi(&block));
    }

    let v = &u * &gauge;
    let w = &w * &gauge;
    // acosh(σ) loses half the digits near σ = 1; sinh z from Y does not
    let my = v.adjoint() * b.y() * w.conjugate();
    let dz = (0..n).map(|j| my.column(j).norm().asinh()).collect();
    let factors = BlochMessiahFactors {
        v,
        dz,
        phi: vec![0.0; n],
        w,
    };
    let back = factors.reassemble();
    let res = fro(&(back.x() - b.x())).max(fro(&(back.y() - b.y())));
    if res > tol.max(1e-9) * scale {
        return Err(Error::Decomposition(format!(
            "Bloch-Messiah reassembly residual {res:.3e}"
        )));
    }
    Ok(factors)
}

/// Takagi vectors of an arbitrary complex symmetric `M = G diag(t) Gᵀ`.
///
/// With `M = A + iB`, a Takagi vector `u = x + iy` (`M u* = t u`) is an
/// eigenvector `(x, y)` of the real symmetric `((A, B), (B, −A))` with
/// eigenvalue `t`; `(−y, x)` belongs to `−t`. Taking eigenvectors from the
/// top down and keeping the ones that are new over ℂ yields a unitary `G`,
/// including inside the null space where `±t` mix.
fn symmetric_takagi(m: &CMatrix) -> CMatrix {
    let k = m.nrows();
    let mut h = RMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            let (a, b) = (m[(i, j)].re, m[(i, j)].im);
            h[(i, j)] = a;
            h[(i, k + j)] = b;
            h[(k + i, j)] = b;
            h[(k + i, k + j)] = -a;
        }
    }
    let (vals, vecs) = symmetric_eigh(&h);
    let mut order: Vec<usize> = (0..2 * k).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let mut g = CMatrix::zeros(k, k);
    let mut found = 0;
    for idx in order {
        if found == k {
            break;
        }
        let mut u = DVector::from_fn(k, |i, _| Complex64::new(vecs[(i, idx)], vecs[(k + i, idx)]));
        // two Gram-Schmidt passes
        for _ in 0..2 {
            for c in 0..found {
                let proj = g.column(c).dotc(&u);
                u -= g.column(c) * proj;
            }
        }
        let norm = u.norm();
        if norm > 0.5 {
            g.set_column(found, &(u / Complex64::new(norm, 0.0)));
            found += 1;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cidentity, unitarity_residual};
    use crate::symplectic::{squeezers, DEFAULT_TOL};

    #[test]
    fn identity_factors() {
        let f = bloch_messiah(&BogoliubovTransform::identity(3), DEFAULT_TOL).unwrap();
        assert!(f.dz.iter().all(|&z| z == 0.0));
        assert!(fro(&(&f.v * f.w.adjoint() - cidentity(3))) < 1e-12);
    }

    #[test]
    fn two_squeezers_sorted_descending() {
        let b = squeezers(&[0.3, 0.9], &[0.0, 0.0]).unwrap();
        let f = bloch_messiah(&b, DEFAULT_TOL).unwrap();
        assert!((f.dz[0] - 0.9).abs() < 1e-12);
        assert!((f.dz[1] - 0.3).abs() < 1e-12);
        assert!(unitarity_residual(&f.v) < 1e-12);
        assert!(unitarity_residual(&f.w) < 1e-12);
    }

    #[test]
    fn rejects_invalid() {
        let b = BogoliubovTransform::from_blocks_unchecked(cidentity(2) * Complex64::new(2.0, 0.0), CMatrix::zeros(2, 2));
        assert!(matches!(bloch_messiah(&b, DEFAULT_TOL), Err(Error::NotBogoliubov { .. })));
    }

    #[test]
    fn vacuum_and_tiny_strengths_share_a_cluster() {
        // cosh of these strengths agree to 1e-9, so one X cluster holds modes
        // that Y still tells apart
        for z in [[1.2, 0.0, 0.0, 0.0], [0.7, 1e-5, 2e-5, 0.0], [1e-9, 0.0, 3e-9, 0.0]] {
            let h = CMatrix::from_fn(4, 4, |i, j| {
                let a = 0.4 * (i as f64 - j as f64);
                Complex64::new((i + j) as f64 * 0.3, a)
            });
            let h = (&h + h.adjoint()).scale(0.5);
            let (vals, q) = crate::linalg::hermitian_eigh(&h);
            let d = CMatrix::from_diagonal(&DVector::from_iterator(4, vals.iter().map(|v| Complex64::from_polar(1.0, *v))));
            let u = passive_embed(&(&q * d * q.adjoint()), 1e-12).unwrap();
            let b = compose(&compose(&u, &squeezers(&z, &[0.1, -0.4, 1.0, 2.0]).unwrap()).unwrap(), &u.inverse()).unwrap();
            let f = bloch_messiah(&b, DEFAULT_TOL).unwrap();
            let re = f.reassemble();
            assert!(fro(&(re.x() - b.x())) + fro(&(re.y() - b.y())) < 1e-12);
            let mut want = z.to_vec();
            want.sort_by(|p, q| q.total_cmp(p));
            let mut got = f.dz.clone();
            got.sort_by(|p, q| q.total_cmp(p));
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn phases_do_not_change_product() {
        let b = squeezers(&[0.5, 0.2], &[0.4, -1.0]).unwrap();
        let f = bloch_messiah(&b, DEFAULT_TOL).unwrap();
        let g = f.clone().with_phases(vec![0.3, 2.0]).unwrap();
        let (b1, b2) = (f.reassemble(), g.reassemble());
        assert!(fro(&(b1.x() - b2.x())) < 1e-12);
        assert!(fro(&(b1.y() - b2.y())) < 1e-12);
    }
}
