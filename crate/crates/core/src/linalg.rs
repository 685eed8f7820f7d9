//! Small dense linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cidentity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn fro(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn fro_r(m: &RMatrix) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// ‖M Mᴴ − 𝟙‖_F
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    fro(&(m * m.adjoint() - cidentity(m.nrows())))
}

pub fn symmetry_residual(m: &CMatrix) -> f64 {
    fro(&(m - m.transpose()))
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    fro(&(m - m.adjoint()))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
/// Eigenvectors are the columns of the returned matrix.
pub fn hermitian_eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    sort_eig(eig.eigenvalues.as_slice(), &eig.eigenvectors)
}

/// Real symmetric counterpart of [`hermitian_eigh`].
pub fn symmetric_eigh(m: &RMatrix) -> (Vec<f64>, RMatrix) {
    let h = (m + m.transpose()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = RMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

fn sort_eig(vals: &[f64], vecs: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted = order.iter().map(|&k| vals[k]).collect();
    let v = CMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    (sorted, v)
}

/// Groups consecutive entries of an ascending (or descending) sequence whose
/// neighbours differ by at most `tol`. Returns index ranges.
pub fn cluster_sorted(vals: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=vals.len() {
        if k == vals.len() || (vals[k] - vals[k - 1]).abs() > tol {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Complex Schur form `m = Q T Qᴴ` with `T` upper triangular.
pub fn complex_schur(m: &CMatrix) -> (CMatrix, CMatrix) {
    let (q, mut t) = Schur::new(m.clone()).unpack();
    let n = t.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    (q, t)
}

pub fn complex_eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let (_, t) = complex_schur(m);
    (0..t.nrows()).map(|k| t[(k, k)]).collect()
}

/// Real 2n×2n matrix `[[Re M, −Im M], [Im M, Re M]]`.
pub fn realify(m: &CMatrix) -> RMatrix {
    let n = m.nrows();
    let k = m.ncols();
    RMatrix::from_fn(2 * n, 2 * k, |i, j| {
        let z = m[(i % n, j % k)];
        match (i < n, j < k) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Block-diagonal assembly of square matrices.
pub fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((off, off), (k, k)).copy_from(b);
        off += k;
    }
    out
}

/// Solves `T x = b` for upper-triangular `T` in place.
pub fn solve_upper_in_place(t: &CMatrix, shift: Complex64, b: &mut DVector<Complex64>) -> bool {
    let n = t.nrows();
    for i in (0..n).rev() {
        let mut acc = b[i];
        for k in (i + 1)..n {
            acc -= t[(i, k)] * b[k];
        }
        let d = t[(i, i)] + shift;
        if d.norm() == 0.0 {
            return false;
        }
        b[i] = acc / d;
    }
    true
}

pub fn basis_vector(n: usize, k: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(n);
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// Wraps an angle to (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut x = a % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}
