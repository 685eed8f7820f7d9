//! Random instance builders shared by the integration tests. Everything is
//! driven by plain `f64` slices so proptest can shrink the inputs.
#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use sqbath::linalg::{hermitian_eigh, CMatrix};
use sqbath::symplectic::{compose, passive_embed, squeezers, BogoliubovTransform};

/// Hermitian matrix from `n²` reals: the upper triangle holds real and
/// imaginary parts, the diagonal is real.
pub fn hermitian(n: usize, raw: &[f64]) -> CMatrix {
    let mut h = CMatrix::zeros(n, n);
    let mut it = raw.iter().copied().cycle();
    for r in 0..n {
        h[(r, r)] = Complex64::new(it.next().unwrap(), 0.0);
        for c in r + 1..n {
            let v = Complex64::new(it.next().unwrap(), it.next().unwrap());
            h[(r, c)] = v;
            h[(c, r)] = v.conj();
        }
    }
    h
}

/// `e^{iH}` for the Hermitian matrix built from `raw`.
pub fn unitary(n: usize, raw: &[f64]) -> CMatrix {
    let (vals, q) = hermitian_eigh(&hermitian(n, raw));
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        vals.iter().map(|v| Complex64::from_polar(1.0, 3.0 * v)),
    ));
    &q * d * q.adjoint()
}

/// `V · squeeze(z, φ) · W`, optionally with all strengths forced equal.
pub fn bogoliubov(n: usize, raw: &[f64], z: &[f64], equal: bool) -> BogoliubovTransform {
    let half = raw.len() / 2;
    let v = passive_embed(&unitary(n, &raw[..half]), 1e-8).unwrap();
    let w = passive_embed(&unitary(n, &raw[half..]), 1e-8).unwrap();
    let zs: Vec<f64> = if equal { vec![z[0]; n] } else { z[..n].to_vec() };
    let phis: Vec<f64> = (0..n).map(|k| raw[k % raw.len()] * 2.0).collect();
    let s = squeezers(&zs, &phis).unwrap();
    compose(&compose(&v, &s).unwrap(), &w).unwrap()
}

pub fn raw(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}
