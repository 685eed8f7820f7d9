//! Covariance-level dynamics checked against brute-force Fock-space integration.

use std::f64::consts::PI;

use num_complex::Complex64;
use sqbath::dynamics::{assemble, steady_state};
use sqbath::model::{linear_chain, HermitianCoupling, SqueezedBathSpec};
use sqbath::symplectic::CovarianceState;
use sqbath_fockoracle::{integrate, moments, Bath, Lindbladian, TruncatedState};

const LEAKAGE: f64 = 1e-6;

fn oracle_covariance(j: &HermitianCoupling, bath: &SqueezedBathSpec, gamma: f64, n_max: usize, t: f64) -> Vec<Vec<f64>> {
    let m = j.n_sites();
    let jm: Vec<Vec<Complex64>> = (0..m).map(|r| (0..m).map(|c| j.matrix()[(r, c)]).collect()).collect();
    let ob = Bath {
        kappa: bath.kappa,
        n_bar: bath.n_bar,
        m_bar: bath.m_bar,
    };
    let l = Lindbladian::new(&jm, ob, gamma, n_max).unwrap();
    let rho0 = TruncatedState::vacuum(m, n_max).unwrap();
    let out = integrate(&rho0, &l, t, l.suggested_step(), LEAKAGE).unwrap();
    assert!(out.max_trace_drift < 1e-8, "trace drift {}", out.max_trace_drift);
    assert!(out.max_hermiticity_drift < 1e-10);
    let mo = moments(&out.state);
    assert!(mo.mean.iter().all(|v| v.abs() < 1e-10));
    mo.covariance
}

fn max_diff(a: &CovarianceState, b: &[Vec<f64>]) -> f64 {
    let n = b.len();
    let mut d: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            d = d.max((a.matrix()[(r, c)] - b[r][c]).abs());
        }
    }
    d
}

#[test]
fn single_mode_steady_state_matches_oracle() {
    let j = HermitianCoupling::new(sqbath::linalg::CMatrix::zeros(1, 1), 1e-12).unwrap();
    for phase in [0.0, PI / 3.0, -2.0] {
        let bath = SqueezedBathSpec::pure(1.0, 0.5, phase).unwrap();
        let lyap = steady_state(&assemble(&j, &bath, 0.0).unwrap()).unwrap();
        let oracle = oracle_covariance(&j, &bath, 0.0, 25, 10.0);
        let d = max_diff(&lyap, &oracle);
        assert!(d < 1e-4, "phase {phase}: {d}");
    }
}

#[test]
fn two_mode_chain_matches_oracle() {
    // deliberately not theorem-matched: the steady state is mixed
    let j = linear_chain(&[1.0], &[0.3]).unwrap();
    let bath = SqueezedBathSpec::pure(1.0, 0.2, 0.5).unwrap();
    let lyap = steady_state(&assemble(&j, &bath, 0.05).unwrap()).unwrap();
    let oracle = oracle_covariance(&j, &bath, 0.05, 20, 12.0);
    let d = max_diff(&lyap, &oracle);
    assert!(d < 1e-4, "{d}");
}

#[test]
fn thermal_overlap_matches_fock_trace() {
    // Tr(ρ₁ρ₂) of two diagonal thermal states, summed directly
    let (n1, n2) = (0.4, 1.3);
    let p = |n: f64, k: i32| (n / (n + 1.0)).powi(k) / (n + 1.0);
    let direct: f64 = (0..400).map(|k| p(n1, k) * p(n2, k)).sum();
    let ov = sqbath::metrics::overlap(&CovarianceState::thermal(&[n1]), &CovarianceState::thermal(&[n2])).unwrap();
    assert!((ov - direct).abs() < 1e-12);
}

#[derive(serde::Deserialize)]
struct SignFixture {
    im_mbar_sign: f64,
    n_bar: f64,
    phase: f64,
    oracle_sigma_qp: f64,
}

/// The sign of the Im m̄ diffusion entry was calibrated once against the
/// oracle; this locks it.
#[test]
fn im_mbar_sign_is_frozen() {
    let fx: SignFixture = serde_json::from_str(include_str!("fixtures/im_mbar_sign.json")).unwrap();
    let j = HermitianCoupling::new(sqbath::linalg::CMatrix::zeros(1, 1), 1e-12).unwrap();
    let bath = SqueezedBathSpec::pure(1.0, fx.n_bar, fx.phase).unwrap();
    let dd = assemble(&j, &bath, 0.0).unwrap();
    assert_eq!(dd.d[(0, 1)].signum(), fx.im_mbar_sign * bath.m_bar.im.signum());
    let s = steady_state(&dd).unwrap();
    assert!((s.matrix()[(0, 1)] - fx.oracle_sigma_qp).abs() < 1e-4);
    let oracle = oracle_covariance(&j, &bath, 0.0, 25, 10.0);
    assert!((oracle[0][1] - fx.oracle_sigma_qp).abs() < 1e-4);
}
