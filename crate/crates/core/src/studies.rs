//! Numerical experiments: noise sweeps with random Hamiltonian perturbations
//! and equalization of the normal-mode overlaps with the auxiliary site.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::{build_target, nullifier_variances, square_lattice, ClusterTarget};
use crate::dynamics::{assemble, steady_state};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigh, CMatrix, RMatrix};
use crate::metrics::{overlap, purity};
use crate::model::{HermitianCoupling, SqueezedBathSpec, TheoremModel};
use crate::optim::nelder_mead;
use crate::symplectic::CovarianceState;

/// Name of the random generator; part of the reproducibility contract.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.9)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationKind {
    /// `𝒥_jk (1 + ζ_jk)`, `ζ` real symmetric
    Amplitude,
    /// `𝒥_jk e^{iβ_jk}`, `β` real antisymmetric
    Phase,
}

impl PerturbationKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Amplitude => "amplitude",
            Self::Phase => "phase",
        }
    }

    fn stream(self) -> u64 {
        match self {
            Self::Amplitude => 1,
            Self::Phase => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    /// half-width of the uniform distribution
    pub epsilon: f64,
    pub seed: u64,
}

/// Applies a random Hermiticity-preserving perturbation. One draw per pair
/// `j < k` in row-major order; the diagonal is left untouched.
pub fn perturb(j: &HermitianCoupling, spec: &PerturbationSpec) -> Result<HermitianCoupling> {
    if !(spec.epsilon >= 0.0) || !spec.epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("perturbation width must be ≥ 0, got {}", spec.epsilon)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = j.n_sites();
    let mut out: CMatrix = j.matrix().clone();
    for r in 0..m {
        for c in (r + 1)..m {
            let u: f64 = rng.random::<f64>();
            let x = spec.epsilon * (2.0 * u - 1.0);
            let f = match spec.kind {
                PerturbationKind::Amplitude => Complex64::new(1.0 + x, 0.0),
                PerturbationKind::Phase => Complex64::from_polar(1.0, x),
            };
            out[(r, c)] *= f;
            out[(c, r)] = out[(r, c)].conj();
        }
    }
    HermitianCoupling::new(out, 1e-12)
}

/// Per-case seed from the master seed, the perturbation kind and the realization.
/// Independent of γ, so each realization is a single Hamiltonian followed across the grid.
pub fn case_seed(master: u64, kind: PerturbationKind, realization: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream((kind.stream() << 32) | realization as u64);
    rng.next_u64()
}

/// A model with the pure target it should sustain at γ = 0.
#[derive(Debug, Clone)]
pub struct SweepModel {
    pub coupling: HermitianCoupling,
    pub bath: SqueezedBathSpec,
    /// full M-mode target, auxiliary mode first
    pub target: CovarianceState,
    /// adjacency of the graph on sites `1 … N`, for nullifiers
    pub adjacency: Option<RMatrix>,
}

impl SweepModel {
    pub fn from_theorem(model: &TheoremModel, adjacency: Option<RMatrix>) -> Self {
        Self {
            coupling: model.coupling.clone(),
            bath: model.bath,
            target: model.steady_target(),
            adjacency,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.coupling.n_sites()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub kind: PerturbationKind,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseStatus {
    Ok,
    Unstable,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub gamma: f64,
    /// `γ(N+1)/κ`
    pub gamma_scaled: f64,
    /// "baseline" or the perturbation kind
    pub series: String,
    pub realization: usize,
    pub seed: u64,
    pub status: CaseStatus,
    pub fidelity: f64,
    pub purity: f64,
    pub var_x: Vec<f64>,
    pub var_y: Vec<f64>,
}

struct Case {
    gamma: f64,
    series: Option<SeriesSpec>,
    realization: usize,
    seed: u64,
}

/// Steady-state fidelity, purity and nullifier variances for every
/// `(γ, realization)`. The unperturbed baseline comes first at each γ, then
/// each series in order. Unstable cases are recorded, not fatal.
pub fn gamma_sweep(
    model: &SweepModel,
    gammas: &[f64],
    series: &[SeriesSpec],
    n_realizations: usize,
    master_seed: u64,
) -> Result<Vec<SweepRecord>> {
    if let Some(g) = gammas.iter().find(|g| !(**g >= 0.0) || !g.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma must be ≥ 0, got {g}")));
    }
    let mut cases = Vec::new();
    for &gamma in gammas {
        cases.push(Case { gamma, series: None, realization: 0, seed: 0 });
        for s in series {
            for r in 0..n_realizations {
                cases.push(Case {
                    gamma,
                    series: Some(*s),
                    realization: r,
                    seed: case_seed(master_seed, s.kind, r),
                });
            }
        }
    }
    let m = model.n_sites() as f64;
    let kappa = model.bath.kappa;
    cases
        .par_iter()
        .map(|case| {
            let coupling = match case.series {
                None => model.coupling.clone(),
                Some(s) => perturb(
                    &model.coupling,
                    &PerturbationSpec { kind: s.kind, epsilon: s.epsilon, seed: case.seed },
                )?,
            };
            let mut rec = SweepRecord {
                gamma: case.gamma,
                gamma_scaled: if kappa > 0.0 { case.gamma * m / kappa } else { f64::NAN },
                series: case.series.map_or("baseline", |s| s.kind.name()).to_string(),
                realization: case.realization,
                seed: case.seed,
                status: CaseStatus::Ok,
                fidelity: f64::NAN,
                purity: f64::NAN,
                var_x: Vec::new(),
                var_y: Vec::new(),
            };
            let state = match assemble(&coupling, &model.bath, case.gamma).and_then(|dd| steady_state(&dd)) {
                Ok(s) => s,
                Err(Error::Unstable { .. }) => {
                    rec.status = CaseStatus::Unstable;
                    return Ok(rec);
                }
                Err(_) => {
                    rec.status = CaseStatus::Failed;
                    return Ok(rec);
                }
            };
            rec.fidelity = overlap(&state, &model.target)?;
            rec.purity = purity(&state)?;
            if let Some(a) = &model.adjacency {
                let graph_modes: Vec<usize> = (1..model.n_sites()).collect();
                let v = nullifier_variances(&state.reduce(&graph_modes)?, a)?;
                rec.var_x = v.x;
                rec.var_y = v.y;
            }
            Ok(rec)
        })
        .collect()
}

/// Default grid of `γ(N+1)/κ`.
pub const DEFAULT_GAMMA_SCALED: [f64; 10] = [0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0];

/// The two perturbation families of the robustness study with their default widths.
pub const DEFAULT_SERIES: [SeriesSpec; 2] = [
    SeriesSpec { kind: PerturbationKind::Amplitude, epsilon: 1e-3 },
    SeriesSpec { kind: PerturbationKind::Phase, epsilon: 1.5e-2 },
];

pub const DEFAULT_REALIZATIONS: usize = 20;

/// The lattice cluster-state setup: a `rows × cols` graph sustained by a
/// chain of the given couplings through a pure bath of occupation `n_bar`
/// with real positive `m̄`.
pub fn lattice_setup(rows: usize, cols: usize, n_bar: f64, kappa: f64, couplings: &[f64]) -> Result<(ClusterTarget, TheoremModel)> {
    let bath = SqueezedBathSpec::pure(kappa, n_bar, 0.0)?;
    let target = build_target(&square_lattice(rows, cols)?, bath.z0())?;
    let model = target.model(bath, couplings)?;
    Ok((target, model))
}

/// Auxiliary overlaps `|v₀·w_j|` of the chain with positive couplings,
/// in ascending order of the normal-mode frequency.
pub fn chain_overlaps(couplings: &[f64]) -> Vec<f64> {
    let m = couplings.len() + 1;
    let mut t = RMatrix::zeros(m, m);
    for (k, &j) in couplings.iter().enumerate() {
        t[(k, k + 1)] = j;
        t[(k + 1, k)] = j;
    }
    let (_, w) = symmetric_eigh(&t);
    (0..m).map(|k| w[(0, k)].abs()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualizeConfig {
    pub restarts: usize,
    pub max_iters: u64,
    /// success threshold relative to `1/√M`
    pub relative_tolerance: f64,
}

impl Default for EqualizeConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iters: 20_000,
            relative_tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualizeResult {
    pub couplings: Vec<f64>,
    pub overlaps: Vec<f64>,
    pub min_overlap: f64,
    pub target: f64,
    pub converged: bool,
    pub restarts_used: usize,
}

fn renormalize(logs: &[f64], mean: f64) -> Vec<f64> {
    let j: Vec<f64> = logs.iter().map(|x| x.exp()).collect();
    let s = j.iter().sum::<f64>() / j.len() as f64;
    j.iter().map(|v| v * mean / s).collect()
}

/// Maximizes the smallest auxiliary overlap of an `M`-site chain at fixed mean
/// coupling. Simplex search over log-couplings, first on the smooth surrogate
/// `Σ(o_j² − 1/M)²`, then on `−min o_j`, restarting from the best point until
/// the threshold `(1 − tol)/√M` is met or the restart budget is spent.
pub fn equalize_overlaps(m: usize, init: &[f64], cfg: &EqualizeConfig) -> Result<EqualizeResult> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 sites, got {m}")));
    }
    if init.len() != m - 1 {
        return Err(Error::Dimension(format!("{} sites need {} couplings, got {}", m, m - 1, init.len())));
    }
    if let Some(bad) = init.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("couplings must be > 0, got {bad}")));
    }
    let mean = init.iter().sum::<f64>() / init.len() as f64;
    let target = 1.0 / (m as f64).sqrt();
    let goal = (1.0 - cfg.relative_tolerance) * target;
    let min_of = |j: &[f64]| chain_overlaps(j).into_iter().fold(f64::INFINITY, f64::min);

    let mut best = init.to_vec();
    let mut best_min = min_of(&best);
    let mut restarts_used = 0;
    if best_min < goal {
        let inv_m = 1.0 / m as f64;
        let surrogate = |x: &[f64]| {
            chain_overlaps(&renormalize(x, mean))
                .iter()
                .map(|o| (o * o - inv_m).powi(2))
                .sum::<f64>()
        };
        let maxmin = |x: &[f64]| -min_of(&renormalize(x, mean));
        let mut x: Vec<f64> = best.iter().map(|v| v.ln()).collect();
        for attempt in 0..cfg.restarts {
            restarts_used = attempt + 1;
            let step = 0.3 / (1.0 + attempt as f64).sqrt();
            x = nelder_mead(&surrogate, &x, step, cfg.max_iters, 1e-22)?.x;
            x = nelder_mead(&maxmin, &x, 0.1 * step, cfg.max_iters / 4, 1e-14)?.x;
            let j = renormalize(&x, mean);
            let mn = min_of(&j);
            if mn > best_min {
                best_min = mn;
                best = j;
            }
            if best_min >= goal {
                break;
            }
            x = best.iter().map(|v| v.ln()).collect();
        }
    }
    let overlaps = chain_overlaps(&best);
    Ok(EqualizeResult {
        couplings: best,
        min_overlap: best_min,
        overlaps,
        target,
        converged: best_min >= goal,
        restarts_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::linear_chain;

    fn sample() -> HermitianCoupling {
        linear_chain(&[1.0, 2.0, 0.5, 1.5], &[0.1, 0.2, -0.3, 0.0]).unwrap()
    }

    #[test]
    fn zero_width_is_identity() {
        let j = sample();
        for kind in [PerturbationKind::Amplitude, PerturbationKind::Phase] {
            let p = perturb(&j, &PerturbationSpec { kind, epsilon: 0.0, seed: 3 }).unwrap();
            assert_eq!(p.matrix(), j.matrix());
        }
    }

    #[test]
    fn amplitude_bounds_and_phase_moduli() {
        let j = sample();
        let a = perturb(&j, &PerturbationSpec { kind: PerturbationKind::Amplitude, epsilon: 1e-3, seed: 9 }).unwrap();
        let p = perturb(&j, &PerturbationSpec { kind: PerturbationKind::Phase, epsilon: 0.015, seed: 9 }).unwrap();
        let mut changed = false;
        for r in 0..5 {
            for c in 0..5 {
                let e = j.matrix()[(r, c)];
                if e.norm() > 0.0 {
                    let rel = (a.matrix()[(r, c)] - e).norm() / e.norm();
                    assert!(rel <= 1e-3 + 1e-15);
                    assert!((p.matrix()[(r, c)].norm() - e.norm()).abs() < 1e-15);
                    changed |= rel > 0.0;
                }
            }
        }
        assert!(changed);
    }

    #[test]
    fn perturbations_are_deterministic() {
        let j = sample();
        let s = PerturbationSpec { kind: PerturbationKind::Phase, epsilon: 0.015, seed: 42 };
        assert_eq!(perturb(&j, &s).unwrap(), perturb(&j, &s).unwrap());
        let t = PerturbationSpec { seed: 43, ..s };
        assert_ne!(perturb(&j, &s).unwrap(), perturb(&j, &t).unwrap());
    }

    #[test]
    fn case_seeds_are_distinct() {
        let a = case_seed(7, PerturbationKind::Amplitude, 0);
        assert_eq!(a, case_seed(7, PerturbationKind::Amplitude, 0));
        assert_ne!(a, case_seed(7, PerturbationKind::Amplitude, 1));
        assert_ne!(a, case_seed(7, PerturbationKind::Phase, 0));
        assert_ne!(a, case_seed(8, PerturbationKind::Amplitude, 0));
    }

    #[test]
    fn two_site_overlaps_are_equal() {
        let o = chain_overlaps(&[3.0]);
        assert!((o[0] - o[1]).abs() < 1e-15);
        let r = equalize_overlaps(2, &[3.0], &EqualizeConfig::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.restarts_used, 0);
        assert_eq!(r.couplings, vec![3.0]);
    }

    #[test]
    fn three_site_optimum() {
        // equal weights need J1 = √2 J2
        let r = equalize_overlaps(3, &[1.0, 1.0], &EqualizeConfig::default()).unwrap();
        assert!(r.converged);
        assert!((r.couplings[0] / r.couplings[1] - 2f64.sqrt()).abs() < 1e-2);
        assert!((r.couplings.iter().sum::<f64>() / 2.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn six_site_optimum() {
        let r = equalize_overlaps(6, &[7.7; 5], &EqualizeConfig::default()).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(r.min_overlap >= 0.999 / 6f64.sqrt());
        assert!((r.couplings.iter().sum::<f64>() / 5.0 - 7.7).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(equalize_overlaps(1, &[], &EqualizeConfig::default()).is_err());
        assert!(equalize_overlaps(3, &[1.0], &EqualizeConfig::default()).is_err());
        assert!(equalize_overlaps(3, &[1.0, -1.0], &EqualizeConfig::default()).is_err());
    }

    #[test]
    fn small_sweep_baseline_is_ideal() {
        let vp = crate::linalg::cidentity(2);
        let bath = SqueezedBathSpec::pure(1.0, 0.5, 0.0).unwrap();
        let model = TheoremModel::from_passive(&vp, bath, &[1.0, 1.4]).unwrap();
        let sm = SweepModel::from_theorem(&model, Some(RMatrix::zeros(2, 2)));
        let recs = gamma_sweep(&sm, &[0.0, 0.01, 0.1], &DEFAULT_SERIES, 3, 5).unwrap();
        assert_eq!(recs.len(), 3 * 7);
        assert!((recs[0].fidelity - 1.0).abs() < 1e-9);
        let base: Vec<f64> = recs.iter().filter(|r| r.series == "baseline").map(|r| r.fidelity).collect();
        assert!(base.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(recs, gamma_sweep(&sm, &[0.0, 0.01, 0.1], &DEFAULT_SERIES, 3, 5).unwrap());
    }
}
