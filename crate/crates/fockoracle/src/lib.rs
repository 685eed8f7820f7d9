//! Truncated Fock-space integrator for the Lindblad equation of one or two
//! bosonic modes, one of which is coupled to a squeezed reservoir.
//!
//! This crate deliberately shares no code with the covariance-matrix library
//! it is used to check. Density matrices are dense, row-major, and indexed by
//! `n_0·(n_max+1)^{M−1} + … + n_{M−1}`.
//!
//! The dissipator convention is `𝒟_{x,y}ρ = 2xρy − yxρ − ρyx` and the
//! reservoir acts as
//! `κ{(n̄+1)𝒟_{b,b†} + n̄𝒟_{b†,b} − m̄*𝒟_{b,b} − m̄𝒟_{b†,b†}}` on mode 0.

use num_complex::Complex64;

type C = Complex64;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("the oracle handles 1 or 2 modes, got {0}")]
    TooManyModes(usize),
    #[error("truncation n_max = {0} is below the minimum of 10")]
    TruncationTooSmall(usize),
    #[error("population {population:.3e} in the top two Fock levels exceeds {threshold:.1e}")]
    Leakage { population: f64, threshold: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Squeezed reservoir parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bath {
    pub kappa: f64,
    pub n_bar: f64,
    pub m_bar: C,
}

/// Dense density matrix over the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    pub n_modes: usize,
    pub n_max: usize,
    pub rho: Vec<C>,
}

fn check_dims(n_modes: usize, n_max: usize) -> Result<()> {
    if n_modes == 0 || n_modes > 2 {
        return Err(OracleError::TooManyModes(n_modes));
    }
    if n_max < 10 {
        return Err(OracleError::TruncationTooSmall(n_max));
    }
    Ok(())
}

impl TruncatedState {
    pub fn vacuum(n_modes: usize, n_max: usize) -> Result<Self> {
        Self::fock(&vec![0; n_modes], n_max)
    }

    /// Pure number state `|n_0, n_1⟩`.
    pub fn fock(occupations: &[usize], n_max: usize) -> Result<Self> {
        check_dims(occupations.len(), n_max)?;
        if occupations.iter().any(|&n| n > n_max) {
            return Err(OracleError::InvalidParameter("occupation above truncation".into()));
        }
        let mut s = Self {
            n_modes: occupations.len(),
            n_max,
            rho: vec![C::new(0.0, 0.0); dim(occupations.len(), n_max).pow(2)],
        };
        let k = occupations.iter().fold(0, |acc, &n| acc * (n_max + 1) + n);
        let d = s.dim();
        s.rho[k * d + k] = C::new(1.0, 0.0);
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        dim(self.n_modes, self.n_max)
    }

    pub fn trace(&self) -> C {
        let d = self.dim();
        (0..d).map(|k| self.rho[k * d + k]).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim();
        let mut r: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                r = r.max((self.rho[i * d + j] - self.rho[j * d + i].conj()).norm());
            }
        }
        r
    }

    /// Population with any mode in one of the two highest Fock levels.
    pub fn top_population(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .filter(|&k| occupations(k, self.n_modes, self.n_max).iter().any(|&n| n + 1 >= self.n_max))
            .map(|k| self.rho[k * d + k].re)
            .sum()
    }
}

fn dim(n_modes: usize, n_max: usize) -> usize {
    (n_max + 1).pow(n_modes as u32)
}

fn occupations(k: usize, n_modes: usize, n_max: usize) -> Vec<usize> {
    let mut out = vec![0; n_modes];
    let mut r = k;
    for slot in out.iter_mut().rev() {
        *slot = r % (n_max + 1);
        r /= n_max + 1;
    }
    out
}

/// Sparse operator stored by rows.
#[derive(Debug, Clone)]
struct Sparse {
    rows: Vec<Vec<(usize, C)>>,
}

impl Sparse {
    fn zero(d: usize) -> Self {
        Self { rows: vec![Vec::new(); d] }
    }

    fn annihilation(mode: usize, n_modes: usize, n_max: usize) -> Self {
        let d = dim(n_modes, n_max);
        let stride = (n_max + 1).pow((n_modes - 1 - mode) as u32);
        let mut s = Self::zero(d);
        for k in 0..d {
            let n = occupations(k, n_modes, n_max)[mode];
            if n < n_max {
                // ⟨n| b |n+1⟩ = √(n+1)
                s.rows[k].push((k + stride, C::new(((n + 1) as f64).sqrt(), 0.0)));
            }
        }
        s
    }

    fn adjoint(&self) -> Self {
        let mut s = Self::zero(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                s.rows[c].push((r, v.conj()));
            }
        }
        s
    }

    fn mul(&self, other: &Self) -> Self {
        let d = self.rows.len();
        let mut s = Self::zero(d);
        let mut acc = vec![C::new(0.0, 0.0); d];
        let mut touched = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            for &(k, v) in row {
                for &(c, w) in &other.rows[k] {
                    if acc[c] == C::new(0.0, 0.0) {
                        touched.push(c);
                    }
                    acc[c] += v * w;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            for &c in &touched {
                if acc[c] != C::new(0.0, 0.0) {
                    s.rows[r].push((c, acc[c]));
                }
                acc[c] = C::new(0.0, 0.0);
            }
            touched.clear();
        }
        s
    }

    fn add_scaled(&mut self, other: &Self, a: C) {
        for (r, row) in other.rows.iter().enumerate() {
            for &(c, v) in row {
                match self.rows[r].iter_mut().find(|(cc, _)| *cc == c) {
                    Some(e) => e.1 += a * v,
                    None => self.rows[r].push((c, a * v)),
                }
            }
        }
    }

    fn max_row_sum(&self) -> f64 {
        self.rows.iter().map(|r| r.iter().map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// out += a · S ρ
    fn left_apply(&self, rho: &[C], out: &mut [C], a: C) {
        let d = self.rows.len();
        for (r, row) in self.rows.iter().enumerate() {
            let dst = &mut out[r * d..(r + 1) * d];
            for &(k, v) in row {
                let w = a * v;
                let src = &rho[k * d..(k + 1) * d];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += w * s;
                }
            }
        }
    }

    /// out += a · ρ S
    fn right_apply(&self, rho: &[C], out: &mut [C], a: C) {
        let d = self.rows.len();
        for r in 0..d {
            let src = &rho[r * d..(r + 1) * d];
            let dst = &mut out[r * d..(r + 1) * d];
            for (k, row) in self.rows.iter().enumerate() {
                let x = src[k];
                if x == C::new(0.0, 0.0) {
                    continue;
                }
                for &(c, v) in row {
                    dst[c] += a * v * x;
                }
            }
        }
    }

    /// The single entry of each row, if the operator has at most one per row.
    fn single_entries(&self) -> Option<Vec<Option<(usize, C)>>> {
        self.rows
            .iter()
            .map(|r| match r.len() {
                0 => Some(None),
                1 => Some(Some(r[0])),
                _ => None,
            })
            .collect()
    }
}

/// One jump term `coef · 2 x ρ y` with ladder operators `x`, `y`.
#[derive(Debug, Clone)]
struct Jump {
    coef: C,
    x: Vec<Option<(usize, C)>>,
    y: Vec<Option<(usize, C)>>,
}

impl Jump {
    /// out[r, c] += coef · x_rk ρ_kl y_lc, one pass over ρ.
    fn apply(&self, rho: &[C], out: &mut [C]) {
        let d = self.x.len();
        for (r, xe) in self.x.iter().enumerate() {
            let Some((k, xv)) = *xe else { continue };
            let w = self.coef * xv;
            let src = &rho[k * d..(k + 1) * d];
            let dst = &mut out[r * d..(r + 1) * d];
            for (l, ye) in self.y.iter().enumerate() {
                if let Some((c, yv)) = *ye {
                    dst[c] += w * yv * src[l];
                }
            }
        }
    }

    fn row_bound(&self) -> f64 {
        let m = |v: &Vec<Option<(usize, C)>>| v.iter().flatten().map(|e| e.1.norm()).fold(0.0, f64::max);
        self.coef.norm() * m(&self.x) * m(&self.y)
    }
}

/// Precomputed Lindblad generator `ρ ↦ Gρ + ρG' + Σ 2c x ρ y`.
#[derive(Debug, Clone)]
pub struct Lindbladian {
    n_modes: usize,
    n_max: usize,
    left: Sparse,
    right: Sparse,
    jumps: Vec<Jump>,
    norm_bound: f64,
    spectral_radius: f64,
}

impl Lindbladian {
    /// `j` is the M×M hopping matrix of `H = Σ j_kl b_k† b_l`; the reservoir acts
    /// on mode 0 and vacuum damping `γ𝒟_{b,b†}` on every mode.
    pub fn new(j: &[Vec<C>], bath: Bath, gamma: f64, n_max: usize) -> Result<Self> {
        let m = j.len();
        check_dims(m, n_max)?;
        if j.iter().any(|row| row.len() != m) {
            return Err(OracleError::InvalidParameter("hopping matrix is not square".into()));
        }
        if bath.kappa < 0.0 || bath.n_bar < 0.0 || gamma < 0.0 {
            return Err(OracleError::InvalidParameter("rates and occupations must be ≥ 0".into()));
        }
        let d = dim(m, n_max);
        let b: Vec<Sparse> = (0..m).map(|k| Sparse::annihilation(k, m, n_max)).collect();
        let bd: Vec<Sparse> = b.iter().map(Sparse::adjoint).collect();

        let mut h = Sparse::zero(d);
        for k in 0..m {
            for l in 0..m {
                if j[k][l] != C::new(0.0, 0.0) {
                    h.add_scaled(&bd[k].mul(&b[l]), j[k][l]);
                }
            }
        }

        let kap = C::new(bath.kappa, 0.0);
        let mut terms: Vec<(C, &Sparse, &Sparse)> = vec![
            (kap * (bath.n_bar + 1.0), &b[0], &bd[0]),
            (kap * bath.n_bar, &bd[0], &b[0]),
            (-kap * bath.m_bar.conj(), &b[0], &b[0]),
            (-kap * bath.m_bar, &bd[0], &bd[0]),
        ];
        if gamma > 0.0 {
            for k in 0..m {
                terms.push((C::new(gamma, 0.0), &b[k], &bd[k]));
            }
        }

        // −yxρ − ρyx summed over the terms
        let mut k_op = Sparse::zero(d);
        let mut jumps = Vec::new();
        for (coef, x, y) in terms {
            if coef == C::new(0.0, 0.0) {
                continue;
            }
            k_op.add_scaled(&y.mul(x), coef);
            jumps.push(Jump {
                coef: coef * 2.0,
                x: x.single_entries().expect("ladder operator"),
                y: y.single_entries().expect("ladder operator"),
            });
        }
        let mut left = Sparse::zero(d);
        left.add_scaled(&h, C::new(0.0, -1.0));
        left.add_scaled(&k_op, C::new(-1.0, 0.0));
        let mut right = Sparse::zero(d);
        right.add_scaled(&h, C::new(0.0, 1.0));
        right.add_scaled(&k_op, C::new(-1.0, 0.0));

        let norm_bound = left.max_row_sum()
            + right.max_row_sum()
            + jumps.iter().map(Jump::row_bound).sum::<f64>();
        let mut l = Self {
            n_modes: m,
            n_max,
            left,
            right,
            jumps,
            norm_bound,
            spectral_radius: 0.0,
        };
        l.spectral_radius = l.estimate_spectral_radius();
        Ok(l)
    }

    /// Power-iteration estimate of the generator's spectral radius.
    fn estimate_spectral_radius(&self) -> f64 {
        let n = self.left.rows.len().pow(2);
        // deterministic start vector with no particular structure
        let mut v: Vec<C> = (0..n)
            .map(|i| C::new(((i * 7919) % 101) as f64 / 101.0 - 0.5, ((i * 104729) % 97) as f64 / 97.0 - 0.5))
            .collect();
        let mut w = vec![C::new(0.0, 0.0); n];
        let mut est: f64 = 0.0;
        for _ in 0..60 {
            let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= nv);
            self.apply_into(&v, &mut w);
            est = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            std::mem::swap(&mut v, &mut w);
        }
        est
    }

    /// Rough bound on the generator norm; RK4 is stable for `dt·bound ≲ 2.7`.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// RK4 step inside the stability region (|hλ| ≲ 2.78 on the real axis),
    /// based on the power-iteration estimate of the spectral radius.
    pub fn suggested_step(&self) -> f64 {
        let rho = (1.1 * self.spectral_radius).min(self.norm_bound);
        2.5 / rho.max(1e-12)
    }

    fn check_state(&self, rho: &TruncatedState) -> Result<()> {
        if rho.n_modes != self.n_modes || rho.n_max != self.n_max {
            return Err(OracleError::InvalidParameter(format!(
                "state is ({}, {}) but generator is ({}, {})",
                rho.n_modes, rho.n_max, self.n_modes, self.n_max
            )));
        }
        Ok(())
    }

    fn apply_into(&self, rho: &[C], out: &mut [C]) {
        out.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
        let one = C::new(1.0, 0.0);
        self.left.left_apply(rho, out, one);
        self.right.right_apply(rho, out, one);
        for jp in &self.jumps {
            jp.apply(rho, out);
        }
    }

    /// `dρ/dt`.
    pub fn rhs(&self, rho: &TruncatedState) -> Result<Vec<C>> {
        self.check_state(rho)?;
        let mut out = vec![C::new(0.0, 0.0); rho.rho.len()];
        self.apply_into(&rho.rho, &mut out);
        Ok(out)
    }
}

/// Convenience wrapper building the generator for a single evaluation.
pub fn lindblad_rhs(rho: &TruncatedState, j: &[Vec<C>], bath: Bath, gamma: f64) -> Result<Vec<C>> {
    Lindbladian::new(j, bath, gamma, rho.n_max)?.rhs(rho)
}

#[derive(Debug, Clone)]
pub struct Integration {
    pub state: TruncatedState,
    /// largest |tr ρ − 1| seen before the final renormalization
    pub max_trace_drift: f64,
    pub max_hermiticity_drift: f64,
    pub top_population: f64,
    pub steps: usize,
}

/// Fixed-step classical RK4 up to time `t`, with `steps = ⌈t/dt⌉`.
/// Refuses the result if the top two Fock levels hold more than `leakage_threshold`.
pub fn integrate(
    rho0: &TruncatedState,
    l: &Lindbladian,
    t: f64,
    dt: f64,
    leakage_threshold: f64,
) -> Result<Integration> {
    l.check_state(rho0)?;
    if !(t >= 0.0) || !(dt > 0.0) {
        return Err(OracleError::InvalidParameter(format!("need t ≥ 0 and dt > 0, got t={t}, dt={dt}")));
    }
    let steps = (t / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t / steps as f64 };
    let n = rho0.rho.len();
    let mut y = rho0.rho.clone();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![C::new(0.0, 0.0); n], vec![C::new(0.0, 0.0); n], vec![C::new(0.0, 0.0); n], vec![C::new(0.0, 0.0); n]);
    let mut tmp = vec![C::new(0.0, 0.0); n];
    let d = rho0.dim();
    let mut max_trace_drift: f64 = 0.0;
    let mut max_herm: f64 = 0.0;
    for step in 0..steps {
        l.apply_into(&y, &mut k1);
        axpy_into(&y, &k1, 0.5 * h, &mut tmp);
        l.apply_into(&tmp, &mut k2);
        axpy_into(&y, &k2, 0.5 * h, &mut tmp);
        l.apply_into(&tmp, &mut k3);
        axpy_into(&y, &k3, h, &mut tmp);
        l.apply_into(&tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
        if step % 50 == 0 || step + 1 == steps {
            let tr: C = (0..d).map(|k| y[k * d + k]).sum();
            max_trace_drift = max_trace_drift.max((tr - 1.0).norm());
            let st = TruncatedState { n_modes: rho0.n_modes, n_max: rho0.n_max, rho: y.clone() };
            max_herm = max_herm.max(st.hermiticity_residual());
        }
    }
    let tr: C = (0..d).map(|k| y[k * d + k]).sum();
    y.iter_mut().for_each(|v| *v /= tr);
    let state = TruncatedState { n_modes: rho0.n_modes, n_max: rho0.n_max, rho: y };
    let top = state.top_population();
    if top > leakage_threshold {
        return Err(OracleError::Leakage { population: top, threshold: leakage_threshold });
    }
    Ok(Integration {
        state,
        max_trace_drift,
        max_hermiticity_drift: max_herm,
        top_population: top,
        steps,
    })
}

fn axpy_into(y: &[C], k: &[C], a: f64, out: &mut [C]) {
    for ((o, yv), kv) in out.iter_mut().zip(y).zip(k) {
        *o = yv + kv * a;
    }
}

/// First and second moments in the quadratures `q = b + b†`, `p = −i(b − b†)`,
/// ordered `(q_0, …, q_{M−1}, p_0, …, p_{M−1})`; vacuum covariance is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub mean: Vec<f64>,
    /// row-major 2M×2M symmetrized covariance `⟨{Δx_i, Δx_j}⟩/2`
    pub covariance: Vec<Vec<f64>>,
}

fn expect(op: &Sparse, rho: &[C]) -> C {
    // tr(O ρ) = Σ_r Σ_k O_rk ρ_kr
    let d = op.rows.len();
    let mut acc = C::new(0.0, 0.0);
    for (r, row) in op.rows.iter().enumerate() {
        for &(k, v) in row {
            acc += v * rho[k * d + r];
        }
    }
    acc
}

pub fn moments(state: &TruncatedState) -> Moments {
    let m = state.n_modes;
    let d = state.dim();
    let b: Vec<Sparse> = (0..m).map(|k| Sparse::annihilation(k, m, state.n_max)).collect();
    let i = C::new(0.0, 1.0);
    let mut quads = Vec::with_capacity(2 * m);
    for k in 0..m {
        let mut q = b[k].clone();
        q.add_scaled(&b[k].adjoint(), C::new(1.0, 0.0));
        quads.push(q);
    }
    for k in 0..m {
        let mut p = Sparse::zero(d);
        p.add_scaled(&b[k], -i);
        p.add_scaled(&b[k].adjoint(), i);
        quads.push(p);
    }
    let mean: Vec<f64> = quads.iter().map(|q| expect(q, &state.rho).re).collect();
    let mut cov = vec![vec![0.0; 2 * m]; 2 * m];
    for a in 0..2 * m {
        for c in 0..2 * m {
            let ab = expect(&quads[a].mul(&quads[c]), &state.rho);
            let ba = expect(&quads[c].mul(&quads[a]), &state.rho);
            cov[a][c] = 0.5 * (ab + ba).re - mean[a] * mean[c];
        }
    }
    Moments { mean, covariance: cov }
}

/// Mean photon number of mode `k`.
pub fn occupation(state: &TruncatedState, k: usize) -> f64 {
    let d = state.dim();
    (0..d)
        .map(|idx| occupations(idx, state.n_modes, state.n_max)[k] as f64 * state.rho[idx * d + idx].re)
        .sum()
}
