//! Cluster-state targets built from adjacency graphs, the self-inverse
//! family, and nullifier diagnostics.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, cidentity, fro, fro_r, symmetry_residual, to_complex, unitarity_residual, CMatrix, RMatrix, I};
use crate::metrics::quadratic_form_variance;
use crate::model::{SqueezedBathSpec, TheoremModel};
use crate::linalg::symmetric_eigh;
use crate::symplectic::{BogoliubovTransform, CovarianceState};

/// Real symmetric adjacency matrix with zero diagonal. Weights need not be 0/1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyGraph {
    a: RMatrix,
}

impl AdjacencyGraph {
    pub fn new(a: RMatrix) -> Result<Self> {
        if !a.is_square() || a.nrows() == 0 {
            return Err(Error::Dimension(format!("adjacency matrix is {:?}", a.shape())));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("adjacency matrix has non-finite entries".into()));
        }
        let asym = fro_r(&(&a - a.transpose()));
        if asym > 1e-12 * fro_r(&a).max(1.0) {
            return Err(Error::InvalidParameter(format!("adjacency matrix is not symmetric (residual {asym:.3e})")));
        }
        if let Some(j) = (0..a.nrows()).find(|&j| a[(j, j)] != 0.0) {
            return Err(Error::InvalidParameter(format!("adjacency matrix has a self-loop at node {j}")));
        }
        Ok(Self { a })
    }

    /// Unit-weight graph from an undirected edge list.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::Dimension("graph needs at least one node".into()));
        }
        let mut a = RMatrix::zeros(n_nodes, n_nodes);
        for &(u, v) in edges {
            if u >= n_nodes || v >= n_nodes {
                return Err(Error::InvalidParameter(format!("edge ({u}, {v}) outside 0..{n_nodes}")));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at node {u}")));
            }
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        Ok(Self { a })
    }

    pub fn n_nodes(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.a
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_nodes();
        let mut out = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if self.a[(u, v)] != 0.0 {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.edges().len()
    }
}

/// Nearest-neighbour grid with open boundaries; node `(r, c)` has index `r·cols + c`.
pub fn square_lattice(rows: usize, cols: usize) -> Result<AdjacencyGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!("lattice {rows}×{cols} has no nodes")));
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for col in 0..cols {
            let k = r * cols + col;
            if col + 1 < cols {
                edges.push((k, k + 1));
            }
            if r + 1 < rows {
                edges.push((k, k + cols));
            }
        }
    }
    AdjacencyGraph::from_edges(rows * cols, &edges)
}

/// `𝒵 = −i(𝒜 − i𝟙)(𝒜 + i𝟙)⁻¹`, unitary and symmetric.
pub fn z_from_adjacency(graph: &AdjacencyGraph) -> Result<CMatrix> {
    let n = graph.n_nodes();
    let a = to_complex(graph.matrix());
    let plus = &a + cidentity(n) * I;
    let minus = &a - cidentity(n) * I;
    // the two factors commute, so the order of the inverse is immaterial
    let lu = plus.lu();
    let z = lu
        .solve(&minus)
        .ok_or_else(|| Error::Decomposition("A + i1 is singular".into()))?
        * (-I);
    let z = (&z + z.transpose()).scale(0.5);
    let tol = 1e-10 * (n as f64).max(1.0);
    let u = unitarity_residual(&z);
    if u > tol {
        return Err(Error::NotUnitary(u));
    }
    debug_assert!(symmetry_residual(&z) <= tol);
    Ok(z)
}

/// Principal square root of `−i𝒵 = e^{2i arctan 𝒜}`, i.e. `(𝟙 + i𝒜)(𝟙 + 𝒜²)^{−1/2}`.
///
/// It is symmetric, so it is the canonical Takagi factor of `−i𝒵`. Any other
/// factor differs by a real orthogonal matrix on the right and yields a
/// different (equally valid) Hamiltonian.
pub fn principal_sqrt_minus_iz(graph: &AdjacencyGraph) -> CMatrix {
    let (vals, q) = symmetric_eigh(graph.matrix());
    let qc = to_complex(&q);
    let d = CMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|a| Complex64::from_polar(1.0, a.atan())),
    ));
    let v = &qc * d * qc.transpose();
    (&v + v.transpose()).scale(0.5)
}

/// Target transform `U_z` of a cluster state and its passive Takagi factor.
#[derive(Debug, Clone)]
pub struct ClusterTarget {
    pub graph: AdjacencyGraph,
    pub z: f64,
    /// `𝒵`
    pub zmat: CMatrix,
    /// `V° = (−i𝒵)^{1/2}` (principal root, symmetric), so `V° V°ᵀ = −i𝒵`
    pub vp: CMatrix,
    /// `X = cosh z 𝟙`, `Y = −i sinh z 𝒵`
    pub transform: BogoliubovTransform,
}

impl ClusterTarget {
    pub fn n_nodes(&self) -> usize {
        self.graph.n_nodes()
    }

    pub fn covariance(&self) -> CovarianceState {
        crate::symplectic::to_covariance(&self.transform)
    }

    /// The chain model that stabilizes this target with the given bath.
    pub fn model(&self, bath: SqueezedBathSpec, couplings: &[f64]) -> Result<TheoremModel> {
        let z0 = bath.z0();
        if (z0 - self.z).abs() > 1e-9 * z0.max(1.0) {
            return Err(Error::NotPreparable(format!(
                "target squeezing {:.6} differs from the reservoir's z0 = {z0:.6}",
                self.z
            )));
        }
        TheoremModel::from_passive(&self.vp, bath, couplings)
    }
}

pub fn build_target(graph: &AdjacencyGraph, z: f64) -> Result<ClusterTarget> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!("squeezing strength must be ≥ 0, got {z}")));
    }
    let n = graph.n_nodes();
    let zmat = z_from_adjacency(graph)?;
    let vp = principal_sqrt_minus_iz(graph);
    let x = cidentity(n) * c(z.cosh(), 0.0);
    let y = &zmat * (-I * z.sinh());
    let transform = BogoliubovTransform::new(x, y, 1e-9 * z.cosh().powi(2).max(1.0) * n as f64)?;
    Ok(ClusterTarget {
        graph: graph.clone(),
        z,
        zmat,
        vp,
        transform,
    })
}

/// `X = cosh z 𝟙 + (i/2)e^z 𝒜`, `Y = sinh z 𝟙 + (i/2)e^z 𝒜`; valid for any symmetric `𝒜`.
pub fn build_selfinverse_cluster(a: &RMatrix, z: f64) -> Result<BogoliubovTransform> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("adjacency matrix is {:?}", a.shape())));
    }
    if fro_r(&(a - a.transpose())) > 1e-12 * fro_r(a).max(1.0) {
        return Err(Error::InvalidParameter("adjacency matrix is not symmetric".into()));
    }
    let n = a.nrows();
    let ac = to_complex(a) * (I * (0.5 * z.exp()));
    let x = cidentity(n) * c(z.cosh(), 0.0) + &ac;
    let y = cidentity(n) * c(z.sinh(), 0.0) + &ac;
    let scale = fro(&x).max(1.0);
    BogoliubovTransform::new(x, y, 1e-10 * scale * scale)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preparability {
    pub preparable: bool,
    /// max/min singular value of X
    pub spread: f64,
    pub singular_values: Vec<f64>,
}

/// Equal squeezing in every Bloch-Messiah mode, i.e. X (and Y) proportional to unitaries.
pub fn is_preparable(b: &BogoliubovTransform, tol: f64) -> Preparability {
    let mut sv: Vec<f64> = b.x().clone().singular_values().iter().copied().collect();
    sv.sort_by(|p, q| q.total_cmp(p));
    let spread = sv[0] / sv[sv.len() - 1];
    Preparability {
        preparable: spread - 1.0 <= tol,
        spread,
        singular_values: sv,
    }
}

/// Coefficient vectors (q-block, p-block) of `x_j = p_j − Σ_k 𝒜_jk q_k`
/// and `y_j = −q_j − Σ_k 𝒜_jk p_k`.
pub fn nullifier_coefficients(a: &RMatrix, j: usize) -> (DVector<f64>, DVector<f64>) {
    let n = a.nrows();
    let mut x = DVector::zeros(2 * n);
    let mut y = DVector::zeros(2 * n);
    for k in 0..n {
        x[k] = -a[(j, k)];
        y[n + k] = -a[(j, k)];
    }
    x[n + j] += 1.0;
    y[j] -= 1.0;
    (x, y)
}

/// `r_j = (1 + Σ_k 𝒜_jk²)^{−1/2}`, fixing `[X_j, Y_j] = 2i`.
pub fn nullifier_normalization(a: &RMatrix, j: usize) -> f64 {
    (1.0 + a.row(j).iter().map(|v| v * v).sum::<f64>()).powf(-0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullifierVariances {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

fn check_graph_dims(sigma: &CovarianceState, a: &RMatrix) -> Result<()> {
    if !a.is_square() || a.nrows() != sigma.n_modes() {
        return Err(Error::Dimension(format!(
            "state has {} modes but the graph has {:?}",
            sigma.n_modes(),
            a.shape()
        )));
    }
    Ok(())
}

/// Normalized variances of `X_j = r_j x_j` and `Y_j = r_j y_j`; vacuum gives 1.
pub fn nullifier_variances(sigma: &CovarianceState, a: &RMatrix) -> Result<NullifierVariances> {
    check_graph_dims(sigma, a)?;
    let n = a.nrows();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for j in 0..n {
        let (cx, cy) = nullifier_coefficients(a, j);
        let r2 = nullifier_normalization(a, j).powi(2);
        x.push(r2 * quadratic_form_variance(sigma, &cx)?);
        y.push(r2 * quadratic_form_variance(sigma, &cy)?);
    }
    Ok(NullifierVariances { x, y })
}

/// Covariance matrix `⟨{x_j, x_k}⟩/2` of the unnormalized nullifiers.
pub fn nullifier_covariance(sigma: &CovarianceState, a: &RMatrix) -> Result<RMatrix> {
    check_graph_dims(sigma, a)?;
    let n = a.nrows();
    let mut coeffs = RMatrix::zeros(n, 2 * n);
    for j in 0..n {
        coeffs.row_mut(j).copy_from(&nullifier_coefficients(a, j).0.transpose());
    }
    Ok(&coeffs * sigma.matrix() * coeffs.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{bloch_messiah, squeezers, to_covariance};

    #[test]
    fn lattice_edge_counts() {
        let g = square_lattice(1, 2).unwrap();
        assert_eq!(g.matrix(), &RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(square_lattice(2, 2).unwrap().n_edges(), 4);
        let big = square_lattice(5, 5).unwrap();
        assert_eq!(big.n_nodes(), 25);
        assert_eq!(big.n_edges(), 40);
        assert!(square_lattice(0, 3).is_err());
    }

    #[test]
    fn graph_validation() {
        assert!(AdjacencyGraph::new(RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])).is_err());
        assert!(AdjacencyGraph::new(RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])).is_err());
        assert!(AdjacencyGraph::from_edges(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn z_for_small_graphs() {
        let empty = AdjacencyGraph::new(RMatrix::zeros(3, 3)).unwrap();
        let z = z_from_adjacency(&empty).unwrap();
        assert!(fro(&(z - cidentity(3) * I)) < 1e-14);
        let pair = square_lattice(1, 2).unwrap();
        let z = z_from_adjacency(&pair).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        assert!(fro(&(z - want)) < 1e-14);
    }

    #[test]
    fn principal_root_closed_forms() {
        let pair = square_lattice(1, 2).unwrap();
        let v = principal_sqrt_minus_iz(&pair);
        let want = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)]) * c(0.5f64.sqrt(), 0.0);
        assert!(fro(&(v - want)) < 1e-14);
        let empty = AdjacencyGraph::new(RMatrix::zeros(4, 4)).unwrap();
        assert!(fro(&(principal_sqrt_minus_iz(&empty) - cidentity(4))) < 1e-14);
    }

    #[test]
    fn lattice_root_is_symmetric_takagi_factor() {
        let g = square_lattice(5, 5).unwrap();
        let v = principal_sqrt_minus_iz(&g);
        let miz = z_from_adjacency(&g).unwrap() * (-I);
        assert!(fro(&(&v * &v - &miz)) < 1e-12);
        assert!(symmetry_residual(&v) < 1e-14);
        assert!(unitarity_residual(&v) < 1e-12);
        // the generic Takagi routine finds a factor of the same matrix
        let w = crate::symplectic::takagi(&miz).unwrap();
        assert!(fro(&(&w * w.transpose() - &miz)) < 1e-10);
    }

    #[test]
    fn lattice_target_has_equal_squeezing() {
        let g = square_lattice(5, 5).unwrap();
        let t = build_target(&g, 0.88).unwrap();
        let vvt = &t.vp * t.vp.transpose();
        assert!(fro(&(vvt - &t.zmat * (-I))) < 1e-10);
        let f = bloch_messiah(&t.transform, 1e-9).unwrap();
        assert!(f.dz.iter().all(|&d| (d - 0.88).abs() < 1e-9));
        assert!(is_preparable(&t.transform, 1e-9).preparable);
    }

    #[test]
    fn zero_squeezing_target_is_vacuum() {
        let t = build_target(&square_lattice(2, 3).unwrap(), 0.0).unwrap();
        assert!(t.transform.is_passive(1e-14));
        assert!(fro_r(&(t.covariance().into_matrix() - RMatrix::identity(12, 12))) < 1e-12);
    }

    #[test]
    fn edgeless_target_is_product_of_squeezers() {
        let g = AdjacencyGraph::new(RMatrix::zeros(3, 3)).unwrap();
        let t = build_target(&g, 0.4).unwrap();
        let prod = to_covariance(&squeezers(&[0.4; 3], &[0.0; 3]).unwrap());
        assert!(fro_r(&(t.covariance().into_matrix() - prod.into_matrix())) < 1e-12);
    }

    #[test]
    fn selfinverse_family() {
        let a = RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let b = build_selfinverse_cluster(&a, 0.5).unwrap();
        let xx = b.x() * b.x().adjoint();
        let k = 0.5f64.cosh().powi(2) + 1f64.exp() / 4.0;
        assert!(fro(&(xx - cidentity(2) * c(k, 0.0))) < 1e-12);
        assert!(is_preparable(&b, 1e-9).preparable);
        let lattice = build_selfinverse_cluster(square_lattice(5, 5).unwrap().matrix(), 0.5).unwrap();
        assert!(!is_preparable(&lattice, 1e-9).preparable);
        let plain = build_selfinverse_cluster(&RMatrix::zeros(2, 2), 0.3).unwrap();
        let s = squeezers(&[0.3, 0.3], &[0.0, 0.0]).unwrap();
        assert!(fro(&(plain.x() - s.x())) + fro(&(plain.y() - s.y())) < 1e-14);
    }

    #[test]
    fn preparability_of_unequal_squeezers() {
        let s = squeezers(&[0.3, 0.9], &[0.0, 0.0]).unwrap();
        let p = is_preparable(&s, 1e-9);
        assert!(!p.preparable);
        assert!((p.spread - 0.9f64.cosh() / 0.3f64.cosh()).abs() < 1e-12);
        assert!(is_preparable(&BogoliubovTransform::identity(3), 1e-12).preparable);
    }

    #[test]
    fn vacuum_nullifiers_are_normalized() {
        let g = square_lattice(3, 3).unwrap();
        let v = nullifier_variances(&CovarianceState::vacuum(9), g.matrix()).unwrap();
        for (x, y) in v.x.iter().zip(&v.y) {
            assert!((x - 1.0).abs() < 1e-14 && (y - 1.0).abs() < 1e-14);
        }
        let (cx, _) = nullifier_coefficients(g.matrix(), 4);
        let raw = quadratic_form_variance(&CovarianceState::vacuum(9), &cx).unwrap();
        assert!((raw - 5.0).abs() < 1e-14);
        assert!(nullifier_variances(&CovarianceState::vacuum(8), g.matrix()).is_err());
    }

    #[test]
    fn selfinverse_nullifier_covariance() {
        let a = RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        for z in [0.2, 1.0] {
            let s = to_covariance(&build_selfinverse_cluster(&a, z).unwrap());
            let cz = nullifier_covariance(&s, &a).unwrap();
            assert!(fro_r(&(cz - RMatrix::identity(2, 2) * (-2.0 * z).exp())) < 1e-10);
        }
    }

    #[test]
    fn lattice_target_nullifiers_saturate_bracket() {
        let g = square_lattice(5, 5).unwrap();
        let z0 = (0.5f64).sqrt().atanh();
        let v = nullifier_variances(&build_target(&g, z0).unwrap().covariance(), g.matrix()).unwrap();
        for (x, y) in v.x.iter().zip(&v.y) {
            // the ideal target sits exactly on the reservoir bracket
            assert!((x - (-2.0 * z0).exp()).abs() < 1e-10, "{x}");
            assert!((y - (2.0 * z0).exp()).abs() < 1e-10, "{y}");
        }
    }
}
