//! Persistence: JSON matrix and model documents, edge lists, covariance tables.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cluster::AdjacencyGraph;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, RMatrix};
use crate::model::{ChiralReport, HermitianCoupling, SqueezedBathSpec, StabilityReport};
use crate::symplectic::{BogoliubovTransform, CovarianceState, DEFAULT_TOL};

/// Dense complex matrix, row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexMatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                re.push(m[(r, c)].re);
                im.push(m[(r, c)].im);
            }
        }
        Self { rows, cols, re, im }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.rows * self.cols;
        if self.re.len() != n || self.im.len() != n {
            return Err(Error::Dimension(format!(
                "{}×{} matrix needs {} entries, got {} real and {} imaginary",
                self.rows,
                self.cols,
                n,
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |r, c| {
            let k = r * self.cols + c;
            Complex64::new(self.re[k], self.im[k])
        }))
    }
}

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealMatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl RealMatrixDoc {
    pub fn from_matrix(m: &RMatrix) -> Self {
        let (rows, cols) = m.shape();
        Self {
            rows,
            cols,
            data: (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).map(|(r, c)| m[(r, c)]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<RMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Dimension(format!(
                "{}×{} matrix needs {} entries, got {}",
                self.rows,
                self.cols,
                self.rows * self.cols,
                self.data.len()
            )));
        }
        Ok(RMatrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

/// Bogoliubov transform `(X, Y)` as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformDoc {
    pub x: ComplexMatrixDoc,
    pub y: ComplexMatrixDoc,
}

impl TransformDoc {
    pub fn from_transform(b: &BogoliubovTransform) -> Self {
        Self {
            x: ComplexMatrixDoc::from_matrix(b.x()),
            y: ComplexMatrixDoc::from_matrix(b.y()),
        }
    }

    pub fn to_transform(&self) -> Result<BogoliubovTransform> {
        let x = self.x.to_matrix()?;
        let y = self.y.to_matrix()?;
        let scale = crate::linalg::fro(&x).max(1.0);
        BogoliubovTransform::new(x, y, DEFAULT_TOL * scale * scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathDoc {
    pub kappa: f64,
    pub n_bar: f64,
    pub m_bar_re: f64,
    pub m_bar_im: f64,
}

impl BathDoc {
    pub fn from_bath(b: &SqueezedBathSpec) -> Self {
        Self {
            kappa: b.kappa,
            n_bar: b.n_bar,
            m_bar_re: b.m_bar.re,
            m_bar_im: b.m_bar.im,
        }
    }

    pub fn to_bath(&self) -> Result<SqueezedBathSpec> {
        SqueezedBathSpec::new(self.kappa, self.n_bar, Complex64::new(self.m_bar_re, self.m_bar_im))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDoc {
    pub couplings: Vec<f64>,
    pub thetas: Vec<f64>,
}

/// A built model: coupling matrix, bath, optional chain and graph, target and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format_version: u32,
    pub sites: usize,
    pub bath: BathDoc,
    pub coupling: ComplexMatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainDoc>,
    /// adjacency of the target graph on sites `1 … N`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency: Option<RealMatrixDoc>,
    /// target covariance on all sites, auxiliary mode first
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_covariance: Option<RealMatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chiral: Option<ChiralReport>,
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Validated contents of a [`ModelDocument`].
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub coupling: HermitianCoupling,
    pub bath: SqueezedBathSpec,
    pub adjacency: Option<RMatrix>,
    pub target: Option<CovarianceState>,
}

impl ModelDocument {
    pub fn validate(&self) -> Result<LoadedModel> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Parse {
                context: "format_version".into(),
                message: format!("unsupported version {}", self.format_version),
            });
        }
        let coupling = HermitianCoupling::new(self.coupling.to_matrix()?, 1e-10)?;
        if coupling.n_sites() != self.sites {
            return Err(Error::Dimension(format!(
                "document declares {} sites but the coupling matrix is {}×{}",
                self.sites, self.coupling.rows, self.coupling.cols
            )));
        }
        let bath = self.bath.to_bath()?;
        let adjacency = match &self.adjacency {
            Some(a) => {
                let m = a.to_matrix()?;
                if m.nrows() + 1 != self.sites {
                    return Err(Error::Dimension(format!(
                        "adjacency has {} nodes, expected {}",
                        m.nrows(),
                        self.sites - 1
                    )));
                }
                Some(AdjacencyGraph::new(m)?.matrix().clone())
            }
            None => None,
        };
        let target = match &self.target_covariance {
            Some(t) => {
                let s = CovarianceState::new(t.to_matrix()?, 1e-8)?;
                if s.n_modes() != self.sites {
                    return Err(Error::Dimension(format!("target covariance has {} modes", s.n_modes())));
                }
                if !s.is_physical(1e-8) {
                    return Err(Error::Unphysical("target covariance violates the uncertainty relation".into()));
                }
                Some(s)
            }
            None => None,
        };
        Ok(LoadedModel {
            coupling,
            bath,
            adjacency,
            target,
        })
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        context: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            context: dir.display().to_string(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        context: path.display().to_string(),
        source,
    })
}

/// Parses JSON with the file name and line/column in any error.
pub fn from_json<T: serde::de::DeserializeOwned>(text: &str, context: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        context: format!("{context}:{}:{}", e.line(), e.column()),
        message: e.to_string(),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Parse {
        context: "serialization".into(),
        message: e.to_string(),
    })
}

pub fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&read(path)?, &path.display().to_string())
}

pub fn load_model(path: &Path) -> Result<(ModelDocument, LoadedModel)> {
    let doc: ModelDocument = load_json(path)?;
    let loaded = doc.validate()?;
    Ok((doc, loaded))
}

/// Edge list: one `u v` pair per line (0-indexed), `#` comments, and an optional
/// `nodes N` line; otherwise the node count is one more than the largest index.
pub fn parse_edge_list(text: &str) -> Result<AdjacencyGraph> {
    let mut nodes: Option<usize> = None;
    let mut edges = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            context: format!("edge list line {}", no + 1),
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "nodes" {
            if fields.len() != 2 || nodes.is_some() {
                return Err(err("expected a single `nodes N` declaration".into()));
            }
            nodes = Some(fields[1].parse().map_err(|_| err(format!("bad node count `{}`", fields[1])))?);
            continue;
        }
        if fields.len() != 2 {
            return Err(err(format!("expected `u v`, got `{line}`")));
        }
        let u: usize = fields[0].parse().map_err(|_| err(format!("bad node index `{}`", fields[0])))?;
        let v: usize = fields[1].parse().map_err(|_| err(format!("bad node index `{}`", fields[1])))?;
        edges.push((u, v));
    }
    let n = match nodes {
        Some(n) => n,
        None => edges.iter().map(|&(u, v)| u.max(v) + 1).max().ok_or_else(|| Error::Parse {
            context: "edge list".into(),
            message: "no edges and no `nodes` line".into(),
        })?,
    };
    AdjacencyGraph::from_edges(n, &edges)
}

pub fn load_edge_list(path: &Path) -> Result<AdjacencyGraph> {
    parse_edge_list(&read(path)?).map_err(|e| match e {
        Error::Parse { context, message } => Error::Parse {
            context: format!("{}: {context}", path.display()),
            message,
        },
        other => other,
    })
}

/// Whitespace-separated dense matrix, one row per line, full precision.
pub fn matrix_table(m: &RMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:.17e}", m[(r, c)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
