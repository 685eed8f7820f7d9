//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;
use sqbath::model::SqueezedBathSpec;
use sqbath::studies::{PerturbationKind, SeriesSpec, DEFAULT_GAMMA_SCALED, DEFAULT_REALIZATIONS, DEFAULT_SERIES};
use sqbath::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub model: ModelConfig,
    pub bath: BathConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub optimize: Option<OptimizeConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    /// directory of the config file; relative paths resolve against it
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelConfig {
    /// Cluster state on a square lattice or an edge-list graph.
    Cluster {
        #[serde(default)]
        lattice: Option<[usize; 2]>,
        #[serde(default)]
        graph: Option<PathBuf>,
        couplings: Couplings,
    },
    /// Product of equally squeezed modes sustained by a bare chain.
    Chain { couplings: Vec<f64> },
    /// A previously written model document.
    Explicit { file: PathBuf },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Couplings {
    Uniform(f64),
    List(Vec<f64>),
}

impl Couplings {
    pub fn resolve(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            Couplings::Uniform(v) => Ok(vec![*v; n]),
            Couplings::List(v) if v.len() == n => Ok(v.clone()),
            Couplings::List(v) => Err(Error::Parse {
                context: "model.couplings".into(),
                message: format!("{n} couplings required, got {}", v.len()),
            }),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    #[serde(default = "one")]
    pub kappa: f64,
    pub n_bar: f64,
    /// phase of a pure bath, `m̄ = √(n̄(n̄+1)) e^{iφ₀}`
    #[serde(default)]
    pub phase: Option<f64>,
    /// explicit `[Re m̄, Im m̄]`, overrides `phase`
    #[serde(default)]
    pub m_bar: Option<[f64; 2]>,
}

fn one() -> f64 {
    1.0
}

impl BathConfig {
    pub fn spec(&self) -> Result<SqueezedBathSpec> {
        match (self.m_bar, self.phase) {
            (Some(_), Some(_)) => Err(Error::Parse {
                context: "bath".into(),
                message: "give either `phase` or `m_bar`, not both".into(),
            }),
            (Some([re, im]), None) => SqueezedBathSpec::new(self.kappa, self.n_bar, Complex64::new(re, im)),
            (None, p) => SqueezedBathSpec::pure(self.kappa, self.n_bar, p.unwrap_or(0.0)),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// grid in units of `κ/(N+1)`
    #[serde(default)]
    pub gamma_scaled: Option<Vec<f64>>,
    /// rates given directly
    #[serde(default)]
    pub gamma: Option<Vec<f64>>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_perturbations")]
    pub perturbation: Vec<PerturbationConfig>,
}

fn default_realizations() -> usize {
    DEFAULT_REALIZATIONS
}

fn default_perturbations() -> Vec<PerturbationConfig> {
    DEFAULT_SERIES
        .iter()
        .map(|s| PerturbationConfig { kind: s.kind, epsilon: s.epsilon })
        .collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            gamma_scaled: None,
            gamma: None,
            realizations: default_realizations(),
            perturbation: default_perturbations(),
        }
    }
}

impl SweepConfig {
    /// Absolute rates for an `m`-site model.
    pub fn gammas(&self, m: usize, kappa: f64) -> Result<Vec<f64>> {
        match (&self.gamma, &self.gamma_scaled) {
            (Some(_), Some(_)) => Err(Error::Parse {
                context: "sweep".into(),
                message: "give either `gamma` or `gamma_scaled`, not both".into(),
            }),
            (Some(g), None) => Ok(g.clone()),
            (None, s) => Ok(s
                .as_deref()
                .unwrap_or(&DEFAULT_GAMMA_SCALED)
                .iter()
                .map(|g| g * kappa / m as f64)
                .collect()),
        }
    }

    pub fn series(&self) -> Vec<SeriesSpec> {
        self.perturbation
            .iter()
            .map(|p| SeriesSpec { kind: p.kind, epsilon: p.epsilon })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    pub kind: PerturbationKind,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub sites: usize,
    pub mean_coupling: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

fn default_restarts() -> usize {
    20
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let context = match e.span() {
                Some(span) => {
                    let line = text[..span.start].matches('\n').count() + 1;
                    format!("{origin}:{line}")
                }
                None => origin.to_string(),
            };
            Error::Parse {
                context,
                message: e.message().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            context: path.display().to_string(),
            source,
        })?;
        let mut cfg = Self::parse(&text, &path.display().to_string())?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}
