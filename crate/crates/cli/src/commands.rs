//! Command implementations. Each returns the process exit code on success
//! paths that still signal a problem (dark mode, non-convergence).

use std::path::{Path, PathBuf};

use serde::Serialize;
use sqbath::cluster::{build_target, nullifier_variances, square_lattice, AdjacencyGraph};
use sqbath::dynamics::{assemble, steady_state_with_residual};
use sqbath::io::{
    self, BathDoc, ChainDoc, ComplexMatrixDoc, ModelDocument, RealMatrixDoc, TransformDoc, MODEL_FORMAT_VERSION,
};
use sqbath::linalg::{cidentity, fro, RMatrix};
use sqbath::metrics::{overlap, purity};
use sqbath::model::{chain_thetas, chiral_residuals, stability_report, HermitianCoupling, SqueezedBathSpec, TheoremModel};
use sqbath::studies::{equalize_overlaps, gamma_sweep, CaseStatus, EqualizeConfig, SweepModel};
use sqbath::symplectic::{bloch_messiah, BogoliubovTransform, CovarianceState};
use sqbath::{Error, Result};

use crate::config::{ExperimentConfig, ModelConfig};
use crate::table::{self, num, Audit};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INSTABILITY: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Unstable { .. } => EXIT_INSTABILITY,
        Error::NonConvergence(_) | Error::Decomposition(_) => EXIT_NONCONVERGENCE,
        _ => EXIT_VALIDATION,
    }
}

pub struct Options {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub residual: bool,
    pub timestamp: bool,
}

impl Options {
    fn out_dir(&self, cfg: Option<&ExperimentConfig>) -> PathBuf {
        if let Some(o) = &self.out {
            return o.clone();
        }
        match cfg.and_then(|c| c.output.dir.as_ref().map(|d| c.resolve(d))) {
            Some(d) => d,
            None => PathBuf::from("."),
        }
    }
}

/// Everything the commands need to know about a model.
pub struct Built {
    pub coupling: HermitianCoupling,
    pub bath: SqueezedBathSpec,
    pub chain: Option<ChainDoc>,
    pub adjacency: Option<RMatrix>,
    pub target: Option<CovarianceState>,
    pub target_transform: Option<BogoliubovTransform>,
}

fn chain_doc(m: &TheoremModel, couplings: &[f64]) -> ChainDoc {
    ChainDoc {
        couplings: couplings.to_vec(),
        thetas: chain_thetas(&m.profile.phi),
    }
}

pub fn build_model(cfg: &ExperimentConfig) -> Result<Built> {
    match &cfg.model {
        ModelConfig::Cluster { lattice, graph, couplings } => {
            let g: AdjacencyGraph = match (lattice, graph) {
                (Some([r, c]), None) => square_lattice(*r, *c)?,
                (None, Some(p)) => io::load_edge_list(&cfg.resolve(p))?,
                _ => {
                    return Err(Error::Parse {
                        context: "model".into(),
                        message: "a cluster model needs exactly one of `lattice` or `graph`".into(),
                    })
                }
            };
            let bath = cfg.bath.spec()?;
            let couplings = couplings.resolve(g.n_nodes())?;
            let target = build_target(&g, bath.z0())?;
            let m = target.model(bath, &couplings)?;
            Ok(Built {
                chain: Some(chain_doc(&m, &couplings)),
                coupling: m.coupling.clone(),
                bath,
                adjacency: Some(g.matrix().clone()),
                target: Some(m.steady_target()),
                target_transform: Some(target.transform.clone()),
            })
        }
        ModelConfig::Chain { couplings } => {
            let bath = cfg.bath.spec()?;
            let m = TheoremModel::from_passive(&cidentity(couplings.len()), bath, couplings)?;
            Ok(Built {
                chain: Some(chain_doc(&m, couplings)),
                coupling: m.coupling.clone(),
                bath,
                adjacency: None,
                target: Some(m.steady_target()),
                target_transform: Some(m.target.clone()),
            })
        }
        ModelConfig::Explicit { file } => {
            let (doc, loaded) = io::load_model(&cfg.resolve(file))?;
            Ok(Built {
                coupling: loaded.coupling,
                bath: loaded.bath,
                chain: doc.chain,
                adjacency: loaded.adjacency,
                target: loaded.target,
                target_transform: None,
            })
        }
    }
}

pub fn cmd_build(cfg: &ExperimentConfig, opts: &Options) -> Result<i32> {
    let b = build_model(cfg)?;
    let stability = stability_report(&b.coupling, b.bath.kappa);
    let chiral = chiral_residuals(&b.coupling);
    let doc = ModelDocument {
        format_version: MODEL_FORMAT_VERSION,
        sites: b.coupling.n_sites(),
        bath: BathDoc::from_bath(&b.bath),
        coupling: ComplexMatrixDoc::from_matrix(b.coupling.matrix()),
        chain: b.chain.clone(),
        adjacency: b.adjacency.as_ref().map(RealMatrixDoc::from_matrix),
        target_covariance: b.target.as_ref().map(|t| RealMatrixDoc::from_matrix(t.matrix())),
        stability: Some(stability.clone()),
        chiral: Some(chiral),
    };
    let dir = opts.out_dir(Some(cfg));
    io::write_text(&dir.join("model.json"), &io::to_json(&doc)?)?;
    if let Some(t) = &b.target_transform {
        io::write_text(&dir.join("target_transform.json"), &io::to_json(&TransformDoc::from_transform(t))?)?;
    }
    println!("sites: {}", doc.sites);
    println!("dark_mode_free: {}", stability.dark_mode_free);
    println!("min_overlap: {:e}", stability.min_overlap);
    println!("min_real_part: {:e}", stability.min_real_part);
    if !stability.dark_mode_free {
        eprintln!(
            "dark mode: a normal mode has overlap {:.3e} with the auxiliary site; the steady state is not unique",
            stability.min_overlap
        );
        return Ok(EXIT_INSTABILITY);
    }
    Ok(EXIT_OK)
}

pub fn cmd_steady(cfg: &ExperimentConfig, opts: &Options, gamma: f64) -> Result<i32> {
    let b = build_model(cfg)?;
    let sol = steady_state_with_residual(&assemble(&b.coupling, &b.bath, gamma)?)?;
    let dir = opts.out_dir(Some(cfg));
    io::write_text(&dir.join("covariance.txt"), &io::matrix_table(sol.state.matrix()))?;

    let mut rows = vec![vec!["purity".to_string(), String::new(), num(purity(&sol.state)?)]];
    let p = purity(&sol.state)?;
    println!("purity: {p:.12}");
    if let Some(t) = &b.target {
        let f = overlap(&sol.state, t)?;
        println!("fidelity: {f:.12}");
        rows.push(vec!["fidelity".into(), String::new(), num(f)]);
    }
    if let Some(a) = &b.adjacency {
        let modes: Vec<usize> = (1..b.coupling.n_sites()).collect();
        let v = nullifier_variances(&sol.state.reduce(&modes)?, a)?;
        for (j, (x, y)) in v.x.iter().zip(&v.y).enumerate() {
            rows.push(vec!["var_x".into(), j.to_string(), num(*x)]);
            rows.push(vec!["var_y".into(), j.to_string(), num(*y)]);
        }
        let max_x = v.x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!("max_var_x: {max_x:.12}");
    }
    if opts.residual {
        println!("lyapunov_residual: {:e}", sol.residual);
        rows.push(vec!["lyapunov_residual".into(), String::new(), num(sol.residual)]);
    }
    let audit = Audit::new("steady", None, opts.timestamp).with("gamma", num(gamma));
    table::write(
        &dir.join("steady.csv"),
        &audit,
        &["metric".into(), "index".into(), "value".into()],
        &rows,
    )?;
    Ok(EXIT_OK)
}

pub fn cmd_sweep(cfg: &ExperimentConfig, opts: &Options) -> Result<i32> {
    let b = build_model(cfg)?;
    let target = b.target.clone().ok_or_else(|| Error::Parse {
        context: "model".into(),
        message: "a sweep needs a model with a target state".into(),
    })?;
    let seed = opts.seed.unwrap_or(cfg.seed);
    let m = b.coupling.n_sites();
    let gammas = cfg.sweep.gammas(m, b.bath.kappa)?;
    let model = SweepModel {
        coupling: b.coupling.clone(),
        bath: b.bath,
        target,
        adjacency: b.adjacency.clone(),
    };
    let series = cfg.sweep.series();
    let recs = gamma_sweep(&model, &gammas, &series, cfg.sweep.realizations, seed)?;

    let n_graph = b.adjacency.as_ref().map_or(0, |a| a.nrows());
    let mut columns: Vec<String> = [
        "gamma", "gamma_scaled", "series", "realization", "seed", "status", "fidelity", "purity",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    columns.extend((0..n_graph).map(|j| format!("var_x_{j}")));
    columns.extend((0..n_graph).map(|j| format!("var_y_{j}")));
    let rows: Vec<Vec<String>> = recs
        .iter()
        .map(|r| {
            let mut row = vec![
                num(r.gamma),
                num(r.gamma_scaled),
                r.series.clone(),
                r.realization.to_string(),
                r.seed.to_string(),
                format!("{:?}", r.status).to_lowercase(),
                num(r.fidelity),
                num(r.purity),
            ];
            let pad = |v: &Vec<f64>| (0..n_graph).map(|j| v.get(j).map_or(String::new(), |x| num(*x))).collect::<Vec<_>>();
            row.extend(pad(&r.var_x));
            row.extend(pad(&r.var_y));
            row
        })
        .collect();
    let mut audit = Audit::new("sweep", Some(seed), opts.timestamp)
        .with("sites", m)
        .with("realizations", cfg.sweep.realizations);
    for s in &series {
        audit = audit.with("perturbation", format!("{} epsilon={}", s.kind.name(), num(s.epsilon)));
    }
    let dir = opts.out_dir(Some(cfg));
    table::write(&dir.join("sweep.csv"), &audit, &columns, &rows)?;
    let failed = recs.iter().filter(|r| r.status != CaseStatus::Ok).count();
    println!("records: {}", recs.len());
    println!("unstable_or_failed: {failed}");
    Ok(EXIT_OK)
}

pub fn cmd_optimize(cfg: &ExperimentConfig, opts: &Options) -> Result<i32> {
    let oc = cfg.optimize.clone().ok_or_else(|| Error::Parse {
        context: "optimize".into(),
        message: "missing [optimize] section".into(),
    })?;
    if oc.sites < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 sites, got {}", oc.sites)));
    }
    let init = vec![oc.mean_coupling; oc.sites - 1];
    let ec = EqualizeConfig {
        restarts: oc.restarts,
        ..EqualizeConfig::default()
    };
    let r = equalize_overlaps(oc.sites, &init, &ec)?;
    let rows: Vec<Vec<String>> = (0..oc.sites)
        .map(|j| {
            vec![
                j.to_string(),
                r.couplings.get(j).map_or(String::new(), |c| num(*c)),
                num(r.overlaps[j]),
            ]
        })
        .collect();
    let audit = Audit::new("optimize", None, opts.timestamp)
        .with("sites", oc.sites)
        .with("mean_coupling", num(oc.mean_coupling))
        .with("min_overlap", num(r.min_overlap))
        .with("target_overlap", num(r.target))
        .with("converged", r.converged);
    let dir = opts.out_dir(Some(cfg));
    table::write(
        &dir.join("optimize.csv"),
        &audit,
        &["index".into(), "coupling".into(), "overlap".into()],
        &rows,
    )?;
    println!("min_overlap: {:.12}", r.min_overlap);
    println!("target: {:.12}", r.target);
    println!("converged: {}", r.converged);
    if !r.converged {
        eprintln!("optimizer stopped after {} restarts without reaching the target", r.restarts_used);
        return Ok(EXIT_NONCONVERGENCE);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct DecomposeReport {
    n_modes: usize,
    squeezing: Vec<f64>,
    phases: Vec<f64>,
    v: ComplexMatrixDoc,
    w: ComplexMatrixDoc,
    reassembly_residual: f64,
    equal_squeezing: bool,
    singular_value_spread: f64,
}

pub fn cmd_decompose(matrix: &Path, opts: &Options) -> Result<i32> {
    let doc: TransformDoc = io::load_json(matrix)?;
    let b = doc.to_transform()?;
    let f = bloch_messiah(&b, 1e-9 * fro(b.x()).max(1.0))?;
    let re = f.reassemble();
    let residual = fro(&(re.x() - b.x())) + fro(&(re.y() - b.y()));
    let prep = sqbath::cluster::is_preparable(&b, 1e-9);
    let report = DecomposeReport {
        n_modes: b.n_modes(),
        squeezing: f.dz.clone(),
        phases: f.phi.clone(),
        v: ComplexMatrixDoc::from_matrix(&f.v),
        w: ComplexMatrixDoc::from_matrix(&f.w),
        reassembly_residual: residual,
        equal_squeezing: prep.preparable,
        singular_value_spread: prep.spread,
    };
    let dir = opts.out.clone().unwrap_or_else(|| PathBuf::from("."));
    io::write_text(&dir.join("decompose.json"), &io::to_json(&report)?)?;
    let shown: Vec<String> = f.dz.iter().map(|z| format!("{z:.10}")).collect();
    println!("squeezing: {}", shown.join(" "));
    println!("equal_squeezing: {}", prep.preparable);
    println!("reassembly_residual: {residual:e}");
    Ok(EXIT_OK)
}
