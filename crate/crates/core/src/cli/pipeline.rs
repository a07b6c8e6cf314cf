use std::path::PathBuf;

use serde::Serialize;

use crate::complex::{cech_complex, delaunay_cech_complex, rips_complex, Chain, SimplicialComplex};
use crate::delloc::{check_faithfulness, delloc_complex, encode_chain, encode_chain_coherent, DellocComplex, FaithfulnessReport};
use crate::geom::PointCloud;
use crate::manifold::{pca_tangent, sample, verify_density, AnalyticManifold, ManifoldKind, SampleSpec};
use crate::optimize::lp::LpLimits;
use crate::optimize::{
    assemble_problem, extract_solution, solve_lp, AssembleOptions, LpProblem, Normalization, ProblemSummary,
    ReconstructionResult, WeightTable,
};
use crate::perturb::{moser_tardos, scaled_thresholds, PerturbConfig, PerturbOutcome, PerturbStatus, Schedule};
use crate::quality::{quality_report, QualityParams, QualityReport};
use crate::{ReconError, Result};

use super::io::ingest;

/// Largest boundary and load residuals of an accepted solution.
pub const RESIDUAL_LIMIT: f64 = 1e-7;

#[derive(Clone, Debug)]
pub enum Source {
    File(PathBuf),
    Cloud(PointCloud),
    Generate { kind: ManifoldKind, count: Option<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexKind {
    Rips,
    Cech,
    DelaunayCech,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// Load measured on the analytic manifold at the projection of a sample.
    Analytic,
    /// Load measured on a PCA tangent flat through a sample, over `K[p0, 4 rho_n]`.
    Realistic,
}

#[derive(Clone, Debug)]
pub struct PerturbSettings {
    pub r_pert: Option<f64>,
    pub height_min: Option<f64>,
    pub prot_min: Option<f64>,
    /// Constants of the `c (rho / reach)^(1/3) rho` thresholds.
    pub c_height: f64,
    pub c_prot: f64,
    pub max_rounds: usize,
    pub schedule: Schedule,
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub source: Source,
    pub d: Option<usize>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub rho: Option<f64>,
    pub rho_mult: f64,
    pub complex: ComplexKind,
    pub scale_r: Option<f64>,
    pub normalization: Option<NormalizationMode>,
    pub norm_rho: Option<f64>,
    pub perturb: Option<PerturbSettings>,
    pub seed: u64,
    pub budget: f64,
    pub probes: usize,
}

impl PipelineConfig {
    pub fn new(source: Source) -> Self {
        Self {
            source,
            d: None,
            epsilon: None,
            delta: None,
            rho: None,
            rho_mult: 16.0,
            complex: ComplexKind::Rips,
            scale_r: None,
            normalization: None,
            norm_rho: None,
            perturb: None,
            seed: 0,
            budget: 2e6,
            probes: 4,
        }
    }
}

/// A cloud with its scales, after generation or ingestion and optional
/// perturbation.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub cloud: PointCloud,
    pub manifold: Option<AnalyticManifold>,
    pub d: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub rho: f64,
    pub perturb: Option<PerturbSummary>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbSummary {
    pub status: PerturbStatus,
    pub rounds: usize,
    pub remaining_events: usize,
    pub r_pert: f64,
    pub height_min: f64,
    pub prot_min: f64,
}

/// Perturbation parameters; missing thresholds follow `c (rho / reach)^(1/3) rho`
/// and the radius defaults to `epsilon / 20`.
pub fn perturb_config(
    p: &PerturbSettings,
    d: usize,
    rho: f64,
    epsilon: f64,
    reach: Option<f64>,
    seed: u64,
) -> Result<PerturbConfig> {
    let auto = reach.map(|r| scaled_thresholds(p.c_height, p.c_prot, rho, r));
    let missing = || ReconError::InvalidInput("give --height-min and --prot-min for clouds without a known reach".into());
    Ok(PerturbConfig {
        d,
        rho,
        r_pert: p.r_pert.unwrap_or(epsilon / 20.0),
        height_min: p.height_min.or(auto.map(|x| x.0)).ok_or_else(missing)?,
        prot_min: p.prot_min.or(auto.map(|x| x.1)).ok_or_else(missing)?,
        max_rounds: p.max_rounds,
        seed,
        schedule: p.schedule,
    })
}

type Scaled = (PointCloud, Option<AnalyticManifold>, usize, f64, f64);

fn given_cloud(cloud: PointCloud, config: &PipelineConfig) -> Result<Scaled> {
    let d = config.d.ok_or_else(|| ReconError::InvalidInput("the intrinsic dimension is required for sample input".into()))?;
    let eps = config.epsilon.ok_or_else(|| ReconError::InvalidInput("epsilon is required for sample input".into()))?;
    Ok((cloud, None, d, eps, config.delta.unwrap_or(0.0)))
}

pub fn prepare(config: &PipelineConfig) -> Result<Prepared> {
    let mut warnings = Vec::new();
    let (cloud, manifold, d, mut epsilon, mut delta) = match &config.source {
        Source::File(path) => given_cloud(ingest(path)?, config)?,
        Source::Cloud(c) => given_cloud(c.clone(), config)?,
        Source::Generate { kind, count } => {
            let m = AnalyticManifold::new(kind.clone())?;
            let delta = config.delta.unwrap_or(1e-4 * m.reach());
            let cloud = match (count, config.epsilon) {
                (Some(n), eps) => sample(&m, &SampleSpec::new(eps.unwrap_or(f64::MAX), delta, config.seed).with_count(*n))?,
                (None, Some(eps)) => sample(&m, &SampleSpec::new(eps, delta, config.seed))?,
                (None, None) => return Err(ReconError::InvalidInput("give --n or --epsilon to generate a sample".into())),
            };
            let eps = config.epsilon.unwrap_or_else(|| verify_density(&m, &cloud).upper);
            let d = m.intrinsic_dim();
            if config.d.is_some_and(|x| x != d) {
                warnings.push(format!("--d ignored: the generated manifold has dimension {d}"));
            }
            (cloud, Some(m), d, eps, delta)
        }
    };
    let rho = config.rho.unwrap_or(config.rho_mult * epsilon);
    let mut perturb = None;
    let mut cloud = cloud;
    if let Some(p) = &config.perturb {
        let reach = manifold.as_ref().map(AnalyticManifold::reach);
        let cfg = perturb_config(p, d, rho, epsilon, reach, config.seed)?;
        let out: PerturbOutcome = moser_tardos(&cloud, &cfg)?;
        if out.status == PerturbStatus::TimedOut {
            warnings.push(format!("perturbation stopped after {} rounds with {} bad events", out.rounds, out.remaining.len()));
        }
        perturb = Some(PerturbSummary {
            status: out.status,
            rounds: out.rounds,
            remaining_events: out.remaining.len(),
            r_pert: cfg.r_pert,
            height_min: cfg.height_min,
            prot_min: cfg.prot_min,
        });
        cloud = out.cloud;
        match &manifold {
            Some(m) => {
                epsilon = epsilon.max(verify_density(m, &cloud).upper);
                delta = cloud.points().map(|x| m.distance(x)).fold(delta, f64::max);
            }
            None => {
                epsilon += cfg.r_pert;
                delta += cfg.r_pert;
            }
        }
    }
    if let Some(m) = &manifold {
        if rho > 0.25 * m.reach() {
            warnings.push(format!(
                "rho = {rho} exceeds a quarter of the reach {}; the Delloc complex may lose simplices",
                m.reach()
            ));
        }
    }
    if 16.0 * epsilon > rho {
        warnings.push(format!("rho = {rho} is below 16 epsilon = {}", 16.0 * epsilon));
    }
    Ok(Prepared { cloud, manifold, d, epsilon, delta, rho, perturb, warnings })
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolvedConfig {
    pub points: usize,
    pub ambient_dim: usize,
    pub d: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub rho: f64,
    pub complex: ComplexKind,
    pub scale_r: f64,
    pub normalization: NormalizationMode,
    pub norm_rho: f64,
    pub seed: u64,
    pub manifold: Option<AnalyticManifold>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DellocSummary {
    pub simplices: usize,
    pub max_circumradius: f64,
    pub gabriel_checked: usize,
    pub gabriel_failures: usize,
    pub coherent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionReport {
    pub ok: bool,
    pub config: ResolvedConfig,
    pub problem: ProblemSummary,
    pub result: ReconstructionResult,
    pub support_size: usize,
    pub euler_characteristic: i64,
    pub delloc: DellocSummary,
    pub perturb: Option<PerturbSummary>,
    pub quality: Option<QualityReport>,
    pub warnings: Vec<String>,
}

/// Everything produced by one reconstruction run.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub report: ReconstructionReport,
    pub cloud: PointCloud,
    pub complex: SimplicialComplex,
    pub problem: LpProblem,
    pub delloc: DellocComplex,
    pub delloc_chain: Chain,
}

pub fn build_complex(cloud: &PointCloud, kind: ComplexKind, r: f64, d: usize) -> Result<SimplicialComplex> {
    Ok(match kind {
        ComplexKind::Rips => rips_complex(cloud, r, d),
        ComplexKind::Cech => cech_complex(cloud, r, d),
        ComplexKind::DelaunayCech => delaunay_cech_complex(cloud, r, d)?,
    })
}

/// The Delloc complex at scale `rho` among the Čech simplices at `epsilon`,
/// with its chain oriented by the manifold when known.
pub fn delloc_with_chain(
    prep: &Prepared,
    warnings: &mut Vec<String>,
) -> Result<(DellocComplex, Chain, bool)> {
    let candidates = cech_complex(&prep.cloud, prep.epsilon, prep.d);
    let dc = delloc_complex(&prep.cloud, prep.rho, prep.d, &candidates)?;
    let (coherent_chain, coherent) = encode_chain_coherent(dc.simplices());
    let chain = match &prep.manifold {
        Some(m) => match encode_chain(dc.simplices(), &prep.cloud, m) {
            Ok(c) => c,
            Err(e) => {
                warnings.push(format!("delloc orientation from the manifold failed ({e}); using coherent orientation"));
                coherent_chain
            }
        },
        None => coherent_chain,
    };
    Ok((dc, chain, coherent))
}

pub fn reconstruct(config: &PipelineConfig) -> Result<Reconstruction> {
    let prep = prepare(config)?;
    reconstruct_prepared(config, prep)
}

pub fn reconstruct_prepared(config: &PipelineConfig, prep: Prepared) -> Result<Reconstruction> {
    let mut warnings = prep.warnings.clone();
    let (d, eps, rho) = (prep.d, prep.epsilon, prep.rho);
    let cloud = &prep.cloud;
    let scale_r = config.scale_r.unwrap_or(eps);
    if config.complex == ComplexKind::Rips && !(eps..=rho / std::f64::consts::SQRT_2).contains(&scale_r) {
        warnings.push(format!("Rips scale {scale_r} is outside [epsilon, rho / sqrt 2]"));
    }
    let k = build_complex(cloud, config.complex, scale_r, d)?;
    let weights = WeightTable::compute(&k, cloud, d);

    let mode = config.normalization.unwrap_or(if prep.manifold.is_some() {
        NormalizationMode::Analytic
    } else {
        NormalizationMode::Realistic
    });
    let norm_rho = config.norm_rho.unwrap_or(3.0 * eps);
    let normalization = match (mode, &prep.manifold) {
        (NormalizationMode::Analytic, Some(m)) => {
            Normalization::Manifold { manifold: m.clone(), m0: m.project(cloud.point(0)) }
        }
        (NormalizationMode::Analytic, None) => {
            return Err(ReconError::InvalidInput("analytic normalization needs a generated manifold".into()))
        }
        (NormalizationMode::Realistic, _) => Normalization::Flat {
            x: cloud.point(0).to_vec(),
            flat: pca_tangent(cloud, 0, norm_rho, d)?,
            radius: 4.0 * norm_rho,
        },
    };
    let options = AssembleOptions { jitter: 0.01 * norm_rho, seed: config.seed, ..AssembleOptions::default() };
    let problem = assemble_problem(&k, cloud, d, &weights, &normalization, &options)?;
    let solution = solve_lp(&problem, &LpLimits::default())?;

    let (dc, delloc_chain, coherent) = delloc_with_chain(&prep, &mut warnings)?;
    let result = extract_solution(&solution, &problem, &weights, Some(&delloc_chain));
    let support = result.support();
    let euler = SimplicialComplex::from_simplices(cloud.len(), support.iter().cloned()).euler_characteristic();

    let quality = match quality_report(
        cloud,
        &QualityParams {
            epsilon: eps,
            delta: prep.delta,
            rho,
            d,
            manifold: prep.manifold.as_ref(),
            reach: None,
            pca_rho: norm_rho,
            probes: config.probes,
            budget: config.budget,
        },
    ) {
        Ok(q) => Some(q),
        Err(e) => {
            warnings.push(format!("quality report unavailable: {e}"));
            None
        }
    };

    let ok = result.status == crate::optimize::lp::LpStatus::Optimal
        && result.boundary_residual <= RESIDUAL_LIMIT
        && result.load_residual <= RESIDUAL_LIMIT;
    let gabriel: Vec<bool> = dc.records.iter().filter_map(|r| r.gabriel).collect();
    let report = ReconstructionReport {
        ok,
        config: ResolvedConfig {
            points: cloud.len(),
            ambient_dim: cloud.dim(),
            d,
            epsilon: eps,
            delta: prep.delta,
            rho,
            complex: config.complex,
            scale_r,
            normalization: mode,
            norm_rho,
            seed: config.seed,
            manifold: prep.manifold.clone(),
        },
        problem: problem.summary(),
        support_size: support.len(),
        euler_characteristic: euler,
        delloc: DellocSummary {
            simplices: dc.simplices().len(),
            max_circumradius: dc.max_circumradius(),
            gabriel_checked: gabriel.len(),
            gabriel_failures: gabriel.iter().filter(|g| !**g).count(),
            coherent,
        },
        perturb: prep.perturb.clone(),
        quality,
        warnings,
        result,
    };
    Ok(Reconstruction { report, cloud: prep.cloud, complex: k, problem, delloc: dc, delloc_chain })
}

#[derive(Clone, Debug, Serialize)]
pub struct DellocReport {
    pub rho: f64,
    pub epsilon: f64,
    pub summary: DellocSummary,
    pub euler_characteristic: i64,
    pub faithfulness: Option<FaithfulnessReport>,
    pub warnings: Vec<String>,
}

/// The Delloc complex of a prepared cloud with, for generated clouds, its
/// faithfulness diagnostics in a tube of radius `epsilon`.
pub fn delloc_report(prep: &Prepared, probes: usize) -> Result<(DellocReport, Chain)> {
    let mut warnings = prep.warnings.clone();
    let (dc, chain, coherent) = delloc_with_chain(prep, &mut warnings)?;
    let faithfulness = match &prep.manifold {
        Some(m) => Some(check_faithfulness(dc.simplices(), &prep.cloud, m, prep.epsilon.min(0.99 * m.reach()), probes)?),
        None => None,
    };
    let gabriel: Vec<bool> = dc.records.iter().filter_map(|r| r.gabriel).collect();
    let report = DellocReport {
        rho: prep.rho,
        epsilon: prep.epsilon,
        summary: DellocSummary {
            simplices: dc.simplices().len(),
            max_circumradius: dc.max_circumradius(),
            gabriel_checked: gabriel.len(),
            gabriel_failures: gabriel.iter().filter(|g| !**g).count(),
            coherent,
        },
        euler_characteristic: dc.complex.euler_characteristic(),
        faithfulness,
        warnings,
    };
    Ok((report, chain))
}
