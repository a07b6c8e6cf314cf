//! Command-line front end: `recon reconstruct|quality|perturb|delloc`.
//!
//! Without a subcommand the arguments are those of `reconstruct`. Exit code
//! 0 means success, 1 a completed run whose solution failed its checks, and
//! 2 an error, reported as JSON on stderr.

mod io;
mod pipeline;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

pub use io::{cloud_csv, cloud_json, export_mesh, ingest, parse_cloud, write_atomic, MeshFormat};
pub use pipeline::{
    build_complex, delloc_report, delloc_with_chain, perturb_config, prepare, reconstruct, reconstruct_prepared, ComplexKind, DellocReport, DellocSummary,
    NormalizationMode, PerturbSettings, PerturbSummary, PipelineConfig, Prepared, Reconstruction,
    ReconstructionReport, ResolvedConfig, Source, RESIDUAL_LIMIT,
};

use crate::manifold::ManifoldKind;
use crate::perturb::{moser_tardos, PerturbStatus, Schedule};
use crate::quality::{quality_report, QualityParams};
use crate::{fmt::to_json, ReconError, Result};

#[derive(Parser, Debug)]
#[command(name = "recon", version, about = "Manifold reconstruction by Delaunay-energy minimization")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    reconstruct: ReconstructArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the chain problem and compare with the Delloc complex.
    Reconstruct(ReconstructArgs),
    /// Sampling and geometric quality metrics with the theorem conditions.
    Quality(QualityArgs),
    /// Moser-Tardos perturbation of a cloud.
    Perturb(PerturbArgs),
    /// The Delloc complex and its faithfulness diagnostics.
    Delloc(DellocArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Generator {
    Circle,
    Sphere,
    Torus,
    Disk,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ComplexArg {
    Rips,
    Cech,
    DelaunayCech,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormalizationArg {
    Analytic,
    Realistic,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Point cloud file (CSV, or JSON `{"dim": N, "points": [...]}`).
    #[arg(long, conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// Sample an analytic manifold instead of reading a file.
    #[arg(long, value_enum)]
    generate: Option<Generator>,
    /// Number of generated points.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 2.0)]
    major: f64,
    #[arg(long, default_value_t = 1.0)]
    minor: f64,
    /// Ambient dimension of a generated disk.
    #[arg(long, default_value_t = 3)]
    ambient: usize,
    /// Intrinsic dimension (required for file input and the disk).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// `rho = rho_mult * epsilon` when `--rho` is not given.
    #[arg(long, default_value_t = 16.0)]
    rho_mult: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run the Moser-Tardos perturbation before anything else.
    #[arg(long)]
    perturb: bool,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Worker threads.
    #[arg(long, env = "RECON_THREADS")]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    #[arg(long)]
    r_pert: Option<f64>,
    #[arg(long)]
    height_min: Option<f64>,
    #[arg(long)]
    prot_min: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    c_height: f64,
    #[arg(long, default_value_t = 0.05)]
    c_prot: f64,
    #[arg(long, default_value_t = 1000)]
    max_rounds: usize,
    /// worst or fifo.
    #[arg(long, default_value_t = Schedule::Worst)]
    schedule: Schedule,
}

#[derive(Args, Debug)]
struct MetricArgs {
    /// Scale of PCA tangent estimates (default 3 epsilon).
    #[arg(long)]
    norm_rho: Option<f64>,
    /// Largest candidate-simplex count enumerated per metric.
    #[arg(long, default_value_t = 2e6)]
    budget: f64,
    /// Interior probes per simplex.
    #[arg(long, default_value_t = 4)]
    probes: usize,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    metrics: MetricArgs,
    #[arg(long, value_enum, default_value = "rips")]
    complex: ComplexArg,
    /// Scale of the complex (default epsilon).
    #[arg(long)]
    scale_r: Option<f64>,
    #[arg(long, value_enum)]
    normalization: Option<NormalizationArg>,
    #[arg(long, default_value = "recon-out")]
    out_dir: PathBuf,
    /// off or obj (default: off for surfaces, obj for curves).
    #[arg(long)]
    format: Option<MeshFormat>,
}

#[derive(Args, Debug)]
struct QualityArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    metrics: MetricArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PerturbArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Perturbed cloud; `.csv` for CSV, anything else for JSON.
    #[arg(long)]
    out: PathBuf,
    /// JSON-lines trace of the rounds.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DellocArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Manifold probes for the coverage check.
    #[arg(long, default_value_t = 20_000)]
    probes: usize,
    #[arg(long, default_value = "recon-out")]
    out_dir: PathBuf,
    #[arg(long)]
    format: Option<MeshFormat>,
}

/// Entry point of the binary.
pub fn main_from_env() -> i32 {
    run(std::env::args_os())
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprint!("{}", error_json(&e));
            2
        }
    }
}

/// Structured error report: kind, message and, for parse errors, the line.
pub fn error_json(e: &ReconError) -> String {
    let mut v = json!({ "error": e.kind(), "message": e.to_string() });
    if let ReconError::Parse { line, .. } = e {
        v["line"] = json!(line);
    }
    to_json(&v)
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        None => run_reconstruct(cli.reconstruct),
        Some(Command::Reconstruct(a)) => run_reconstruct(a),
        Some(Command::Quality(a)) => run_quality(a),
        Some(Command::Perturb(a)) => run_perturb(a),
        Some(Command::Delloc(a)) => run_delloc(a),
    }
}

fn set_threads(n: Option<usize>) {
    if let Some(n) = n.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn pipeline_config(input: &InputArgs, perturb: bool) -> Result<PipelineConfig> {
    set_threads(input.threads);
    let source = match (&input.input, input.generate) {
        (Some(path), None) => Source::File(path.clone()),
        (None, Some(g)) => {
            let kind = match g {
                Generator::Circle => ManifoldKind::Circle { radius: input.radius },
                Generator::Sphere => ManifoldKind::Sphere { radius: input.radius },
                Generator::Torus => ManifoldKind::Torus { major: input.major, minor: input.minor },
                Generator::Disk => {
                    ManifoldKind::FlatDisk { d: input.d.unwrap_or(2), n: input.ambient, radius: input.radius }
                }
            };
            Source::Generate { kind, count: input.n }
        }
        _ => return Err(ReconError::InvalidInput("give exactly one of --input and --generate".into())),
    };
    let mut cfg = PipelineConfig::new(source);
    cfg.d = input.d;
    cfg.epsilon = input.epsilon;
    cfg.delta = input.delta;
    cfg.rho = input.rho;
    cfg.rho_mult = input.rho_mult;
    cfg.seed = input.seed;
    if perturb || input.perturb {
        let t = &input.thresholds;
        cfg.perturb = Some(PerturbSettings {
            r_pert: t.r_pert,
            height_min: t.height_min,
            prot_min: t.prot_min,
            c_height: t.c_height,
            c_prot: t.c_prot,
            max_rounds: t.max_rounds,
            schedule: t.schedule,
        });
    }
    Ok(cfg)
}

fn mesh_file(dir: &Path, d: usize, format: Option<MeshFormat>) -> (PathBuf, MeshFormat) {
    let f = format.unwrap_or(if d == 2 { MeshFormat::Off } else { MeshFormat::Obj });
    let name = if f == MeshFormat::Off { "mesh.off" } else { "mesh.obj" };
    (dir.join(name), f)
}

fn run_reconstruct(a: ReconstructArgs) -> Result<i32> {
    let mut cfg = pipeline_config(&a.input, false)?;
    cfg.complex = match a.complex {
        ComplexArg::Rips => ComplexKind::Rips,
        ComplexArg::Cech => ComplexKind::Cech,
        ComplexArg::DelaunayCech => ComplexKind::DelaunayCech,
    };
    cfg.scale_r = a.scale_r;
    cfg.normalization = a.normalization.map(|n| match n {
        NormalizationArg::Analytic => NormalizationMode::Analytic,
        NormalizationArg::Realistic => NormalizationMode::Realistic,
    });
    cfg.norm_rho = a.metrics.norm_rho;
    cfg.budget = a.metrics.budget;
    cfg.probes = a.metrics.probes;
    let mut rec = reconstruct(&cfg)?;
    let (mesh_path, format) = mesh_file(&a.out_dir, rec.report.config.d, a.format);
    match export_mesh(&rec.report.result.rounded_chain, &rec.cloud, format) {
        Ok(mesh) => write_atomic(&mesh_path, &mesh)?,
        Err(e) => rec.report.warnings.push(format!("no mesh written: {e}")),
    }
    if let Some(q) = &rec.report.quality {
        write_atomic(&a.out_dir.join("quality.json"), &to_json(q))?;
    }
    write_atomic(&a.out_dir.join("result.json"), &to_json(&rec.report))?;
    write_atomic(&a.out_dir.join("cloud.json"), &cloud_json(&rec.cloud))?;
    let r = &rec.report;
    print!(
        "{}",
        to_json(&json!({
            "ok": r.ok,
            "status": r.result.status,
            "support_size": r.support_size,
            "euler_characteristic": r.euler_characteristic,
            "matches_delloc": r.result.matches_delloc,
            "out_dir": a.out_dir.display().to_string(),
        }))
    );
    Ok(if r.ok { 0 } else { 1 })
}

fn run_quality(a: QualityArgs) -> Result<i32> {
    let cfg = pipeline_config(&a.input, false)?;
    let prep = prepare(&cfg)?;
    let report = quality_report(
        &prep.cloud,
        &QualityParams {
            epsilon: prep.epsilon,
            delta: prep.delta,
            rho: prep.rho,
            d: prep.d,
            manifold: prep.manifold.as_ref(),
            reach: None,
            pca_rho: a.metrics.norm_rho.unwrap_or(3.0 * prep.epsilon),
            probes: a.metrics.probes,
            budget: a.metrics.budget,
        },
    )?;
    let text = to_json(&report);
    match &a.out {
        Some(p) => write_atomic(p, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn run_perturb(a: PerturbArgs) -> Result<i32> {
    let mut cfg = pipeline_config(&a.input, true)?;
    let settings = cfg.perturb.take().expect("perturbation requested");
    let prep = prepare(&cfg)?;
    let reach = prep.manifold.as_ref().map(|m| m.reach());
    let pc = perturb_config(&settings, prep.d, prep.rho, prep.epsilon, reach, cfg.seed)?;
    let out = moser_tardos(&prep.cloud, &pc)?;
    let text = if a.out.extension().is_some_and(|e| e == "csv") { cloud_csv(&out.cloud) } else { cloud_json(&out.cloud) };
    write_atomic(&a.out, &text)?;
    if let Some(t) = &a.trace {
        write_atomic(t, &out.trace_jsonl())?;
    }
    print!(
        "{}",
        to_json(&json!({ "status": out.status, "rounds": out.rounds, "remaining_events": out.remaining.len() }))
    );
    Ok(match out.status {
        PerturbStatus::Converged => 0,
        PerturbStatus::TimedOut => 1,
    })
}

fn run_delloc(a: DellocArgs) -> Result<i32> {
    let cfg = pipeline_config(&a.input, false)?;
    let prep = prepare(&cfg)?;
    let (mut report, chain) = delloc_report(&prep, a.probes)?;
    let (mesh_path, format) = mesh_file(&a.out_dir, prep.d, a.format);
    match export_mesh(&chain, &prep.cloud, format) {
        Ok(mesh) => write_atomic(&mesh_path, &mesh)?,
        Err(e) => report.warnings.push(format!("no mesh written: {e}")),
    }
    let text = to_json(&report);
    write_atomic(&a.out_dir.join("delloc.json"), &text)?;
    print!("{text}");
    Ok(if report.faithfulness.as_ref().is_none_or(|f| f.faithful) { 0 } else { 1 })
}
