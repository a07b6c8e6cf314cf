//! Sampling-quality metrics and the safety predicates of the reconstruction theorem.

mod metrics;
mod safety;

use serde::Serialize;

pub use metrics::{
    ball_neighbors, candidate_bound, height_at_scale, max_angular_deviation, protection_at_scale,
    rho_small_simplices, separation, simplex_protection, Protection, TangentSource,
};
pub(crate) use metrics::projected_power_gap;
pub use safety::{
    check_extra_condition, check_safety, compute_j, omega_closed_form, omega_monte_carlo, omega_standard_simplex,
    ExtraCheck, SafetyCheck, SafetyInputs,
};

use crate::geom::PointCloud;
use crate::manifold::AnalyticManifold;
use crate::{ReconError, Result};

/// Inputs of [`quality_report`].
#[derive(Clone, Debug)]
pub struct QualityParams<'a> {
    pub epsilon: f64,
    pub delta: f64,
    pub rho: f64,
    pub d: usize,
    pub manifold: Option<&'a AnalyticManifold>,
    /// Reach used when no manifold is given.
    pub reach: Option<f64>,
    /// Scale of the PCA tangent estimates used without a manifold.
    pub pca_rho: f64,
    /// Random interior probes per simplex for the angular deviation.
    pub probes: usize,
    /// Largest number of candidate simplices enumerated for one metric.
    pub budget: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct QualityReport {
    pub sep: f64,
    pub height_min: Option<f64>,
    pub theta: Option<f64>,
    /// `analytic` or `pca`.
    pub theta_mode: &'static str,
    pub protection: Option<f64>,
    pub protection_signed: Option<f64>,
    pub epsilon: f64,
    pub delta: f64,
    pub rho: f64,
    pub reach: Option<f64>,
    pub theta_budget: Option<f64>,
    pub safety_ok: bool,
    pub extra_ok: bool,
    #[serde(rename = "J")]
    pub j: Option<f64>,
    pub omega_delta_d: f64,
    pub safety: Option<SafetyCheck>,
    pub extra: Option<ExtraCheck>,
    pub rho_small_simplices: Option<usize>,
    pub protection_simplices: Option<usize>,
    /// Metrics not computed, with the reason.
    pub skipped: Vec<String>,
}

/// Computes every metric and both theorem conditions. Metrics whose candidate
/// set would exceed the budget are skipped and reported as missing.
pub fn quality_report(cloud: &PointCloud, p: &QualityParams<'_>) -> Result<QualityReport> {
    let sep = separation(cloud)?;
    let mut skipped = Vec::new();
    let reach = p.manifold.map(|m| m.reach()).or(p.reach);

    let small = if candidate_bound(cloud, p.rho, p.d) <= p.budget {
        Some(rho_small_simplices(cloud, p.rho, p.d))
    } else {
        skipped.push(format!("height and angular deviation: more than {} candidate simplices at rho", p.budget));
        None
    };
    let height_min = match &small {
        Some(s) if !s.is_empty() => Some(metrics::height_over(cloud, s)?),
        Some(_) => {
            skipped.push("height and angular deviation: no rho-small simplices".into());
            None
        }
        None => None,
    };
    let (source, theta_mode) = match p.manifold {
        Some(m) => (TangentSource::Manifold(m), "analytic"),
        None => (TangentSource::Pca { rho: p.pca_rho }, "pca"),
    };
    let theta = match &small {
        Some(s) if !s.is_empty() => match metrics::deviation_over(cloud, s, source, p.probes) {
            Ok(t) => Some(t),
            Err(ReconError::InsufficientNeighbors { found, needed }) => {
                skipped.push(format!("angular deviation: PCA ball has {found} points, needs {needed}"));
                None
            }
            Err(e) => return Err(e),
        },
        _ => None,
    };

    let rho3 = 3.0 * p.rho;
    let (prot, protection_simplices) = if candidate_bound(cloud, rho3, p.d) <= p.budget {
        let s = rho_small_simplices(cloud, rho3, p.d);
        (Some(metrics::protection_over(cloud, &s, rho3)), Some(s.len()))
    } else {
        skipped.push(format!("protection: more than {} candidate simplices at 3 rho", p.budget));
        (None, None)
    };

    let omega = omega_standard_simplex(p.d);
    let n = cloud.dim();
    let j = match (reach, theta) {
        (Some(r), Some(t)) => compute_j(p.rho, r, t, p.d, n).ok(),
        _ => None,
    };
    let safety = match (reach, theta, prot, height_min) {
        (Some(reach), Some(theta), Some(prot), Some(height)) => Some(check_safety(&SafetyInputs {
            theta,
            sep,
            prot: prot.unsigned,
            height,
            epsilon: p.epsilon,
            delta: p.delta,
            rho: p.rho,
            reach,
            d: p.d,
        })),
        _ => None,
    };
    let extra = match (theta, prot, j) {
        (Some(theta), Some(prot), Some(j)) => {
            Some(check_extra_condition(prot.unsigned, sep, p.rho, theta, p.epsilon, j, omega, p.d))
        }
        _ => None,
    };
    if reach.is_none() {
        skipped.push("safety: reach unknown".into());
    }
    Ok(QualityReport {
        sep,
        height_min,
        theta,
        theta_mode,
        protection: prot.map(|x| x.unsigned),
        protection_signed: prot.map(|x| x.signed),
        epsilon: p.epsilon,
        delta: p.delta,
        rho: p.rho,
        reach,
        theta_budget: safety.and_then(|s| s.theta_budget),
        safety_ok: safety.is_some_and(|s| s.ok),
        extra_ok: extra.is_some_and(|e| e.ok),
        j,
        omega_delta_d: omega,
        safety,
        extra,
        rho_small_simplices: small.as_ref().map(Vec::len),
        protection_simplices,
        skipped,
    })
}
