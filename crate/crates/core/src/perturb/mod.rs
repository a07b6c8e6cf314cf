//! Moser-Tardos resampling: points are redrawn in small disks of their
//! estimated tangent planes until no simplex is too flat and no point comes
//! too close to the circumsphere of a nearby simplex.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::Simplex;
use crate::geom::{circumsphere, dist2, miniball, simplex_height, Flat, KdTree, PointCloud};
use crate::manifold::{pca_tangent, uniform_in_ball};
use crate::quality::{projected_power_gap, rho_small_simplices};
use crate::{tol, ReconError, Result};

/// Order in which bad events are repaired.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// Largest violation first.
    #[default]
    Worst,
    /// Oldest detected event first.
    Fifo,
}

impl FromStr for Schedule {
    type Err = ReconError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "worst" => Ok(Schedule::Worst),
            "fifo" => Ok(Schedule::Fifo),
            other => Err(ReconError::InvalidInput(format!("unknown schedule `{other}` (expected worst or fifo)"))),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schedule::Worst => "worst",
            Schedule::Fifo => "fifo",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbConfig {
    pub d: usize,
    pub rho: f64,
    /// Radius of the tangent disk each point is redrawn in.
    pub r_pert: f64,
    pub height_min: f64,
    pub prot_min: f64,
    pub max_rounds: usize,
    pub seed: u64,
    pub schedule: Schedule,
}

impl PerturbConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [("rho", self.rho), ("height_min", self.height_min), ("prot_min", self.prot_min)];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ReconError::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.r_pert.is_finite() && self.r_pert >= 0.0 && self.r_pert <= self.rho) {
            return Err(ReconError::InvalidInput(format!("r_pert must lie in [0, rho], got {}", self.r_pert)));
        }
        if self.max_rounds == 0 || self.d == 0 {
            return Err(ReconError::InvalidInput("max_rounds and d must be at least 1".into()));
        }
        Ok(())
    }
}

/// Thresholds of the form `c (rho / reach)^(1/3) rho` for height and
/// protection.
pub fn scaled_thresholds(c_height: f64, c_prot: f64, rho: f64, reach: f64) -> (f64, f64) {
    let s = (rho / reach).cbrt() * rho;
    (c_height * s, c_prot * s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Height,
    Protection,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BadEvent {
    pub kind: EventKind,
    pub simplex: Simplex,
    /// The point too close to the circumsphere, for protection events.
    pub witness: Option<usize>,
    /// Height or protection of the offending configuration.
    pub value: f64,
    /// Threshold minus value.
    pub violation: f64,
}

impl BadEvent {
    /// The points resampled to repair the event.
    pub fn correlated(&self) -> Vec<usize> {
        let mut pts = self.simplex.vertices().to_vec();
        pts.extend(self.witness);
        pts.sort_unstable();
        pts
    }

    fn key(&self) -> (EventKind, Simplex, Option<usize>) {
        (self.kind, self.simplex.clone(), self.witness)
    }
}

/// All bad events of `cloud`, largest violation first.
pub fn find_bad_events(cloud: &PointCloud, config: &PerturbConfig) -> Vec<BadEvent> {
    let mut events = events_where(cloud, config, None);
    sort_worst_first(&mut events);
    events
}

fn sort_worst_first(events: &mut [BadEvent]) {
    events.sort_by(|a, b| b.violation.total_cmp(&a.violation).then_with(|| a.key().cmp(&b.key())));
}

/// Events of the `3 rho`-small simplices, restricted to those with a vertex
/// flagged in `seeds` when given.
fn events_where(cloud: &PointCloud, config: &PerturbConfig, seeds: Option<&[bool]>) -> Vec<BadEvent> {
    let rho3 = 3.0 * config.rho;
    let tree = KdTree::new(cloud);
    let simplices = match seeds {
        None => rho_small_simplices(cloud, rho3, config.d),
        Some(flags) => small_simplices_through(cloud, &tree, flags, rho3, config.d),
    };
    simplices.par_iter().flat_map_iter(|s| simplex_events(cloud, &tree, s, config)).collect()
}

/// `rho`-small `d`-simplices with at least one flagged vertex, each produced
/// once from its smallest flagged vertex.
fn small_simplices_through(cloud: &PointCloud, tree: &KdTree, flags: &[bool], rho: f64, d: usize) -> Vec<Simplex> {
    let limit = rho + tol::BALL_SLACK;
    let edge2 = 4.0 * limit * limit * (1.0 + tol::REL);
    let seeds: Vec<usize> = (0..flags.len()).filter(|&v| flags[v]).collect();
    seeds
        .par_iter()
        .flat_map_iter(|&v| {
            let mut nbrs: Vec<usize> =
                tree.within(cloud.point(v), 2.0 * limit).into_iter().filter(|&u| u != v && !(flags[u] && u < v)).collect();
            nbrs.sort_unstable();
            let mut out = Vec::new();
            let mut clique = vec![v];
            grow(cloud, &nbrs, 0, &mut clique, d + 1, edge2, limit, &mut out);
            out
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn grow(
    cloud: &PointCloud,
    nbrs: &[usize],
    from: usize,
    clique: &mut Vec<usize>,
    size: usize,
    edge2: f64,
    limit: f64,
    out: &mut Vec<Simplex>,
) {
    if clique.len() == size {
        let mut verts = clique.clone();
        verts.sort_unstable();
        out.push(Simplex::from_sorted(verts));
        return;
    }
    for (i, &u) in nbrs.iter().enumerate().skip(from) {
        if clique.iter().any(|&w| dist2(cloud.point(w), cloud.point(u)) > edge2) {
            continue;
        }
        clique.push(u);
        if miniball(&cloud.gather(clique)).is_ok_and(|b| b.radius <= limit) {
            grow(cloud, nbrs, i + 1, clique, size, edge2, limit, out);
        }
        clique.pop();
    }
}

fn simplex_events(cloud: &PointCloud, tree: &KdTree, sigma: &Simplex, config: &PerturbConfig) -> Vec<BadEvent> {
    let verts = cloud.gather(sigma.vertices());
    let Ok(ball) = miniball(&verts) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    if ball.radius <= config.rho + tol::BALL_SLACK {
        let h = simplex_height(&verts);
        if h < config.height_min {
            out.push(BadEvent {
                kind: EventKind::Height,
                simplex: sigma.clone(),
                witness: None,
                value: h,
                violation: config.height_min - h,
            });
        }
    }
    let rho3 = 3.0 * config.rho;
    // a degenerate simplex has zero protection against every point
    let frame = circumsphere(&verts).ok().map(|sphere| (Flat::through(&verts), sphere));
    for p in tree.within(&ball.center, rho3 + tol::BALL_SLACK * (1.0 + rho3)) {
        if sigma.contains_vertex(p) {
            continue;
        }
        let prot = frame.as_ref().map_or(0.0, |(aff, sphere)| projected_power_gap(aff, sphere, cloud.point(p)).abs());
        if prot <= config.prot_min {
            out.push(BadEvent {
                kind: EventKind::Protection,
                simplex: sigma.clone(),
                witness: Some(p),
                value: prot,
                violation: config.prot_min - prot,
            });
        }
    }
    out
}

/// Uniform point of `T*_{p0} cap B(p0, r_pert)`, where the flat passes
/// through the anchor `p0`.
pub fn reset<R: rand::Rng>(anchor: &Flat, config: &PerturbConfig, rng: &mut R) -> Vec<f64> {
    anchor.lift(&uniform_in_ball(rng, anchor.dim(), config.r_pert))
}

/// PCA tangent flats of the anchors at scale `3 rho`.
pub fn anchor_flats(anchors: &PointCloud, config: &PerturbConfig) -> Result<Vec<Flat>> {
    (0..anchors.len())
        .into_par_iter()
        .map(|i| pca_tangent(anchors, i, 3.0 * config.rho, config.d))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbStatus {
    Converged,
    TimedOut,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub round: usize,
    pub events_height: usize,
    pub events_protection: usize,
    pub resets: usize,
}

#[derive(Clone, Debug)]
pub struct PerturbOutcome {
    /// The final cloud, or on timeout the one with the fewest bad events.
    pub cloud: PointCloud,
    pub status: PerturbStatus,
    pub rounds: usize,
    pub trace: Vec<TraceRecord>,
    pub remaining: Vec<BadEvent>,
}

impl PerturbOutcome {
    pub fn trace_jsonl(&self) -> String {
        self.trace.iter().map(|r| serde_json::to_string(r).expect("serializable") + "\n").collect()
    }
}

/// Resets every point once, then repeatedly resets the points correlated to
/// one bad event until none is left or `max_rounds` repairs were made.
pub fn moser_tardos(anchors: &PointCloud, config: &PerturbConfig) -> Result<PerturbOutcome> {
    config.validate()?;
    let flats = anchor_flats(anchors, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut cloud = anchors.clone();
    for (i, f) in flats.iter().enumerate() {
        cloud.set_point(i, &reset(f, config, &mut rng));
    }
    let mut events = find_bad_events(&cloud, config);
    let mut trace = vec![record(0, &events, cloud.len())];
    let mut best = (events.clone(), cloud.clone());
    let mut rounds = 0;
    while !events.is_empty() {
        if rounds == config.max_rounds {
            return Ok(PerturbOutcome {
                cloud: best.1,
                status: PerturbStatus::TimedOut,
                rounds,
                trace,
                remaining: best.0,
            });
        }
        rounds += 1;
        let moved = events[0].correlated();
        for &p in &moved {
            cloud.set_point(p, &reset(&flats[p], config, &mut rng));
        }
        events = update_events(&cloud, config, events, &moved);
        trace.push(record(rounds, &events, moved.len()));
        if events.len() < best.0.len() {
            best = (events.clone(), cloud.clone());
        }
    }
    Ok(PerturbOutcome { cloud, status: PerturbStatus::Converged, rounds, trace, remaining: Vec::new() })
}

fn record(round: usize, events: &[BadEvent], resets: usize) -> TraceRecord {
    let events_height = events.iter().filter(|e| e.kind == EventKind::Height).count();
    TraceRecord { round, events_height, events_protection: events.len() - events_height, resets }
}

/// Recomputes the events of simplices near the moved points. Other events
/// involve neither a moved point nor a simplex whose `3 rho` ball a moved
/// point can enter or leave, so they carry over.
fn update_events(cloud: &PointCloud, config: &PerturbConfig, old: Vec<BadEvent>, moved: &[usize]) -> Vec<BadEvent> {
    let reach = 6.0 * config.rho + 2.0 * config.r_pert;
    let reach2 = reach * reach * (1.0 + tol::REL);
    let centers: Vec<&[f64]> = moved.iter().map(|&p| cloud.point(p)).collect();
    let near = |s: &Simplex| {
        s.vertices().iter().any(|&v| centers.iter().any(|c| dist2(cloud.point(v), c) <= reach2))
    };
    let tree = KdTree::new(cloud);
    let mut flags = vec![false; cloud.len()];
    for c in &centers {
        for v in tree.within(c, reach * (1.0 + tol::REL)) {
            flags[v] = true;
        }
    }
    let mut fresh: HashMap<_, BadEvent> =
        events_where(cloud, config, Some(&flags)).into_iter().filter(|e| near(&e.simplex)).map(|e| (e.key(), e)).collect();
    let mut out = Vec::with_capacity(old.len());
    for e in old {
        if !near(&e.simplex) {
            out.push(e);
        } else if let Some(updated) = fresh.remove(&e.key()) {
            out.push(updated);
        }
    }
    let mut added: Vec<BadEvent> = fresh.into_values().collect();
    sort_worst_first(&mut added);
    out.extend(added);
    if config.schedule == Schedule::Worst {
        sort_worst_first(&mut out);
    }
    out
}

/// Points correlated to at least one of `events`.
pub fn correlated_points(events: &[BadEvent]) -> BTreeSet<usize> {
    events.iter().flat_map(BadEvent::correlated).collect()
}
