use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AnalyticManifold, ManifoldKind};
use crate::geom::{KdTree, PointCloud};
use crate::{ReconError, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const MAX_POINTS: usize = 5_000_000;

/// Requested sampling quality. With `count` set the lattice size is fixed
/// (approximately, for the torus and the disk) and the spec fails if it cannot
/// reach `epsilon`; otherwise the lattice is refined until it does.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub count: Option<usize>,
}

impl SampleSpec {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Self {
        Self { epsilon, delta, seed, count: None }
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = Some(count);
        self
    }
}

/// Covering radius of a cloud measured on a probe set of the manifold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    /// Largest probe-to-sample distance.
    pub epsilon: f64,
    /// Every manifold point lies within this distance of some probe.
    pub resolution: f64,
    /// `epsilon + resolution`, a bound on the true covering radius.
    pub upper: f64,
    pub probes: usize,
}

/// Lattice sample of the manifold with normal noise uniform in the `delta`-ball.
pub fn sample(manifold: &AnalyticManifold, spec: &SampleSpec) -> Result<PointCloud> {
    let (eps, delta) = (spec.epsilon, spec.delta);
    if !(eps > 0.0 && eps.is_finite()) || !(0.0..=eps).contains(&delta) {
        return Err(ReconError::InvalidInput(format!("need 0 <= delta <= epsilon, got delta={delta}, epsilon={eps}")));
    }
    if delta >= manifold.reach() {
        return Err(ReconError::InvalidInput("noise bound must stay below the reach".into()));
    }
    let check = |cloud: &PointCloud| verify_density(manifold, cloud).upper <= eps;
    if let Some(count) = spec.count {
        let cloud = noisy(manifold, &lattice_by_count(manifold, count), spec)?;
        let est = verify_density(manifold, &cloud);
        return if est.upper <= eps {
            Ok(cloud)
        } else {
            Err(ReconError::InfeasibleSpec(format!(
                "{count} points reach a covering radius of {:.4} > epsilon {eps}",
                est.upper
            )))
        };
    }
    let gap = eps - delta;
    if gap <= 0.0 {
        return Err(ReconError::InfeasibleSpec("noise bound leaves no room for lattice spacing".into()));
    }
    let d = manifold.intrinsic_dim() as f64;
    let mut h = match manifold.kind {
        ManifoldKind::Circle { .. } => 2.0 * gap,
        ManifoldKind::Sphere { .. } => 1.6 * gap,
        ManifoldKind::Torus { .. } => std::f64::consts::SQRT_2 * gap,
        ManifoldKind::FlatDisk { .. } => 2.0 * gap / d.sqrt(),
    };
    loop {
        let base = lattice_by_spacing(manifold, h);
        if base.len() > MAX_POINTS {
            return Err(ReconError::InfeasibleSpec(format!("more than {MAX_POINTS} points needed")));
        }
        let cloud = noisy(manifold, &base, spec)?;
        if check(&cloud) {
            return Ok(cloud);
        }
        h *= 0.9;
    }
}

fn noisy(manifold: &AnalyticManifold, base: &[Vec<f64>], spec: &SampleSpec) -> Result<PointCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pts = Vec::with_capacity(base.len());
    for p in base {
        let x = manifold.to_world(p);
        if spec.delta == 0.0 {
            pts.push(x);
            continue;
        }
        let normals = manifold.normal_basis_at(&x);
        let offset = uniform_in_ball(&mut rng, normals.len(), spec.delta);
        let mut y = x;
        for (nv, t) in normals.iter().zip(&offset) {
            for (yi, ni) in y.iter_mut().zip(nv) {
                *yi += t * ni;
            }
        }
        pts.push(y);
    }
    PointCloud::from_points(&pts)
}

/// Uniform point in the closed `dim`-ball of the given radius, by rejection.
pub fn uniform_in_ball<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    if dim == 0 {
        return Vec::new();
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v.into_iter().map(|x| x * radius).collect();
        }
    }
}

fn lattice_by_count(m: &AnalyticManifold, count: usize) -> Vec<Vec<f64>> {
    match m.kind {
        ManifoldKind::Circle { radius } => circle_points(radius, count),
        ManifoldKind::Sphere { radius } => fibonacci_sphere(radius, count),
        ManifoldKind::Torus { major, minor } => {
            torus_rings(major, minor, 2.0 * PI * (major * minor / count.max(1) as f64).sqrt())
        }
        ManifoldKind::FlatDisk { d, n, radius } => {
            disk_grid(d, n, radius, (m.volume() / count.max(1) as f64).powf(1.0 / d as f64))
        }
    }
}

fn lattice_by_spacing(m: &AnalyticManifold, h: f64) -> Vec<Vec<f64>> {
    match m.kind {
        ManifoldKind::Circle { radius } => circle_points(radius, (2.0 * PI * radius / h).ceil() as usize),
        ManifoldKind::Sphere { radius } => {
            fibonacci_sphere(radius, (4.0 * PI * radius * radius / (h * h)).ceil() as usize)
        }
        ManifoldKind::Torus { major, minor } => torus_rings(major, minor, h),
        ManifoldKind::FlatDisk { d, n, radius } => disk_grid(d, n, radius, h),
    }
}

fn circle_points(r: f64, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            vec![r * t.cos(), r * t.sin()]
        })
        .collect()
}

fn fibonacci_sphere(r: f64, n: usize) -> Vec<Vec<f64>> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let s = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            vec![r * s * phi.cos(), r * s * phi.sin(), r * z]
        })
        .collect()
}

/// Poloidal rings with a count proportional to their circumference and
/// golden-ratio offsets between consecutive rings.
fn torus_rings(major: f64, minor: f64, h: f64) -> Vec<Vec<f64>> {
    let nv = ((2.0 * PI * minor / h).ceil() as usize).max(3);
    let mut out = Vec::new();
    for j in 0..nv {
        let v = 2.0 * PI * j as f64 / nv as f64;
        let ring = major + minor * v.cos();
        let nu = ((2.0 * PI * ring / h).ceil() as usize).max(3);
        let shift = (j as f64 * GOLDEN).fract();
        for k in 0..nu {
            let u = 2.0 * PI * (k as f64 + shift) / nu as f64;
            out.push(vec![ring * u.cos(), ring * u.sin(), minor * v.sin()]);
        }
    }
    out
}

/// Cubic grid points of the first `d` axes within `radius + h sqrt(d)/2`,
/// so that the whole disk is covered.
fn disk_grid(d: usize, n: usize, radius: f64, h: f64) -> Vec<Vec<f64>> {
    let reach = radius + 0.5 * h * (d as f64).sqrt();
    let steps = (reach / h).floor() as i64;
    let mut out = Vec::new();
    let mut idx = vec![-steps; d];
    loop {
        let p: Vec<f64> = idx.iter().map(|&i| i as f64 * h).collect();
        if p.iter().map(|x| x * x).sum::<f64>() <= reach * reach {
            let mut q = p;
            q.resize(n, 0.0);
            out.push(q);
        }
        let mut k = 0;
        loop {
            if k == d {
                return out;
            }
            idx[k] += 1;
            if idx[k] <= steps {
                break;
            }
            idx[k] = -steps;
            k += 1;
        }
    }
}

/// Upper-estimates `sup_{m in M} d(m, P)` from a probe set whose density
/// grows with the cloud. An empty cloud has infinite covering radius.
pub fn verify_density(manifold: &AnalyticManifold, cloud: &PointCloud) -> DensityEstimate {
    let n = cloud.len().max(1);
    let (probes, resolution) = probe_set(manifold, n);
    let probes: Vec<Vec<f64>> = probes.iter().map(|p| manifold.to_world(p)).collect();
    if cloud.is_empty() {
        return DensityEstimate {
            epsilon: f64::INFINITY,
            resolution,
            upper: f64::INFINITY,
            probes: probes.len(),
        };
    }
    let tree = KdTree::new(cloud);
    let epsilon = probes
        .iter()
        .map(|p| tree.nearest(p).map_or(f64::INFINITY, |(_, dist)| dist))
        .fold(0.0, f64::max);
    DensityEstimate { epsilon, resolution, upper: epsilon + resolution, probes: probes.len() }
}

/// Roughly `target` probe points on the manifold, in world coordinates.
pub(crate) fn manifold_probes(m: &AnalyticManifold, target: usize) -> Vec<Vec<f64>> {
    let per = if m.intrinsic_dim() == 2 && !matches!(m.kind, ManifoldKind::FlatDisk { .. }) { 128 } else { 64 };
    probe_set(m, (target / per).max(1)).0.iter().map(|p| m.to_world(p)).collect()
}

fn probe_set(m: &AnalyticManifold, n: usize) -> (Vec<Vec<f64>>, f64) {
    let root = (n as f64).sqrt();
    match m.kind {
        ManifoldKind::Circle { radius } => {
            let k = 64 * n.max(1);
            let step = 2.0 * PI / k as f64;
            (circle_points(radius, k), 2.0 * radius * (step / 4.0).sin())
        }
        ManifoldKind::Sphere { radius } => {
            let nlat = (8.0 * root).ceil() as usize;
            let nlon = 2 * nlat;
            let (dt, dp) = (PI / nlat as f64, 2.0 * PI / nlon as f64);
            let mut pts = Vec::with_capacity((nlat + 1) * nlon);
            for i in 0..=nlat {
                let t = i as f64 * dt;
                for j in 0..nlon {
                    let p = j as f64 * dp;
                    pts.push(vec![radius * t.sin() * p.cos(), radius * t.sin() * p.sin(), radius * t.cos()]);
                }
            }
            (pts, 0.5 * radius * (dt * dt + dp * dp).sqrt())
        }
        ManifoldKind::Torus { major, minor } => {
            let nu = (16.0 * root).ceil() as usize;
            let nv = (8.0 * root).ceil() as usize;
            let (du, dv) = (2.0 * PI / nu as f64, 2.0 * PI / nv as f64);
            let mut pts = Vec::with_capacity(nu * nv);
            for i in 0..nu {
                let u = i as f64 * du;
                for j in 0..nv {
                    let v = j as f64 * dv;
                    let ring = major + minor * v.cos();
                    pts.push(vec![ring * u.cos(), ring * u.sin(), minor * v.sin()]);
                }
            }
            let res = 0.5 * (((major + minor) * du).powi(2) + (minor * dv).powi(2)).sqrt();
            (pts, res)
        }
        ManifoldKind::FlatDisk { d, n: ambient, radius } => {
            let per_axis = ((64 * n) as f64).powf(1.0 / d as f64).ceil().max(2.0);
            let h = 2.0 * radius / per_axis;
            let pts: Vec<Vec<f64>> = disk_grid(d, ambient, radius, h)
                .into_iter()
                .filter(|p| p.iter().map(|x| x * x).sum::<f64>() <= radius * radius)
                .collect();
            (pts, 0.5 * h * (d as f64).sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_count_density_matches_arc_geometry() {
        let m = AnalyticManifold::circle(1.0);
        let cloud = sample(&m, &SampleSpec::new(0.1, 0.0, 0).with_count(64)).unwrap();
        let est = verify_density(&m, &cloud);
        let exact = 2.0 * (PI / 128.0).sin();
        assert!(est.epsilon <= exact + 1e-12);
        assert!(exact <= est.upper);
        assert!(est.upper - exact < 1e-3);
        for p in cloud.points() {
            assert!(m.distance(p) <= 1e-9);
        }
    }

    #[test]
    fn fibonacci_sphere_density() {
        let m = AnalyticManifold::sphere(1.0);
        let cloud = sample(&m, &SampleSpec::new(0.2, 0.0, 0).with_count(500)).unwrap();
        assert_eq!(cloud.len(), 500);
        assert!(verify_density(&m, &cloud).epsilon < 0.2);
    }

    #[test]
    fn too_few_points_is_infeasible() {
        let m = AnalyticManifold::circle(1.0);
        assert!(matches!(sample(&m, &SampleSpec::new(0.1, 0.0, 0).with_count(8)), Err(ReconError::InfeasibleSpec(_))));
    }

    #[test]
    fn refinement_reaches_target_with_noise() {
        for m in [
            AnalyticManifold::circle(1.0),
            AnalyticManifold::sphere(1.0),
            AnalyticManifold::torus(1.0, 0.4),
            AnalyticManifold::flat_disk(2, 3, 1.0),
        ] {
            let spec = SampleSpec::new(0.25, 0.02, 9);
            let cloud = sample(&m, &spec).unwrap();
            assert!(verify_density(&m, &cloud).upper <= 0.25);
            for p in cloud.points() {
                assert!(m.distance(p) <= 0.02 + 1e-12);
            }
        }
    }

    #[test]
    fn empty_cloud_has_infinite_radius() {
        let m = AnalyticManifold::sphere(1.0);
        assert_eq!(verify_density(&m, &PointCloud::empty(3)).epsilon, f64::INFINITY);
    }

    #[test]
    fn ball_sampler_stays_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let v = uniform_in_ball(&mut rng, 3, 0.5);
            assert!(v.iter().map(|x| x * x).sum::<f64>().sqrt() <= 0.5);
        }
    }
}
