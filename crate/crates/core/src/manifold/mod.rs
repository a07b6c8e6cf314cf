//! Analytic test manifolds, samplers, density checks and tangent estimation.

mod orient;
mod pca;
mod sample;

use std::f64::consts::PI;

use serde::Serialize;

pub(crate) use orient::probe_points;
pub use orient::{angular_deviation, oriented_sign, simplex_sign, AngleEstimate};
pub use pca::{pca_tangent, pca_tangent_detailed, PcaEstimate};
pub(crate) use sample::manifold_probes;
pub use sample::{sample, uniform_in_ball, verify_density, DensityEstimate, SampleSpec};

use crate::geom::{dot, norm2, Flat};
use crate::{ReconError, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifoldKind {
    Circle { radius: f64 },
    Sphere { radius: f64 },
    Torus { major: f64, minor: f64 },
    /// The `d`-plane spanned by the first `d` axes of `R^N`, sampled inside a disk.
    FlatDisk { d: usize, n: usize, radius: f64 },
}

/// A closed-form submanifold with projection map and oriented tangent frames,
/// optionally moved by a rigid motion `x = R y + t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticManifold {
    pub kind: ManifoldKind,
    rotation: Option<Vec<Vec<f64>>>,
    translation: Option<Vec<f64>>,
}

impl AnalyticManifold {
    pub fn new(kind: ManifoldKind) -> Result<Self> {
        let ok = match &kind {
            ManifoldKind::Circle { radius } | ManifoldKind::Sphere { radius } => *radius > 0.0,
            ManifoldKind::Torus { major, minor } => *minor > 0.0 && major > minor,
            ManifoldKind::FlatDisk { d, n, radius } => *d >= 1 && d <= n && *radius > 0.0,
        };
        if !ok {
            return Err(ReconError::InvalidInput(format!("invalid manifold parameters {kind:?}")));
        }
        Ok(Self { kind, rotation: None, translation: None })
    }

    pub fn circle(radius: f64) -> Self {
        Self::new(ManifoldKind::Circle { radius }).expect("positive radius")
    }

    pub fn sphere(radius: f64) -> Self {
        Self::new(ManifoldKind::Sphere { radius }).expect("positive radius")
    }

    pub fn torus(major: f64, minor: f64) -> Self {
        Self::new(ManifoldKind::Torus { major, minor }).expect("major > minor > 0")
    }

    pub fn flat_disk(d: usize, n: usize, radius: f64) -> Self {
        Self::new(ManifoldKind::FlatDisk { d, n, radius }).expect("valid disk")
    }

    /// Applies `x -> rotation * x + translation` on top of the current placement.
    /// `rotation` is given by rows and must be orthogonal.
    pub fn moved(&self, rotation: Vec<Vec<f64>>, translation: Vec<f64>) -> Result<Self> {
        let n = self.ambient_dim();
        if rotation.len() != n || rotation.iter().any(|r| r.len() != n) || translation.len() != n {
            return Err(ReconError::InvalidInput("rigid motion has the wrong dimension".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let g = dot(&rotation[i], &rotation[j]);
                if (g - if i == j { 1.0 } else { 0.0 }).abs() > 1e-10 {
                    return Err(ReconError::InvalidInput("rotation is not orthogonal".into()));
                }
            }
        }
        let mut out = self.clone();
        let (r0, t0) = (self.rotation_rows(), self.translation.clone().unwrap_or(vec![0.0; n]));
        // compose: x = R1 (R0 y + t0) + t1
        let composed: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| rotation[i][k] * r0[k][j]).sum()).collect())
            .collect();
        let mut t = apply_rows(&rotation, &t0);
        for (ti, si) in t.iter_mut().zip(&translation) {
            *ti += si;
        }
        out.rotation = Some(composed);
        out.translation = Some(t);
        Ok(out)
    }

    fn rotation_rows(&self) -> Vec<Vec<f64>> {
        let n = self.ambient_dim();
        self.rotation.clone().unwrap_or_else(|| {
            (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
        })
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Circle { .. } => 2,
            ManifoldKind::Sphere { .. } | ManifoldKind::Torus { .. } => 3,
            ManifoldKind::FlatDisk { n, .. } => n,
        }
    }

    pub fn intrinsic_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Circle { .. } => 1,
            ManifoldKind::Sphere { .. } | ManifoldKind::Torus { .. } => 2,
            ManifoldKind::FlatDisk { d, .. } => d,
        }
    }

    pub fn reach(&self) -> f64 {
        match self.kind {
            ManifoldKind::Circle { radius } | ManifoldKind::Sphere { radius } => radius,
            ManifoldKind::Torus { major, minor } => minor.min(major - minor),
            ManifoldKind::FlatDisk { .. } => f64::INFINITY,
        }
    }

    /// Volume (length, area) of the manifold; the disk for `FlatDisk`.
    pub fn volume(&self) -> f64 {
        match self.kind {
            ManifoldKind::Circle { radius } => 2.0 * PI * radius,
            ManifoldKind::Sphere { radius } => 4.0 * PI * radius * radius,
            ManifoldKind::Torus { major, minor } => 4.0 * PI * PI * major * minor,
            ManifoldKind::FlatDisk { d, radius, .. } => unit_ball_volume(d) * radius.powi(d as i32),
        }
    }

    pub(crate) fn to_local(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        if let Some(t) = &self.translation {
            for (yi, ti) in y.iter_mut().zip(t) {
                *yi -= ti;
            }
        }
        match &self.rotation {
            // y = R^T (x - t)
            Some(r) => (0..y.len()).map(|j| (0..y.len()).map(|i| r[i][j] * y[i]).sum()).collect(),
            None => y,
        }
    }

    pub(crate) fn to_world(&self, y: &[f64]) -> Vec<f64> {
        let mut x = match &self.rotation {
            Some(r) => apply_rows(r, y),
            None => y.to_vec(),
        };
        if let Some(t) = &self.translation {
            for (xi, ti) in x.iter_mut().zip(t) {
                *xi += ti;
            }
        }
        x
    }

    fn vec_to_world(&self, v: &[f64]) -> Vec<f64> {
        match &self.rotation {
            Some(r) => apply_rows(r, v),
            None => v.to_vec(),
        }
    }

    /// Closest-point projection `pi_M`. Points on the medial axis get an
    /// arbitrary but fixed choice.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let y = self.to_local(x);
        let m = match self.kind {
            ManifoldKind::Circle { radius } | ManifoldKind::Sphere { radius } => {
                let len = norm2(&y).sqrt();
                if len == 0.0 {
                    let mut e = vec![0.0; y.len()];
                    e[0] = radius;
                    e
                } else {
                    y.iter().map(|v| v * radius / len).collect()
                }
            }
            ManifoldKind::Torus { major, minor } => {
                let u = y[1].atan2(y[0]);
                let c = [major * u.cos(), major * u.sin(), 0.0];
                let w = [y[0] - c[0], y[1] - c[1], y[2]];
                let len = norm2(&w).sqrt();
                if len == 0.0 {
                    vec![c[0] + minor * u.cos(), c[1] + minor * u.sin(), 0.0]
                } else {
                    (0..3).map(|i| c[i] + minor * w[i] / len).collect()
                }
            }
            ManifoldKind::FlatDisk { d, .. } => {
                let mut m = y.clone();
                for v in m.iter_mut().skip(d) {
                    *v = 0.0;
                }
                m
            }
        };
        self.to_world(&m)
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        crate::geom::dist(x, &self.project(x))
    }

    /// Oriented tangent flat at a point of the manifold (the point is projected first).
    pub fn tangent_at(&self, m: &[f64]) -> Flat {
        let m = self.project(m);
        let y = self.to_local(&m);
        let basis: Vec<Vec<f64>> = match self.kind {
            ManifoldKind::Circle { .. } => {
                let len = norm2(&y).sqrt();
                vec![vec![-y[1] / len, y[0] / len]]
            }
            ManifoldKind::Sphere { .. } => {
                let len = norm2(&y).sqrt();
                let n: Vec<f64> = y.iter().map(|v| v / len).collect();
                let k = (0..3).min_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs())).unwrap();
                let mut e = [0.0; 3];
                e[k] = 1.0;
                let t1 = normalize(&cross(&e, &n));
                let t2 = cross(&n, &t1);
                vec![t1, t2]
            }
            ManifoldKind::Torus { major, .. } => {
                let u = y[1].atan2(y[0]);
                let radial = y[0] * u.cos() + y[1] * u.sin() - major;
                let v = y[2].atan2(radial);
                vec![
                    vec![-u.sin(), u.cos(), 0.0],
                    vec![-v.sin() * u.cos(), -v.sin() * u.sin(), v.cos()],
                ]
            }
            ManifoldKind::FlatDisk { d, n, .. } => (0..d)
                .map(|i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    e
                })
                .collect(),
        };
        let basis = basis.iter().map(|b| self.vec_to_world(b)).collect();
        Flat::from_parts(m, basis)
    }

    /// Orthonormal basis of the normal space at the projection of `m`.
    pub fn normal_basis_at(&self, m: &[f64]) -> Vec<Vec<f64>> {
        let t = self.tangent_at(m);
        complement(t.basis(), self.ambient_dim())
    }
}

fn apply_rows(rows: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| dot(r, v)).collect()
}

pub(crate) fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let len = norm2(v).sqrt();
    v.iter().map(|x| x / len).collect()
}

/// Orthonormal completion of `basis` to `R^n`, returning only the new vectors.
pub(crate) fn complement(basis: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut all: Vec<Vec<f64>> = basis.to_vec();
    let k = all.len();
    for i in 0..n {
        if all.len() == n {
            break;
        }
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        for _ in 0..2 {
            for u in &all {
                let c = dot(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let len = norm2(&w).sqrt();
        if len > 1e-6 {
            all.push(w.into_iter().map(|x| x / len).collect());
        }
    }
    all.split_off(k)
}

fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * PI / d as f64,
    }
}
