use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recon::complex::{rips_complex, Chain, Simplex};
use recon::delloc::{delloc_complex, encode_chain, encode_chain_coherent};
use recon::geom::{circumsphere, diameter, miniball, Flat, PointCloud};
use recon::manifold::{sample, AnalyticManifold, SampleSpec};
use recon::optimize::weight_of_points;
use recon::perturb::{reset, PerturbConfig, Schedule};

fn rotation(n: usize, entries: &[f64]) -> DMatrix<f64> {
    DMatrix::from_column_slice(n, n, &entries[..n * n]).qr().q()
}

fn transform(p: &[f64], q: &DMatrix<f64>, scale: f64, shift: &[f64]) -> Vec<f64> {
    (0..p.len()).map(|i| scale * (0..p.len()).map(|j| q[(i, j)] * p[j]).sum::<f64>() + shift[i]).collect()
}

fn points(k: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0..1.0f64, n), k)
}

fn well_shaped(pts: &[Vec<f64>]) -> bool {
    let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
    recon::geom::simplex_height(&refs) > 0.1 * diameter(&refs)
}

fn refs(pts: &[Vec<f64>]) -> Vec<&[f64]> {
    pts.iter().map(Vec::as_slice).collect()
}

proptest! {
    #[test]
    fn weight_scales_with_similarities(
        k in 1usize..4,
        pts in points(4, 3),
        q in prop::collection::vec(-1.0..1.0f64, 9),
        scale in 0.1..10.0f64,
        shift in prop::collection::vec(-5.0..5.0f64, 3),
    ) {
        let pts = &pts[..=k];
        prop_assume!(well_shaped(pts));
        let q = rotation(3, &q);
        let moved: Vec<Vec<f64>> = pts.iter().map(|p| transform(p, &q, scale, &shift)).collect();
        let w = weight_of_points(&refs(pts));
        let expected = w * scale.powi(k as i32 + 2);
        prop_assert!((weight_of_points(&refs(&moved)) - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn circumsphere_is_equidistant_and_in_the_hull(k in 1usize..4, pts in points(4, 4)) {
        let pts = &pts[..=k];
        prop_assume!(well_shaped(pts));
        let s = circumsphere(&refs(pts)).unwrap();
        for p in pts {
            prop_assert!((recon::geom::dist(p, &s.center) - s.radius).abs() <= 1e-9 * s.radius);
        }
        prop_assert!(Flat::through(&refs(pts)).distance(&s.center) <= 1e-9 * s.radius);
    }

    #[test]
    fn miniball_encloses_and_is_no_larger_than_needed(pts in points(12, 3), k in 2usize..12) {
        let pts = &pts[..k];
        let b = miniball(&refs(pts)).unwrap();
        for p in pts {
            prop_assert!(recon::geom::dist(p, &b.center) <= b.radius * (1.0 + 1e-9) + 1e-12);
        }
        prop_assert!(b.radius >= 0.5 * diameter(&refs(pts)) * (1.0 - 1e-12));
        let centroid: Vec<f64> = (0..3).map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / k as f64).collect();
        let around_centroid = pts.iter().map(|p| recon::geom::dist(p, &centroid)).fold(0.0, f64::max);
        prop_assert!(b.radius <= around_centroid * (1.0 + 1e-9));
    }

    #[test]
    fn boundary_of_boundary_vanishes(
        d in 1usize..4,
        cells in prop::collection::vec((prop::collection::btree_set(0usize..8, 4), -5i32..6), 1..10),
    ) {
        let chain = Chain::from_entries(
            d,
            cells.into_iter().map(|(v, c)| (Simplex::new(v.into_iter().take(d + 1).collect()).unwrap(), c as f64)),
        );
        prop_assert!(chain.boundary().boundary().max_abs() == 0.0);
    }
}

fn noisy_circle(n: usize, seed: u64) -> PointCloud {
    let m = AnalyticManifold::circle(1.0);
    sample(&m, &SampleSpec::new(0.2, 1e-3, seed).with_count(n)).unwrap()
}

fn delloc_set(cloud: &PointCloud, r: f64, rho: f64) -> BTreeSet<Simplex> {
    let k = rips_complex(cloud, r, 1);
    delloc_complex(cloud, rho, 1, &k).unwrap().simplices().iter().cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn delloc_is_invariant_under_similarities(
        seed in 0u64..1000,
        q in prop::collection::vec(-1.0..1.0f64, 9),
        scale in 0.2..5.0f64,
        shift in prop::collection::vec(-3.0..3.0f64, 3),
    ) {
        let flat = noisy_circle(48, seed);
        let lifted: Vec<Vec<f64>> = flat.points().map(|p| vec![p[0], p[1], 0.0]).collect();
        let q = rotation(3, &q);
        let moved: Vec<Vec<f64>> = lifted.iter().map(|p| transform(p, &q, scale, &shift)).collect();
        let before = delloc_set(&PointCloud::from_points(&lifted).unwrap(), 0.3, 0.6);
        let after = delloc_set(&PointCloud::from_points(&moved).unwrap(), 0.3 * scale, 0.6 * scale);
        prop_assert!(!before.is_empty());
        prop_assert_eq!(before, after);
    }
}

#[test]
fn encoded_delloc_cycle_has_the_delloc_support() {
    let cloud = noisy_circle(64, 9);
    let simplices: Vec<Simplex> = delloc_set(&cloud, 0.3, 0.6).into_iter().collect();
    assert_eq!(simplices.len(), 64);
    let m = AnalyticManifold::circle(1.0);
    let chain = encode_chain(&simplices, &cloud, &m).unwrap();
    assert_eq!(chain.support(), simplices);
    assert!(chain.iter().all(|(_, c)| c.abs() == 1.0));
    assert_eq!(chain.boundary().max_abs(), 0.0);

    let (coherent, ok) = encode_chain_coherent(&simplices);
    assert!(ok);
    assert_eq!(coherent.boundary().max_abs(), 0.0);
    let same = coherent.plus(&chain).max_abs() == 0.0 || coherent.plus(&chain.scaled(-1.0)).max_abs() == 0.0;
    assert!(same);
}

fn ks_uniform(mut u: Vec<f64>) -> f64 {
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max)
}

fn perturb_config(d: usize, r_pert: f64) -> PerturbConfig {
    PerturbConfig {
        d,
        rho: 1.0,
        r_pert,
        height_min: 1e-3,
        prot_min: 1e-3,
        max_rounds: 1,
        seed: 0,
        schedule: Schedule::Worst,
    }
}

// Critical value of the one-sample KS statistic at level 1e-3.
const KS_CRIT: f64 = 1.95;

#[test]
fn reset_on_a_line_is_uniform() {
    let r = 0.25;
    let s = 0.5f64.sqrt();
    let anchor = Flat::new(vec![1.0, 2.0, 3.0], vec![vec![s, s, 0.0]]).unwrap();
    let config = perturb_config(1, r);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100_000;
    let mut u = Vec::with_capacity(n);
    let mut mean = [0.0; 3];
    for _ in 0..n {
        let x = reset(&anchor, &config, &mut rng);
        assert!(anchor.distance(&x) < 1e-12);
        let t = anchor.coordinates(&x)[0];
        assert!(t.abs() <= r);
        u.push((t + r) / (2.0 * r));
        for (m, xi) in mean.iter_mut().zip(&x) {
            *m += xi / n as f64;
        }
    }
    assert!(ks_uniform(u) < KS_CRIT / (n as f64).sqrt());
    let se = r / (3.0 * n as f64).sqrt();
    for (m, b) in mean.iter().zip(anchor.base()) {
        assert!((m - b).abs() < 5.0 * se, "mean {m} vs anchor {b}");
    }
}

#[test]
fn reset_in_a_plane_is_uniform_in_the_disk() {
    let r = 0.1;
    let anchor = Flat::new(vec![0.0, 0.0, 1.0, 0.0], vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]]).unwrap();
    let config = perturb_config(2, r);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 50_000;
    let (mut radial, mut angular) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let x = reset(&anchor, &config, &mut rng);
        assert!(anchor.distance(&x) < 1e-12);
        let c = anchor.coordinates(&x);
        radial.push((c[0] * c[0] + c[1] * c[1]) / (r * r));
        angular.push((c[1].atan2(c[0]) + PI) / (2.0 * PI));
    }
    let crit = KS_CRIT / (n as f64).sqrt();
    assert!(ks_uniform(radial) < crit);
    assert!(ks_uniform(angular) < crit);
}

#[test]
fn reset_with_zero_radius_returns_the_anchor() {
    let anchor = Flat::new(vec![0.5, -0.5], vec![vec![0.0, 1.0]]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert_eq!(reset(&anchor, &perturb_config(1, 0.0), &mut rng), vec![0.5, -0.5]);
}
