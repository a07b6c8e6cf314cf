use std::collections::HashMap;
use std::f64::consts::FRAC_PI_6;
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{ReconError, Result};

/// Measured quantities entering the safety condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SafetyInputs {
    /// Largest angular deviation of a `rho`-small simplex.
    pub theta: f64,
    pub sep: f64,
    /// Protection at scale `3 rho`.
    pub prot: f64,
    /// Smallest height of a `rho`-small simplex.
    pub height: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub rho: f64,
    pub reach: f64,
    pub d: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SafetyCheck {
    pub ok: bool,
    /// Smallest admissible `theta`, when it lies in `[0, pi/6]`.
    pub theta_budget: Option<f64>,
    /// `pi/6 - theta_min`.
    pub angle_slack: f64,
    pub separation_slack: f64,
    pub protection_slack: f64,
}

/// Tests the three safety inequalities at the smallest `theta` allowed by the
/// angle inequality, `theta = 2 (Theta + asin((rho + delta) / R))`; the other
/// two right-hand sides increase with `theta`.
pub fn check_safety(x: &SafetyInputs) -> SafetyCheck {
    let ratio = (x.rho + x.delta) / x.reach;
    let theta = if (0.0..=1.0).contains(&ratio) { 2.0 * (x.theta + ratio.asin()) } else { f64::INFINITY };
    let tilt = 8.0 * (x.delta * theta + x.rho * theta * theta);
    let sep_rhs = tilt + 6.0 * x.delta + 2.0 * x.rho * x.rho / x.reach;
    let prot_rhs = if x.height > 0.0 {
        tilt * (1.0 + 4.0 * x.d as f64 * x.epsilon / x.height)
    } else {
        f64::INFINITY
    };
    let angle_slack = FRAC_PI_6 - theta;
    let separation_slack = x.sep - sep_rhs;
    let protection_slack = x.prot - prot_rhs;
    let ok = angle_slack >= 0.0 && separation_slack > 0.0 && protection_slack > 0.0;
    SafetyCheck {
        ok,
        theta_budget: (angle_slack >= 0.0).then_some(theta),
        angle_slack,
        separation_slack: finite_or_neg_inf(separation_slack),
        protection_slack: finite_or_neg_inf(protection_slack),
    }
}

fn finite_or_neg_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtraCheck {
    pub ok: bool,
    /// `prot^2 + prot * sep`.
    pub lhs: f64,
    /// `10 rho Theta (epsilon + rho Theta)`.
    pub rhs_angle: f64,
    /// `4 J (1 + J) rho^2 / ((d + 2) (d - 1)! Omega(Delta_d))`.
    pub rhs_jacobian: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn check_extra_condition(
    prot: f64,
    sep: f64,
    rho: f64,
    theta: f64,
    epsilon: f64,
    j: f64,
    omega: f64,
    d: usize,
) -> ExtraCheck {
    let lhs = prot * prot + prot * sep;
    let rhs_angle = 10.0 * rho * theta * (epsilon + rho * theta);
    let rhs_jacobian = 4.0 * j * (1.0 + j) * rho * rho / ((d + 2) as f64 * factorial(d - 1) * omega);
    ExtraCheck { ok: lhs > rhs_angle.max(rhs_jacobian), lhs, rhs_angle, rhs_jacobian }
}

/// `J = (R + rho)^d / ((R - rho)^d cos(Theta)^min(d, N - d)) - 1`.
pub fn compute_j(rho: f64, reach: f64, theta: f64, d: usize, n: usize) -> Result<f64> {
    if !(0.0..reach).contains(&rho) {
        return Err(ReconError::InvalidInput(format!("J needs 0 <= rho < reach, got rho={rho}, reach={reach}")));
    }
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&theta) || d > n {
        return Err(ReconError::InvalidInput(format!("J needs 0 <= Theta < pi/2 and d <= N, got Theta={theta}")));
    }
    let k = d.min(n - d) as i32;
    let ratio = ((reach + rho) / (reach - rho)).powi(d as i32);
    Ok(ratio / theta.cos().powi(k) - 1.0)
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// Monte Carlo estimate of `int_{Delta_d} min_i lambda_i`, with its standard error.
pub fn omega_monte_carlo(d: usize, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..samples {
        let mut total = 0.0;
        let mut least = f64::INFINITY;
        for _ in 0..=d {
            let e = -(1.0 - rng.gen::<f64>()).ln();
            total += e;
            least = least.min(e);
        }
        let m = least / total;
        sum += m;
        sum2 += m * m;
    }
    let n = samples as f64;
    let mean = sum / n;
    let vol = 1.0 / factorial(d);
    (vol * mean, vol * ((sum2 / n - mean * mean).max(0.0) / n).sqrt())
}

/// `Omega(Delta_d)`: the integral over the standard simplex of the smallest
/// barycentric coordinate, from `10^7` seeded Monte Carlo samples, cached per `d`.
pub fn omega_standard_simplex(d: usize) -> f64 {
    assert!(d >= 1, "Omega is defined for d >= 1");
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().expect("omega cache").get(&d) {
        return v;
    }
    let v = omega_monte_carlo(d, 10_000_000, 0x0e6a + d as u64).0;
    cache.lock().expect("omega cache").insert(d, v);
    v
}

/// Closed form `1 / ((d + 1)^2 d!)`: the smallest of `d + 1` uniform
/// spacings has mean `1 / (d + 1)^2`.
pub fn omega_closed_form(d: usize) -> f64 {
    1.0 / (((d + 1) * (d + 1)) as f64 * factorial(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs() -> SafetyInputs {
        SafetyInputs { theta: 0.0, sep: 0.1, prot: 0.01, height: 0.1, epsilon: 0.05, delta: 0.0, rho: 0.01, reach: 1.0, d: 1 }
    }

    #[test]
    fn small_rho_limit() {
        let x = inputs();
        let c = check_safety(&x);
        assert!(c.ok);
        let theta = 2.0 * 0.01_f64.asin();
        assert!((c.theta_budget.unwrap() - theta).abs() < 1e-15);
        let tilt = 8.0 * 0.01 * theta * theta;
        assert!((c.separation_slack - (0.1 - tilt - 2e-4)).abs() < 1e-15);
    }

    #[test]
    fn zero_height_is_unsafe() {
        let mut x = inputs();
        x.height = 0.0;
        let c = check_safety(&x);
        assert!(!c.ok);
        assert_eq!(c.protection_slack, f64::NEG_INFINITY);
    }

    #[test]
    fn large_angle_has_no_budget() {
        let mut x = inputs();
        x.theta = 0.3;
        let c = check_safety(&x);
        assert!(!c.ok && c.theta_budget.is_none() && c.angle_slack < 0.0);
    }

    #[test]
    fn j_examples() {
        assert_eq!(compute_j(0.0, 1.0, 0.0, 2, 3).unwrap(), 0.0);
        assert!((compute_j(0.1, 1.0, 0.0, 1, 2).unwrap() - 2.0 / 9.0).abs() < 1e-15);
        assert!(compute_j(1.0, 1.0, 0.0, 1, 2).is_err());
        assert!(compute_j(0.1, 1.0, 0.2, 2, 3).unwrap() > compute_j(0.1, 1.0, 0.1, 2, 3).unwrap());
    }

    #[test]
    fn extra_condition_reduces_to_positive_protection() {
        let omega = omega_closed_form(1);
        assert!(check_extra_condition(0.01, 0.1, 0.1, 0.0, 0.05, 0.0, omega, 1).ok);
        assert!(!check_extra_condition(0.0, 0.1, 0.1, 0.0, 0.05, 0.0, omega, 1).ok);
        assert!(!check_extra_condition(0.01, 0.1, 0.1, 0.0, 0.05, 1e6, omega, 1).ok);
    }

    #[test]
    fn omega_monte_carlo_matches_closed_form() {
        for d in 1..=3 {
            let (v, se) = omega_monte_carlo(d, 200_000, 1);
            assert!((v - omega_closed_form(d)).abs() < 4.0 * se);
        }
    }
}
