use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;

use super::Flat;

/// Largest principal angle from `v0` to `v1`, in `[0, pi/2]`.
///
/// Computed as `atan2(s_max, c_min)` where `c_min` is the smallest singular value
/// of `B1^T B0` and `s_max` the largest singular value of `(I - B1 B1^T) B0`; this
/// stays accurate for both small and near-right angles. If `dim v0 > dim v1`
/// some direction of `v0` is orthogonal to `v1` and the angle is `pi/2`.
pub fn principal_angle(v0: &Flat, v1: &Flat) -> f64 {
    principal_angle_between_bases(&v0.basis_matrix(), &v1.basis_matrix())
}

/// Same as [`principal_angle`] on orthonormal basis matrices (`N x k`).
pub fn principal_angle_between_bases(b0: &DMatrix<f64>, b1: &DMatrix<f64>) -> f64 {
    let k0 = b0.ncols();
    let k1 = b1.ncols();
    if k0 == 0 {
        return 0.0;
    }
    if k0 > k1 {
        return FRAC_PI_2;
    }
    let cross = b1.transpose() * b0;
    let c_min = cross
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        .clamp(0.0, 1.0);
    let resid = b0 - b1 * &cross;
    let s_max = resid.singular_values().iter().copied().fold(0.0, f64::max).clamp(0.0, 1.0);
    s_max.atan2(c_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn line(dir: &[f64]) -> Flat {
        Flat::spanned(&vec![0.0; dir.len()], &[dir.to_vec()])
    }

    #[test]
    fn examples() {
        assert_abs_diff_eq!(principal_angle(&line(&[1.0, 0.0]), &line(&[1.0, 0.0])), 0.0);
        assert_abs_diff_eq!(
            principal_angle(&line(&[1.0, 0.0]), &line(&[1.0, 1.0])),
            FRAC_PI_4,
            epsilon = 1e-15
        );
        let plane = Flat::spanned(&[0.0; 3], &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        assert_abs_diff_eq!(principal_angle(&line(&[1.0, 0.0, 0.0]), &plane), 0.0);
        assert_abs_diff_eq!(principal_angle(&line(&[0.0, 0.0, 1.0]), &plane), FRAC_PI_2);
        assert_abs_diff_eq!(principal_angle(&plane, &line(&[1.0, 0.0, 0.0])), FRAC_PI_2);
    }

    #[test]
    fn tiny_angles_are_resolved() {
        let a = 1e-9_f64;
        let got = principal_angle(&line(&[1.0, 0.0]), &line(&[a.cos(), a.sin()]));
        assert!((got - a).abs() < 1e-15);
    }
}
