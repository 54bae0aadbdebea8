use nalgebra::{Matrix3, Vector3};

use super::rotation::zyx;
use super::Orientation;

/// `T(χ)`, mapping ZYX angle rates to the platform angular velocity
/// expressed in the platform frame. `det T = cos χ₂`, singular at
/// `χ₂ = ±π/2`.
pub fn euler_rate_map(chi: &Orientation) -> Matrix3<f64> {
    rate_map(&chi.0)
}

/// `T′(ν)`, the same map applied to the carrier's roll/pitch/yaw angles.
pub fn disturbance_rate_map(nu: &Vector3<f64>) -> Matrix3<f64> {
    rate_map(nu)
}

fn rate_map(a: &Vector3<f64>) -> Matrix3<f64> {
    let (s1, c1) = a[0].sin_cos();
    let (s2, c2) = a[1].sin_cos();
    Matrix3::new(1.0, 0.0, -s2, 0.0, c1, s1 * c2, 0.0, -s1, c1 * c2)
}

/// `Ω⋆/b = T(χ) χ̇`.
pub fn platform_velocity(chi: &Orientation, chi_dot: &Vector3<f64>) -> Vector3<f64> {
    euler_rate_map(chi) * chi_dot
}

/// Carrier angular velocity seen in the line-of-sight frame,
/// `R_z(χ₃) R_y(χ₂) R_x(χ₁) T′(ν) ν̇`.
pub fn carrier_disturbance(
    chi: &Orientation,
    nu: &Vector3<f64>,
    nu_dot: &Vector3<f64>,
) -> Vector3<f64> {
    zyx(&chi.0) * (disturbance_rate_map(nu) * nu_dot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_angles_give_identity() {
        assert_eq!(euler_rate_map(&Orientation::zero()), Matrix3::identity());
        assert_eq!(disturbance_rate_map(&Vector3::zeros()), Matrix3::identity());
    }

    #[test]
    fn determinant_is_cos_elevation() {
        for k in 0..100 {
            let a = Orientation::new(0.37 * k as f64, -3.0 + 0.061 * k as f64, 1.3 * k as f64);
            let t = euler_rate_map(&a);
            assert!((t.determinant() - a.elevation().cos()).abs() < 1e-12);
            assert_eq!(t, disturbance_rate_map(&a.0));
        }
    }

    #[test]
    fn rank_drops_at_vertical_elevation() {
        for e in [FRAC_PI_2, -FRAC_PI_2] {
            let t = euler_rate_map(&Orientation::new(0.3, e, 0.0));
            let sv = t.singular_values();
            assert!(sv.min() < 1e-15, "{sv}");
            assert!(sv.iter().filter(|s| **s > 1e-6).count() == 2);
        }
    }

    #[test]
    fn platform_velocity_basics() {
        let x = Vector3::x();
        assert_eq!(platform_velocity(&Orientation::zero(), &x), x);
        assert_eq!(
            platform_velocity(&Orientation::new(0.2, 0.3, 0.4), &Vector3::zeros()),
            Vector3::zeros()
        );
        let chi = Orientation::new(0.2, -0.5, 1.0);
        let rate = Vector3::new(0.3, -0.1, 2.0);
        let (s1, c1) = 0.2f64.sin_cos();
        let (s2, c2) = (-0.5f64).sin_cos();
        let expected = Vector3::new(
            rate[0] - s2 * rate[2],
            c1 * rate[1] + s1 * c2 * rate[2],
            -s1 * rate[1] + c1 * c2 * rate[2],
        );
        assert!((platform_velocity(&chi, &rate) - expected).amax() < 1e-15);
    }

    #[test]
    fn carrier_disturbance_basics() {
        let rate = Vector3::new(0.1, -0.2, 0.05);
        assert_eq!(
            carrier_disturbance(&Orientation::zero(), &Vector3::zeros(), &rate),
            rate
        );
        assert_eq!(
            carrier_disturbance(
                &Orientation::new(0.1, 0.2, 0.3),
                &Vector3::new(0.1, 0.1, 0.0),
                &Vector3::zeros()
            ),
            Vector3::zeros()
        );
        let out = carrier_disturbance(&Orientation::new(0.4, -0.7, 2.0), &Vector3::zeros(), &rate);
        assert!((out.norm() - rate.norm()).abs() < 1e-15);
    }
}
