use nalgebra::Matrix3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Right-handed rotation about a local axis.
pub fn elementary_rotation(axis: Axis, angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    match axis {
        Axis::X => Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
        Axis::Y => Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
        Axis::Z => Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
    }
}

/// d/dangle of [`elementary_rotation`].
pub(crate) fn elementary_rotation_derivative(axis: Axis, angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    match axis {
        Axis::X => Matrix3::new(0.0, 0.0, 0.0, 0.0, -s, -c, 0.0, c, -s),
        Axis::Y => Matrix3::new(-s, 0.0, c, 0.0, 0.0, 0.0, -c, 0.0, -s),
        Axis::Z => Matrix3::new(-s, -c, 0.0, c, -s, 0.0, 0.0, 0.0, 0.0),
    }
}

/// `R_z(χ₃) R_y(χ₂) R_x(χ₁)`: platform frame to base frame.
pub(crate) fn zyx(chi: &nalgebra::Vector3<f64>) -> Matrix3<f64> {
    elementary_rotation(Axis::Z, chi[2])
        * elementary_rotation(Axis::Y, chi[1])
        * elementary_rotation(Axis::X, chi[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_angle_is_identity() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            assert_eq!(elementary_rotation(axis, 0.0), Matrix3::identity());
        }
    }

    #[test]
    fn quarter_turn_about_z() {
        let v = elementary_rotation(Axis::Z, FRAC_PI_2) * Vector3::x();
        assert!((v - Vector3::y()).norm() < 1e-15);
    }

    #[test]
    fn y_rotation_entries() {
        let a = 0.37_f64;
        let r = elementary_rotation(Axis::Y, a);
        let expected = [
            [a.cos(), 0.0, a.sin()],
            [0.0, 1.0, 0.0],
            [-a.sin(), 0.0, a.cos()],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert_eq!(r[(i, j)], e);
            }
        }
    }

    #[test]
    fn rotations_are_proper_orthogonal() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            for k in 0..50 {
                let a = -7.0 + 0.29 * k as f64;
                let r = elementary_rotation(axis, a);
                assert!((r.transpose() * r - Matrix3::identity()).amax() < 1e-15);
                assert!((r.determinant() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-6;
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let a = 0.8;
            let fd =
                (elementary_rotation(axis, a + h) - elementary_rotation(axis, a - h)) / (2.0 * h);
            assert!((fd - elementary_rotation_derivative(axis, a)).amax() < 1e-9);
        }
        let _ = zyx(&Vector3::zeros());
    }
}
