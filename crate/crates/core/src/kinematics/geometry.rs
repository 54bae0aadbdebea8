use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Matrix3, Vector3};

use super::rotation::{
    elementary_rotation as rot, elementary_rotation_derivative as drot, zyx, Axis,
};
use super::{DesignParameters, JointVector, Orientation};
use crate::error::{Error, Result};

/// `|det|` below which `J1` or `J2` is treated as singular.
pub const SINGULARITY_DET_THRESHOLD: f64 = 1e-12;

/// Ratio between the hand-expanded polynomials of the reference instance
/// and the dot-product closure, row by row. The expanded legs 1 and 2 carry
/// a common factor `2√2` coming from `cos(π/4) = sin(π/4) = 1/√2`.
pub const EXPANDED_ROW_SCALE: [f64; 3] = [2.0 * SQRT_2, 2.0 * SQRT_2, 1.0];

/// Joint axes `u_i`, intermediate axes `w_i` and platform axes `v_i`,
/// expressed in the base frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVectorSet {
    pub u: [Vector3<f64>; 3],
    pub w: [Vector3<f64>; 3],
    pub v: [Vector3<f64>; 3],
}

/// Per-leg constant factors of the chained rotations.
pub(crate) struct Leg {
    /// `R_z(η_i) R_x(β₁ − π)`
    pub base: Matrix3<f64>,
    /// `R_x(α₁,ᵢ) z`
    pub proximal: Vector3<f64>,
    /// `R_z(η_i) R_x(−β₂) z`
    pub platform: Vector3<f64>,
    pub cos_alpha2: f64,
}

pub(crate) fn legs(p: &DesignParameters) -> [Leg; 3] {
    std::array::from_fn(|i| Leg {
        base: rot(Axis::Z, p.eta[i]) * rot(Axis::X, p.beta1 - PI),
        proximal: rot(Axis::X, p.alpha1[i]) * Vector3::z(),
        platform: rot(Axis::Z, p.eta[i]) * rot(Axis::X, -p.beta2) * Vector3::z(),
        cos_alpha2: p.alpha2[i].cos(),
    })
}

pub fn unit_vectors(p: &DesignParameters, theta: &JointVector, chi: &Orientation) -> UnitVectorSet {
    let legs = legs(p);
    let r = zyx(&chi.0);
    UnitVectorSet {
        u: std::array::from_fn(|i| legs[i].base * Vector3::z()),
        w: std::array::from_fn(|i| legs[i].base * rot(Axis::Z, theta.0[i]) * legs[i].proximal),
        v: std::array::from_fn(|i| r * legs[i].platform),
    }
}

/// Kinematic closure `f_i = w_iᵀ(θ_i) v_i(χ) − cos α₂,ᵢ`; zero on every
/// assembled configuration.
pub fn closure(p: &DesignParameters, theta: &JointVector, chi: &Orientation) -> Vector3<f64> {
    let legs = legs(p);
    let uv = unit_vectors(p, theta, chi);
    Vector3::from_fn(|i, _| uv.w[i].dot(&uv.v[i]) - legs[i].cos_alpha2)
}

/// The closure of the reference instance in fully expanded trigonometric
/// form. Rows equal [`closure`] times [`EXPANDED_ROW_SCALE`].
pub fn closure_expanded(theta: &JointVector, chi: &Orientation) -> Vector3<f64> {
    let [x1, x2, x3] = [chi.0[0].cos(), chi.0[1].cos(), chi.0[2].cos()];
    let [y1, y2, y3] = [chi.0[0].sin(), chi.0[1].sin(), chi.0[2].sin()];
    let (s1, c1) = theta.0[0].sin_cos();
    let (s2, c2) = theta.0[1].sin_cos();
    let (s3, c3) = theta.0[2].sin_cos();
    let r2 = SQRT_2;

    let f1 = -c1 * x3 * y2 * y1 + s1 * x3 * y2 * y1 + c1 * y3 * y2 * y1 + s1 * y3 * y2 * y1
        - x2 * y1 * r2
        + c1 * x3 * x1
        + s1 * x3 * x1
        + c1 * y3 * x1
        - s1 * y3 * x1
        + c1 * x3 * x2
        - s1 * x3 * x2
        - c1 * y3 * x2
        - s1 * y3 * x2
        - y2 * r2;
    let f2 = c2 * x3 * y2 * y1 + s2 * x3 * y2 * y1 + c2 * y3 * y2 * y1
        - s2 * y3 * y2 * y1
        - x2 * y1 * r2
        + c2 * x3 * x1
        - s2 * x3 * x1
        - c2 * y3 * x1
        - s2 * y3 * x1
        + c2 * x3 * x2
        + s2 * x3 * x2
        + c2 * y3 * x2
        - s2 * y3 * x2
        + y2 * r2;
    let f3 = c3 * y1 * y2 * y3 + s3 * x3 * y1 * y2 + c3 * x1 * x3 - s3 * x1 * y3;
    Vector3::new(f1, f2, f3)
}

/// First-order kinematic maps at one pose.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KinematicMaps {
    /// `∂f/∂χ`
    pub j1: Matrix3<f64>,
    /// `∂f/∂θ`, diagonal.
    pub j2: Matrix3<f64>,
    /// `J = −J1⁻¹ J2`, so that `χ̇ = J θ̇`.
    pub j: Matrix3<f64>,
    /// Euler rate map `T(χ)`.
    pub t: Matrix3<f64>,
    pub cond1: f64,
    pub cond2: f64,
}

impl KinematicMaps {
    /// `J⁻¹ = −J2⁻¹ J1`, so that `θ̇ = J⁻¹ χ̇`.
    pub fn inverse_jacobian(&self) -> Matrix3<f64> {
        let d = self.j2.diagonal();
        let mut out = -self.j1;
        for i in 0..3 {
            out.row_mut(i).scale_mut(1.0 / d[i]);
        }
        out
    }
}

/// Raw analytic `(J1, J2)` with no singularity check.
pub fn jacobians_unchecked(
    p: &DesignParameters,
    theta: &JointVector,
    chi: &Orientation,
) -> (Matrix3<f64>, Matrix3<f64>) {
    let legs = legs(p);
    let c = &chi.0;
    let (rx, ry, rz) = (rot(Axis::X, c[0]), rot(Axis::Y, c[1]), rot(Axis::Z, c[2]));
    let dr = [
        rz * ry * drot(Axis::X, c[0]),
        rz * drot(Axis::Y, c[1]) * rx,
        drot(Axis::Z, c[2]) * ry * rx,
    ];
    let r = rz * ry * rx;

    let mut j1 = Matrix3::zeros();
    let mut j2 = Matrix3::zeros();
    for (i, leg) in legs.iter().enumerate() {
        let w = leg.base * rot(Axis::Z, theta.0[i]) * leg.proximal;
        let dw = leg.base * drot(Axis::Z, theta.0[i]) * leg.proximal;
        let v = r * leg.platform;
        for (k, d) in dr.iter().enumerate() {
            j1[(i, k)] = w.dot(&(d * leg.platform));
        }
        j2[(i, i)] = dw.dot(&v);
    }
    (j1, j2)
}

fn condition_number(m: &Matrix3<f64>) -> f64 {
    let sv = m.singular_values();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        sv.max() / min
    }
}

pub fn jacobians(
    p: &DesignParameters,
    theta: &JointVector,
    chi: &Orientation,
) -> Result<KinematicMaps> {
    let (j1, j2) = jacobians_unchecked(p, theta, chi);
    let det1 = j1.determinant();
    if det1.abs() < SINGULARITY_DET_THRESHOLD {
        return Err(Error::SingularJ1 { det: det1.abs() });
    }
    let det2 = j2.determinant();
    if det2.abs() < SINGULARITY_DET_THRESHOLD {
        return Err(Error::SingularJ2 { det: det2.abs() });
    }
    let j1_inv = j1
        .try_inverse()
        .ok_or(Error::SingularJ1 { det: det1.abs() })?;
    Ok(KinematicMaps {
        j1,
        j2,
        j: -(j1_inv * j2),
        t: super::euler_rate_map(chi),
        cond1: condition_number(&j1),
        cond2: condition_number(&j2),
    })
}
