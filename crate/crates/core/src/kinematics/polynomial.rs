//! The closure in tan-half coordinates, `X_j = tan(χ_j/2)` and
//! `Θ_i = tan(θ_i/2)`, with every Weierstrass denominator cleared:
//!
//! ```text
//! F_i(Θ_i, X) = (1+Θ_i²) (1+X₁²)(1+X₂²)(1+X₃²) f_i(θ, χ)
//! ```
//!
//! Each `F_i` is a polynomial, quadratic in `Θ_i` and of degree two in every
//! `X_j`. The multiplier is strictly positive, so `F_i` and `f_i` share sign
//! and zero set. Evaluation is generic over [`Scalar`] so the same code
//! yields point values and interval enclosures.

use std::f64::consts::PI;

use super::DesignParameters;
use crate::interval::{Interval, Scalar};

pub type Vec3<S> = [S; 3];
pub type Mat3<S> = [[S; 3]; 3];

fn c<S: Scalar>(v: f64) -> S {
    S::from_f64(v)
}

fn mat_mul<S: Scalar>(a: &Mat3<S>, b: &Mat3<S>) -> Mat3<S> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j])
    })
}

fn mat_vec<S: Scalar>(a: &Mat3<S>, v: &Vec3<S>) -> Vec3<S> {
    std::array::from_fn(|i| a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2])
}

fn dot<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn rot_x<S: Scalar>(a: S) -> Mat3<S> {
    let (s, co) = (a.sin(), a.cos());
    let (z, o) = (c(0.0), c(1.0));
    [[o, z, z], [z, co, -s], [z, s, co]]
}

fn rot_z<S: Scalar>(a: S) -> Mat3<S> {
    let (s, co) = (a.sin(), a.cos());
    let (z, o) = (c(0.0), c(1.0));
    [[co, -s, z], [s, co, z], [z, z, o]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ax {
    X,
    Y,
    Z,
}

/// `(1+t²)·R(2·atan t)` and its first two derivatives in `t`.
fn rot_tilde<S: Scalar>(axis: Ax, t: S, order: u8) -> Mat3<S> {
    let z = c::<S>(0.0);
    let two = c::<S>(2.0);
    // (1+t², 1−t², 2t) and derivatives
    let (p, m, d) = match order {
        0 => (c::<S>(1.0) + t.sqr(), c::<S>(1.0) - t.sqr(), two * t),
        1 => (two * t, -(two * t), two),
        2 => (two, -two, z),
        _ => (z, z, z),
    };
    match axis {
        Ax::X => [[p, z, z], [z, m, -d], [z, d, m]],
        Ax::Y => [[m, z, d], [z, p, z], [-d, z, m]],
        Ax::Z => [[m, -d, z], [d, m, z], [z, z, p]],
    }
}

/// `d^order/dt^order (1+t²)`
fn weight<S: Scalar>(t: S, order: u8) -> S {
    match order {
        0 => c::<S>(1.0) + t.sqr(),
        1 => c::<S>(2.0) * t,
        2 => c(2.0),
        _ => c(0.0),
    }
}

#[derive(Clone, Copy, Debug)]
struct PolyLeg<S> {
    base: Mat3<S>,
    proximal: Vec3<S>,
    platform: Vec3<S>,
    cos_alpha2: S,
}

/// Quadratic coefficients of one leg in its joint variable `Θ_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaQuadratic<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

/// The polynomial system `F(Θ, X)` of one manipulator.
#[derive(Clone, Copy, Debug)]
pub struct PolynomialSystem<S> {
    legs: [PolyLeg<S>; 3],
}

impl<S: Scalar> PolynomialSystem<S> {
    fn build(p: &DesignParameters, lift: impl Fn(f64) -> S) -> Self {
        let ez: Vec3<S> = [c(0.0), c(0.0), c(1.0)];
        let legs = std::array::from_fn(|i| {
            let rz_eta = rot_z(lift(p.eta[i]));
            PolyLeg {
                base: mat_mul(&rz_eta, &rot_x(lift(p.beta1) - c(PI))),
                proximal: mat_vec(&rot_x(lift(p.alpha1[i])), &ez),
                platform: mat_vec(&mat_mul(&rz_eta, &rot_x(-lift(p.beta2))), &ez),
                cos_alpha2: lift(p.alpha2[i]).cos(),
            }
        });
        PolynomialSystem { legs }
    }

    /// Derivative of `F_i` of multi-order `orders` in `(X₁, X₂, X₃)`.
    fn leg_derivative(&self, i: usize, theta: S, x: &Vec3<S>, orders: [u8; 3]) -> S {
        self.leg_term(i, rot_tilde(Ax::Z, theta, 0), weight(theta, 0), x, orders)
    }

    /// Same with the joint given as an angle and `(1+Θ_i²)` divided out,
    /// differentiated `joint_order` times in `θ_i`.
    fn leg_derivative_angle(
        &self,
        i: usize,
        theta: S,
        joint_order: u8,
        x: &Vec3<S>,
        orders: [u8; 3],
    ) -> S {
        let (s, co) = (theta.sin(), theta.cos());
        let (z, o) = (c::<S>(0.0), c::<S>(1.0));
        let (r, w) = match joint_order {
            0 => ([[co, -s, z], [s, co, z], [z, z, o]], o),
            _ => ([[-s, -co, z], [co, -s, z], [z, z, z]], z),
        };
        self.leg_term(i, r, w, x, orders)
    }

    fn leg_term(
        &self,
        i: usize,
        joint: Mat3<S>,
        joint_weight: S,
        x: &Vec3<S>,
        orders: [u8; 3],
    ) -> S {
        let leg = &self.legs[i];
        let w = mat_vec(&leg.base, &mat_vec(&joint, &leg.proximal));
        let m = mat_mul(
            &rot_tilde(Ax::Z, x[2], orders[2]),
            &mat_mul(
                &rot_tilde(Ax::Y, x[1], orders[1]),
                &rot_tilde(Ax::X, x[0], orders[0]),
            ),
        );
        let v = mat_vec(&m, &leg.platform);
        let scale = joint_weight
            * weight(x[0], orders[0])
            * weight(x[1], orders[1])
            * weight(x[2], orders[2]);
        dot(&w, &v) - leg.cos_alpha2 * scale
    }

    /// `F_i / (1+Θ_i²)` with joints given as angles `θ`: polynomial in `X`,
    /// trigonometric in `θ`, same zero set as [`Self::value`].
    pub fn value_angle(&self, theta: &Vec3<S>, x: &Vec3<S>) -> Vec3<S> {
        std::array::from_fn(|i| self.leg_derivative_angle(i, theta[i], 0, x, [0, 0, 0]))
    }

    /// Diagonal of `∂/∂θ` of [`Self::value_angle`].
    pub fn joint_derivative_angle(&self, theta: &Vec3<S>, x: &Vec3<S>) -> Vec3<S> {
        std::array::from_fn(|i| self.leg_derivative_angle(i, theta[i], 1, x, [0, 0, 0]))
    }

    pub fn jacobian_x_angle(&self, theta: &Vec3<S>, x: &Vec3<S>) -> Mat3<S> {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut o = [0u8; 3];
                o[j] = 1;
                self.leg_derivative_angle(i, theta[i], 0, x, o)
            })
        })
    }

    pub fn hessian_x_angle(&self, theta: &Vec3<S>, x: &Vec3<S>) -> [Mat3<S>; 3] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                std::array::from_fn(|k| {
                    let mut o = [0u8; 3];
                    o[j] += 1;
                    o[k] += 1;
                    self.leg_derivative_angle(i, theta[i], 0, x, o)
                })
            })
        })
    }

    pub fn value(&self, theta: &Vec3<S>, x: &Vec3<S>) -> Vec3<S> {
        std::array::from_fn(|i| self.leg_derivative(i, theta[i], x, [0, 0, 0]))
    }

    /// `∂F/∂X`, rows indexed by leg.
    pub fn jacobian_x(&self, theta: &Vec3<S>, x: &Vec3<S>) -> Mat3<S> {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut o = [0u8; 3];
                o[j] = 1;
                self.leg_derivative(i, theta[i], x, o)
            })
        })
    }

    /// `∂²F_i/∂X_j∂X_k`, indexed `[i][j][k]`.
    pub fn hessian_x(&self, theta: &Vec3<S>, x: &Vec3<S>) -> [Mat3<S>; 3] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                std::array::from_fn(|k| {
                    let mut o = [0u8; 3];
                    o[j] += 1;
                    o[k] += 1;
                    self.leg_derivative(i, theta[i], x, o)
                })
            })
        })
    }

    /// Coefficients of `F_i = a Θ_i² + b Θ_i + c` at fixed `X`.
    pub fn theta_coefficients(&self, x: &Vec3<S>) -> [ThetaQuadratic<S>; 3] {
        std::array::from_fn(|i| {
            let at = |t: f64| self.leg_derivative(i, c(t), x, [0, 0, 0]);
            let (f0, fp, fm) = (at(0.0), at(1.0), at(-1.0));
            let half = c::<S>(0.5);
            let b = half * (fp - fm);
            ThetaQuadratic {
                a: half * (fp + fm) - f0,
                b,
                c: f0,
            }
        })
    }
}

impl PolynomialSystem<f64> {
    pub fn new(p: &DesignParameters) -> Self {
        Self::build(p, |a| a)
    }
}

impl PolynomialSystem<Interval> {
    /// Every design angle replaced by `[a − radius, a + radius]`.
    pub fn with_parameter_radius(p: &DesignParameters, radius: f64) -> Self {
        Self::build(p, |a| Interval::centered(a, radius))
    }
}
