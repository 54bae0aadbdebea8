use std::f64::consts::PI;

use nalgebra::Vector3;

use super::geometry::{closure, jacobians_unchecked};
use super::tan_half::wrap_angle;
use super::{DesignParameters, JointVector, Orientation};
use crate::error::{Error, Result};

/// `|a|` below which a leg quadratic is solved as a linear equation.
pub const DEGENERATE_COEFF: f64 = 1e-12;

/// `F_i(Θ_i) = a Θ_i² + b Θ_i + c` at fixed orientation, with only the
/// joint denominator `(1+Θ_i²)` cleared.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LegQuadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LegQuadratic {
    pub fn discriminant(&self) -> f64 {
        self.b * self.b - 4.0 * self.a * self.c
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.a * t + self.b) * t + self.c
    }
}

/// Fits each leg's quadratic exactly from three samples of the closure at
/// `Θ_i ∈ {0, 1, −1}`, i.e. `θ_i ∈ {0, π/2, −π/2}`.
pub fn quadratic_coefficients(p: &DesignParameters, chi: &Orientation) -> [LegQuadratic; 3] {
    use std::f64::consts::FRAC_PI_2;
    let f0 = closure(p, &JointVector::new(0.0, 0.0, 0.0), chi);
    // (1 + Θ²) = 2 at Θ = ±1
    let fp = 2.0 * closure(p, &JointVector(Vector3::repeat(FRAC_PI_2)), chi);
    let fm = 2.0 * closure(p, &JointVector(Vector3::repeat(-FRAC_PI_2)), chi);
    std::array::from_fn(|i| LegQuadratic {
        a: 0.5 * (fp[i] + fm[i]) - f0[i],
        b: 0.5 * (fp[i] - fm[i]),
        c: f0[i],
    })
}

/// Which of the two assembly modes of each leg to return.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BranchPolicy {
    /// Per leg, the root closest (modulo 2π) to the reference joint value.
    /// The result is unwrapped next to the reference.
    NearestTo(JointVector),
}

impl Default for BranchPolicy {
    fn default() -> Self {
        BranchPolicy::NearestTo(JointVector::home())
    }
}

fn candidate_angles(q: &LegQuadratic, leg: usize) -> Result<Vec<f64>> {
    if q.a.abs() < DEGENERATE_COEFF {
        if q.b.abs() < DEGENERATE_COEFF {
            return Err(Error::DegenerateQuadratic { leg });
        }
        // The vanishing leading coefficient is the root at Θ = ∞, i.e. θ = π.
        return Ok(vec![2.0 * (-q.c / q.b).atan(), PI]);
    }
    let disc = q.discriminant();
    if disc < 0.0 {
        return Err(Error::NoRealSolution {
            leg,
            discriminant: disc,
        });
    }
    let s = disc.sqrt();
    let qq = -0.5 * (q.b + q.b.signum() * s);
    let roots = if qq == 0.0 {
        // b = 0 and disc = 0 ⇒ c = 0: double root at the origin.
        [0.0, 0.0]
    } else {
        [qq / q.a, q.c / qq]
    };
    Ok(roots.iter().map(|t| 2.0 * t.atan()).collect())
}

/// Inverse geometric model: joint angles assembling the platform at `chi`.
pub fn igm(p: &DesignParameters, chi: &Orientation, branch: BranchPolicy) -> Result<JointVector> {
    let BranchPolicy::NearestTo(reference) = branch;
    let quads = quadratic_coefficients(p, chi);
    let mut theta = Vector3::zeros();
    for (leg, q) in quads.iter().enumerate() {
        let r = reference.0[leg];
        theta[leg] = candidate_angles(q, leg)?
            .into_iter()
            .map(|a| r + wrap_angle(a - r))
            .min_by(|a, b| (a - r).abs().total_cmp(&(b - r).abs()))
            .expect("at least one candidate");
    }
    let mut theta = JointVector(theta);
    polish(p, chi, &mut theta);
    Ok(theta)
}

// A couple of scalar Newton steps per leg to bring the closure residual
// down to rounding level after the tan-half round trip.
fn polish(p: &DesignParameters, chi: &Orientation, theta: &mut JointVector) {
    for _ in 0..3 {
        let f = closure(p, theta, chi);
        if f.amax() < 1e-15 {
            break;
        }
        let (_, j2) = jacobians_unchecked(p, theta, chi);
        for i in 0..3 {
            let d = j2[(i, i)];
            if d.abs() > 1e-8 {
                theta.0[i] -= f[i] / d;
            }
        }
    }
}
