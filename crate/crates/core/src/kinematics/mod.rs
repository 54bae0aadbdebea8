//! Geometric and first-order kinematic model of the coaxial 3-RRR SPM.
//!
//! Angles are radians everywhere and stored unwrapped, so an unlimited
//! bearing excursion stays representable. Wrapping happens only when
//! converting to tan-half coordinates.

mod fgm;
mod geometry;
mod igm;
pub mod polynomial;
mod rates;
mod rotation;
mod tan_half;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fgm::{fgm, fgm_with_report, FgmReport, FGM_MAX_ITERATIONS, FGM_TOLERANCE};
pub use geometry::{
    closure, closure_expanded, jacobians, jacobians_unchecked, unit_vectors, KinematicMaps,
    UnitVectorSet, EXPANDED_ROW_SCALE, SINGULARITY_DET_THRESHOLD,
};
pub use igm::{igm, quadratic_coefficients, BranchPolicy, LegQuadratic, DEGENERATE_COEFF};
pub use rates::{carrier_disturbance, disturbance_rate_map, euler_rate_map, platform_velocity};
pub use rotation::{elementary_rotation, Axis};
pub use tan_half::{tan_half_forward, tan_half_inverse};

/// The nine link and platform angles defining one manipulator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignParameters {
    /// Proximal link angles `∠(u_i, w_i)`.
    pub alpha1: [f64; 3],
    /// Distal link angles `∠(w_i, v_i)`.
    pub alpha2: [f64; 3],
    /// Pivot disposition angles `∠(y⋆, v_i)`.
    pub eta: [f64; 3],
    /// Inner platform geometry; zero for coaxial input shafts.
    pub beta1: f64,
    /// Upper platform geometry `∠(z⋆, v_i)`.
    pub beta2: f64,
}

impl DesignParameters {
    /// The asymmetric coaxial instance studied throughout this crate.
    pub fn reference() -> Self {
        DesignParameters {
            alpha1: [FRAC_PI_4, FRAC_PI_4, FRAC_PI_2],
            alpha2: [FRAC_PI_2, FRAC_PI_2, FRAC_PI_2],
            eta: [FRAC_PI_4, -FRAC_PI_4, 0.0],
            beta1: 0.0,
            beta2: FRAC_PI_2,
        }
    }

    pub fn is_coaxial(&self) -> bool {
        self.beta1 == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let all = self
            .alpha1
            .iter()
            .chain(&self.alpha2)
            .chain(&self.eta)
            .chain([&self.beta1, &self.beta2]);
        if all.into_iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("design angles must be finite".into()));
        }
        for (i, (&a1, &a2)) in self.alpha1.iter().zip(&self.alpha2).enumerate() {
            if !(a1 > 0.0 && a1 < PI && a2 > 0.0 && a2 < PI) {
                return Err(Error::InvalidInput(format!(
                    "leg {}: link angles must lie in (0, π), got ({a1}, {a2})",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

impl Default for DesignParameters {
    fn default() -> Self {
        Self::reference()
    }
}

/// Platform orientation as ZYX Tait-Bryan angles: bank `χ₁` about x,
/// elevation `χ₂` about y, bearing `χ₃` about z.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Orientation(pub Vector3<f64>);

impl Orientation {
    pub fn new(bank: f64, elevation: f64, bearing: f64) -> Self {
        Orientation(Vector3::new(bank, elevation, bearing))
    }

    pub fn zero() -> Self {
        Orientation(Vector3::zeros())
    }

    pub fn bank(&self) -> f64 {
        self.0[0]
    }

    pub fn elevation(&self) -> f64 {
        self.0[1]
    }

    pub fn bearing(&self) -> f64 {
        self.0[2]
    }

    pub fn with_bearing(&self, bearing: f64) -> Self {
        Orientation::new(self.bank(), self.elevation(), bearing)
    }
}

impl From<[f64; 3]> for Orientation {
    fn from(v: [f64; 3]) -> Self {
        Orientation(Vector3::from(v))
    }
}

/// Actuated joint angles `θ`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct JointVector(pub Vector3<f64>);

impl JointVector {
    pub fn new(t1: f64, t2: f64, t3: f64) -> Self {
        JointVector(Vector3::new(t1, t2, t3))
    }

    /// Home configuration `θ = π/2·1`.
    pub fn home() -> Self {
        JointVector(Vector3::repeat(FRAC_PI_2))
    }

    /// Shift every joint by the same amount.
    pub fn offset(&self, delta: f64) -> Self {
        JointVector(self.0.add_scalar(delta))
    }
}

impl From<[f64; 3]> for JointVector {
    fn from(v: [f64; 3]) -> Self {
        JointVector(Vector3::from(v))
    }
}
