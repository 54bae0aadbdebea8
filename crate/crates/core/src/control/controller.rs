use nalgebra::Vector3;

use super::frequency::k0_continuous;
use super::zoh::{discretize_zoh, DiscreteStateSpace};
use super::ControllerCoefficients;
use crate::error::{Error, Result};
use crate::kinematics::{euler_rate_map, jacobians, DesignParameters, JointVector, Orientation};

/// `|cos χ₂|` below which `T(χ)` is treated as singular.
pub const SINGULAR_T_THRESHOLD: f64 = 1e-9;

/// Speed-loop controller: three identical discrete `K₀` filters followed by
/// the static map `J⁻¹(θ̂, χ̂)·T⁻¹(χ̂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Controller {
    filters: [DiscreteStateSpace; 3],
}

impl Controller {
    pub fn new(c: &ControllerCoefficients, te: f64) -> Result<Self> {
        let f = discretize_zoh(&k0_continuous(c), te)?;
        Ok(Controller {
            filters: [f.clone(), f.clone(), f],
        })
    }

    pub fn filter(&self, axis: usize) -> &DiscreteStateSpace {
        &self.filters[axis]
    }

    pub fn reset(&mut self) {
        for f in &mut self.filters {
            f.reset();
        }
    }

    /// Per-axis `K₀` output for the rate error, advancing the filters.
    pub fn filter_step(&mut self, eps_omega: &Vector3<f64>) -> Vector3<f64> {
        Vector3::from_fn(|i, _| self.filters[i].step(eps_omega[i]))
    }

    /// Commanded joint rates for the rate error `eps_omega`.
    ///
    /// The filters advance only when the pose admits the static map.
    pub fn step(
        &mut self,
        p: &DesignParameters,
        eps_omega: &Vector3<f64>,
        chi_hat: &Orientation,
        theta_hat: &JointVector,
    ) -> Result<Vector3<f64>> {
        let map = joint_rate_map(p, chi_hat, theta_hat)?;
        Ok(map * self.filter_step(eps_omega))
    }
}

/// `J⁻¹(θ, χ)·T⁻¹(χ)`: platform angular velocity to joint rates.
pub fn joint_rate_map(
    p: &DesignParameters,
    chi: &Orientation,
    theta: &JointVector,
) -> Result<nalgebra::Matrix3<f64>> {
    if chi.elevation().cos().abs() < SINGULAR_T_THRESHOLD {
        return Err(Error::SingularT {
            elevation: chi.elevation(),
        });
    }
    let t_inv = euler_rate_map(chi).try_inverse().ok_or(Error::SingularT {
        elevation: chi.elevation(),
    })?;
    let maps = jacobians(p, theta, chi)?;
    Ok(maps.inverse_jacobian() * t_inv)
}

/// Stateless form of one controller update, for callers that own the
/// controller state.
pub fn controller_step(
    controller: &mut Controller,
    p: &DesignParameters,
    eps_omega: &Vector3<f64>,
    chi_hat: &Orientation,
    theta_hat: &JointVector,
) -> Result<Vector3<f64>> {
    controller.step(p, eps_omega, chi_hat, theta_hat)
}
