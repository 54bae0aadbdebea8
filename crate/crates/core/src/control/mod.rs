//! Speed-loop control of the three actuated joints.
//!
//! The loop per axis is `K₀(s)` followed by the closed actuator loop
//! `H_m(s) = 1/(1 + τ_m s)` and a one-sample gyro delay. The controller runs
//! at the sample period `T_e` as a zero-order-hold discretization of `K₀`.

mod controller;
mod frequency;
mod tf;
mod zoh;

use serde::{Deserialize, Serialize};

pub use controller::{controller_step, joint_rate_map, Controller, SINGULAR_T_THRESHOLD};
pub use frequency::{
    actuator_tf, disturbance_of, disturbance_transfer, gain_margin_of, hz, k0_continuous, margins,
    margins_of, open_loop_response, phase_margin_of, sweep, write_frequency_csv, FrequencyPoint,
    LoopModel, Margins, SEARCH_BAND, SEARCH_SEEDS,
};
pub use tf::{poly_eval, poly_mul, poly_roots, RationalTransferFunction};
pub use zoh::{balance, controllable_canonical, discretize_zoh, DiscreteStateSpace};

/// Default sample period, s.
pub const DEFAULT_SAMPLE_PERIOD: f64 = 1e-3;

/// Coefficients of `K₀(s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerCoefficients {
    pub k0bar: f64,
    /// Real zeros at `−a_i`, rad/s.
    pub a: [f64; 3],
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub d1: f64,
    pub c2: f64,
    pub d2: f64,
}

impl Default for ControllerCoefficients {
    fn default() -> Self {
        ControllerCoefficients {
            k0bar: 25884.0,
            a: [4644.0, 628.3, 52.97],
            b1: 7356.0,
            b2: 2.584e7,
            c1: 3.39e4,
            d1: 2.943e8,
            c2: 2899.0,
            d2: 2.169e7,
        }
    }
}

impl ControllerCoefficients {
    pub fn validate(&self) -> crate::Result<()> {
        let all = [
            self.k0bar, self.b1, self.b2, self.c1, self.d1, self.c2, self.d2,
        ];
        if all.iter().chain(&self.a).all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(crate::Error::InvalidInput(
                "controller coefficients must be finite".into(),
            ))
        }
    }
}

/// How the friction-equivalent input disturbance enters each actuator loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceMode {
    /// Constant `friction[k]` from t = 0.
    #[default]
    UnitStep,
    /// `−friction[k]·tanh(θ̇_k / 1e−4)`.
    Coulomb,
    /// No input disturbance.
    None,
}

/// Velocity scale of the smoothed sign in Coulomb mode, rad/s.
pub const COULOMB_SMOOTHING: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActuatorParameters {
    /// Time constant of the closed actuator loop, s.
    pub tau_m: f64,
    /// Per-axis input disturbance magnitude, in commanded-rate units.
    pub friction: [f64; 3],
    pub mode: DisturbanceMode,
}

impl Default for ActuatorParameters {
    fn default() -> Self {
        ActuatorParameters {
            tau_m: 1.6e-3,
            friction: [1.0; 3],
            mode: DisturbanceMode::UnitStep,
        }
    }
}

impl ActuatorParameters {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.tau_m > 0.0) || !self.tau_m.is_finite() {
            return Err(crate::Error::InvalidInput(format!(
                "tau_m must be positive, got {}",
                self.tau_m
            )));
        }
        if !self.friction.iter().all(|f| f.is_finite()) {
            return Err(crate::Error::InvalidInput("friction must be finite".into()));
        }
        Ok(())
    }

    /// Input disturbance on axis `k` at joint rate `theta_dot`.
    pub fn input_disturbance(&self, k: usize, theta_dot: f64) -> f64 {
        match self.mode {
            DisturbanceMode::UnitStep => self.friction[k],
            DisturbanceMode::Coulomb => -self.friction[k] * (theta_dot / COULOMB_SMOOTHING).tanh(),
            DisturbanceMode::None => 0.0,
        }
    }
}
