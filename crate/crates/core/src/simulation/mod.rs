//! Discrete-time line-of-sight stabilization experiment.
//!
//! The carrier rolls and pitches; the speed loop drives the joints so that
//! the platform's inertial angular velocity stays at the reference. The
//! loop runs at `T_e` with a one-sample gyro delay, a ZOH-discretized
//! controller and a first-order actuator integrated by RK4 sub-steps. The
//! platform pose is re-solved from the joints every sample, so the trace
//! stays on the closure manifold.

mod trace;

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::control::{
    ActuatorParameters, Controller, ControllerCoefficients, DEFAULT_SAMPLE_PERIOD,
};
use crate::error::{Error, Result};
use crate::kinematics::{
    carrier_disturbance, closure, euler_rate_map, fgm, jacobians, DesignParameters, JointVector,
    Orientation,
};

pub use trace::{steady_state_metrics, SimulationTrace, SteadyStateMetrics, TRACE_HEADER};

/// Carrier attitude waves `ν_i(t) = ν̄_i cos(2π f_i t + φ_i)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisturbanceProfile {
    /// rad
    pub amplitude: [f64; 3],
    /// Hz
    pub frequency: [f64; 3],
    /// rad
    pub phase: [f64; 3],
}

impl Default for DisturbanceProfile {
    fn default() -> Self {
        let a = 10f64.to_radians();
        DisturbanceProfile {
            amplitude: [a, a, 0.0],
            frequency: [0.1, 0.075, 0.0],
            phase: [0.0; 3],
        }
    }
}

impl DisturbanceProfile {
    pub fn none() -> Self {
        DisturbanceProfile {
            amplitude: [0.0; 3],
            frequency: [0.0; 3],
            phase: [0.0; 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self
            .amplitude
            .iter()
            .chain(&self.frequency)
            .chain(&self.phase)
            .all(|v| v.is_finite());
        if !finite || self.frequency.iter().any(|f| *f < 0.0) {
            return Err(Error::InvalidInput(
                "disturbance frequencies must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// `(ν, ν̇)` at time `t`.
pub fn disturbance_at(profile: &DisturbanceProfile, t: f64) -> (Vector3<f64>, Vector3<f64>) {
    let mut nu = Vector3::zeros();
    let mut nu_dot = Vector3::zeros();
    for i in 0..3 {
        let w = 2.0 * PI * profile.frequency[i];
        let arg = w * t + profile.phase[i];
        nu[i] = profile.amplitude[i] * arg.cos();
        nu_dot[i] = -w * profile.amplitude[i] * arg.sin();
    }
    (nu, nu_dot)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    /// s
    pub duration: f64,
    /// Sample period, s.
    pub te: f64,
    pub design: DesignParameters,
    pub actuator: ActuatorParameters,
    pub controller: ControllerCoefficients,
    pub disturbance: DisturbanceProfile,
    /// Inertial angular velocity reference of the platform, rad/s.
    pub reference: Vector3<f64>,
    pub initial_chi: Orientation,
    pub initial_theta: JointVector,
    /// RK4 sub-steps per sample.
    pub substeps: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            duration: 30.0,
            te: DEFAULT_SAMPLE_PERIOD,
            design: DesignParameters::reference(),
            actuator: ActuatorParameters::default(),
            controller: ControllerCoefficients::default(),
            disturbance: DisturbanceProfile::default(),
            reference: Vector3::zeros(),
            initial_chi: Orientation::zero(),
            initial_theta: JointVector::home(),
            substeps: 10,
        }
    }
}

/// Largest closure residual accepted for the initial pose.
pub const INITIAL_CLOSURE_TOLERANCE: f64 = 1e-10;

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::InvalidInput(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if !(self.te > 0.0) || !self.te.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sample period must be positive, got {}",
                self.te
            )));
        }
        if self.substeps == 0 {
            return Err(Error::InvalidInput("substeps must be at least 1".into()));
        }
        self.design.validate()?;
        self.actuator.validate()?;
        self.controller.validate()?;
        self.disturbance.validate()?;
        let r = closure(&self.design, &self.initial_theta, &self.initial_chi).amax();
        if !(r < INITIAL_CLOSURE_TOLERANCE) {
            return Err(Error::InvalidInput(format!(
                "initial pose does not close (residual {r:e})"
            )));
        }
        Ok(())
    }

    /// Number of recorded samples, including t = 0.
    pub fn samples(&self) -> usize {
        (self.duration / self.te + 1e-9).floor() as usize + 1
    }
}

/// Joint-side state of the plant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlantState {
    pub theta: JointVector,
    pub theta_dot: Vector3<f64>,
    pub chi: Orientation,
}

/// Advances the actuators over `dt` with the command held, then re-solves
/// the platform orientation from the joints.
///
/// Each axis follows `θ̈ = (θ̇̄ + d − θ̇)/τ_m`, integrated by `substeps` RK4
/// steps.
pub fn plant_step(
    p: &DesignParameters,
    act: &ActuatorParameters,
    state: &mut PlantState,
    command: &Vector3<f64>,
    dt: f64,
    substeps: usize,
) -> Result<()> {
    let h = dt / substeps.max(1) as f64;
    let accel = |rate: &Vector3<f64>| {
        Vector3::from_fn(|k, _| {
            (command[k] + act.input_disturbance(k, rate[k]) - rate[k]) / act.tau_m
        })
    };
    let mut th = state.theta.0;
    let mut w = state.theta_dot;
    for _ in 0..substeps.max(1) {
        let a1 = accel(&w);
        let v1 = w;
        let w2 = w + a1 * (0.5 * h);
        let a2 = accel(&w2);
        let w3 = w + a2 * (0.5 * h);
        let a3 = accel(&w3);
        let w4 = w + a3 * h;
        let a4 = accel(&w4);
        th += (v1 + w2 * 2.0 + w3 * 2.0 + w4) * (h / 6.0);
        w += (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0);
    }
    let theta = JointVector(th);
    state.chi = fgm(p, &theta, &state.chi)?;
    state.theta = theta;
    state.theta_dot = w;
    Ok(())
}

/// Platform angular velocity relative to the carrier, platform frame.
fn relative_rate(p: &DesignParameters, s: &PlantState) -> Result<Vector3<f64>> {
    let maps = jacobians(p, &s.theta, &s.chi)?;
    Ok(euler_rate_map(&s.chi) * (maps.j * s.theta_dot))
}

/// Runs the experiment. Errors carry the failing sample index.
pub fn run(config: &SimulationConfig) -> Result<SimulationTrace> {
    config.validate()?;
    let p = &config.design;
    let n = config.samples();
    let mut controller = Controller::new(&config.controller, config.te)?;
    let mut state = PlantState {
        theta: config.initial_theta,
        theta_dot: Vector3::zeros(),
        chi: config.initial_chi,
    };
    let mut trace = SimulationTrace::with_capacity(n);
    let mut sensor = Vector3::zeros();
    let mut eps = Vector3::zeros();
    let mut prev_eps_omega: Option<Vector3<f64>> = None;

    for k in 0..n {
        let wrap = |e: Error| Error::Simulation {
            sample: k,
            source: Box::new(e),
        };
        let t = k as f64 * config.te;
        let (nu, nu_dot) = disturbance_at(&config.disturbance, t);
        let carrier = carrier_disturbance(&state.chi, &nu, &nu_dot);
        let omega = relative_rate(p, &state).map_err(wrap)? + carrier;

        let measured = sensor;
        sensor = omega;
        let eps_omega = config.reference - measured;
        if let Some(prev) = prev_eps_omega {
            eps += (prev + eps_omega) * (0.5 * config.te);
        }
        prev_eps_omega = Some(eps_omega);

        trace.push(t, &omega, &eps, &eps_omega, &state, &carrier);
        if k + 1 == n {
            break;
        }
        let command = controller
            .step(p, &eps_omega, &state.chi, &state.theta)
            .map_err(wrap)?;
        plant_step(
            p,
            &config.actuator,
            &mut state,
            &command,
            config.te,
            config.substeps,
        )
        .map_err(wrap)?;
    }
    Ok(trace)
}
