use std::io::Write;

use nalgebra::Vector3;

use super::PlantState;

pub const TRACE_HEADER: &str =
    "t,om1,om2,om3,eps1,eps2,eps3,epsw1,epsw2,epsw3,th1,th2,th3,dth1,dth2,dth3,chi1,chi2,chi3,dist1,dist2,dist3";

/// One row per sample on a uniform grid.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SimulationTrace {
    /// s
    pub t: Vec<f64>,
    /// Inertial angular velocity of the platform, platform frame, rad/s.
    pub omega: Vec<Vector3<f64>>,
    /// Residual, integral of the rate error, rad.
    pub eps: Vec<Vector3<f64>>,
    /// Rate error seen by the controller, rad/s.
    pub eps_omega: Vec<Vector3<f64>>,
    pub theta: Vec<Vector3<f64>>,
    pub theta_dot: Vec<Vector3<f64>>,
    pub chi: Vec<Vector3<f64>>,
    /// Carrier angular velocity contribution, platform frame, rad/s.
    pub carrier: Vec<Vector3<f64>>,
}

impl SimulationTrace {
    pub fn with_capacity(n: usize) -> Self {
        SimulationTrace {
            t: Vec::with_capacity(n),
            omega: Vec::with_capacity(n),
            eps: Vec::with_capacity(n),
            eps_omega: Vec::with_capacity(n),
            theta: Vec::with_capacity(n),
            theta_dot: Vec::with_capacity(n),
            chi: Vec::with_capacity(n),
            carrier: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub(crate) fn push(
        &mut self,
        t: f64,
        omega: &Vector3<f64>,
        eps: &Vector3<f64>,
        eps_omega: &Vector3<f64>,
        state: &PlantState,
        carrier: &Vector3<f64>,
    ) {
        self.t.push(t);
        self.omega.push(*omega);
        self.eps.push(*eps);
        self.eps_omega.push(*eps_omega);
        self.theta.push(state.theta.0);
        self.theta_dot.push(state.theta_dot);
        self.chi.push(state.chi.0);
        self.carrier.push(*carrier);
    }

    /// CSV with [`TRACE_HEADER`], 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{TRACE_HEADER}")?;
        for k in 0..self.len() {
            write!(out, "{:.16e}", self.t[k])?;
            for v in [
                &self.omega[k],
                &self.eps[k],
                &self.eps_omega[k],
                &self.theta[k],
                &self.theta_dot[k],
                &self.chi[k],
                &self.carrier[k],
            ] {
                for x in v.iter() {
                    write!(out, ",{x:.16e}")?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyStateMetrics {
    /// rad
    pub max_abs_residual: f64,
    /// rad/s
    pub max_abs_speed_error: f64,
    /// rad/s
    pub max_abs_joint_rate: f64,
}

/// Componentwise maxima over samples with `t ≥ t_start`.
pub fn steady_state_metrics(trace: &SimulationTrace, t_start: f64) -> SteadyStateMetrics {
    let mut m = SteadyStateMetrics {
        max_abs_residual: 0.0,
        max_abs_speed_error: 0.0,
        max_abs_joint_rate: 0.0,
    };
    for k in (0..trace.len()).filter(|&k| trace.t[k] >= t_start) {
        m.max_abs_residual = m.max_abs_residual.max(trace.eps[k].amax());
        m.max_abs_speed_error = m.max_abs_speed_error.max(trace.eps_omega[k].amax());
        m.max_abs_joint_rate = m.max_abs_joint_rate.max(trace.theta_dot[k].amax());
    }
    m
}
