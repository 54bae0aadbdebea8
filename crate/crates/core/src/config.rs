//! Run configuration files.
//!
//! TOML with one table per concern. Angles are written in degrees (angular
//! rates in degrees per second) and converted to radians on load. Unknown
//! keys are rejected; missing keys take the reference values.

use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::control::{ActuatorParameters, ControllerCoefficients, DEFAULT_SAMPLE_PERIOD};
use crate::error::{Error, Result};
use crate::kinematics::{DesignParameters, JointVector, Orientation};
use crate::simulation::{DisturbanceProfile, SimulationConfig};
use crate::singularity::WorkspaceBox;

fn rad3(d: [f64; 3]) -> [f64; 3] {
    d.map(f64::to_radians)
}

fn deg3(r: [f64; 3]) -> [f64; 3] {
    r.map(f64::to_degrees)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignSection {
    pub alpha1: [f64; 3],
    pub alpha2: [f64; 3],
    pub eta: [f64; 3],
    pub beta1: f64,
    pub beta2: f64,
}

impl Default for DesignSection {
    fn default() -> Self {
        DesignSection {
            alpha1: [45.0, 45.0, 90.0],
            alpha2: [90.0, 90.0, 90.0],
            eta: [45.0, -45.0, 0.0],
            beta1: 0.0,
            beta2: 90.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkspaceSection {
    pub bank: [f64; 2],
    pub elevation: [f64; 2],
    pub bearing: f64,
    /// Certification grid step.
    pub step: f64,
    /// Type-1 scan resolution, nodes per axis.
    pub grid: [usize; 2],
}

impl Default for WorkspaceSection {
    fn default() -> Self {
        WorkspaceSection {
            bank: [-10.0, 10.0],
            elevation: [-50.0, 50.0],
            bearing: 0.0,
            step: 1.0,
            grid: [200, 200],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisturbanceSection {
    pub amplitude: [f64; 3],
    /// Hz
    pub frequency: [f64; 3],
    pub phase: [f64; 3],
}

impl Default for DisturbanceSection {
    fn default() -> Self {
        DisturbanceSection {
            amplitude: [10.0, 10.0, 0.0],
            frequency: [0.1, 0.075, 0.0],
            phase: [0.0; 3],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    /// s
    pub duration: f64,
    /// s
    pub sample_period: f64,
    pub substeps: usize,
    /// deg/s
    pub reference: [f64; 3],
    pub initial_chi: [f64; 3],
    pub initial_theta: [f64; 3],
    /// Start of the steady-state window, s.
    pub steady_state_from: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        SimulationSection {
            duration: 30.0,
            sample_period: DEFAULT_SAMPLE_PERIOD,
            substeps: 10,
            reference: [0.0; 3],
            initial_chi: [0.0; 3],
            initial_theta: [90.0; 3],
            steady_state_from: 15.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrequencySection {
    /// rad/s
    pub omega_min: f64,
    /// rad/s
    pub omega_max: f64,
    pub points: usize,
}

impl Default for FrequencySection {
    fn default() -> Self {
        FrequencySection {
            omega_min: 0.1,
            omega_max: 1e5,
            points: 500,
        }
    }
}

/// Everything one `cospm` invocation needs.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub design: DesignSection,
    pub workspace: WorkspaceSection,
    pub controller: ControllerCoefficients,
    pub actuator: ActuatorParameters,
    pub disturbance: DisturbanceSection,
    pub simulation: SimulationSection,
    pub frequency: FrequencySection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `path` or the reference configuration.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::default()),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration is always representable")
    }

    /// Checks that do not depend on a particular workflow.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if !(self.workspace.step > 0.0) {
            return bad("workspace.step must be positive");
        }
        if self.workspace.grid.iter().any(|&n| n < 2) {
            return bad("workspace.grid needs at least 2 nodes per axis");
        }
        let f = &self.frequency;
        if !(f.omega_min > 0.0 && f.omega_min < f.omega_max) || f.points < 2 {
            return bad("frequency grid needs 0 < omega_min < omega_max and at least 2 points");
        }
        if !(self.simulation.steady_state_from < self.simulation.duration) {
            return bad("simulation.steady_state_from must precede the end of the run");
        }
        self.design()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.workspace().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn design(&self) -> DesignParameters {
        let d = &self.design;
        DesignParameters {
            alpha1: rad3(d.alpha1),
            alpha2: rad3(d.alpha2),
            eta: rad3(d.eta),
            beta1: d.beta1.to_radians(),
            beta2: d.beta2.to_radians(),
        }
    }

    pub fn workspace(&self) -> Result<WorkspaceBox> {
        let w = &self.workspace;
        WorkspaceBox::new(
            w.bank.map(f64::to_radians),
            w.elevation.map(f64::to_radians),
            w.bearing.to_radians(),
        )
    }

    /// Certification step, rad.
    pub fn certification_step(&self) -> f64 {
        self.workspace.step.to_radians()
    }

    pub fn disturbance(&self) -> DisturbanceProfile {
        let d = &self.disturbance;
        DisturbanceProfile {
            amplitude: rad3(d.amplitude),
            frequency: d.frequency,
            phase: rad3(d.phase),
        }
    }

    pub fn simulation(&self) -> SimulationConfig {
        let s = &self.simulation;
        SimulationConfig {
            duration: s.duration,
            te: s.sample_period,
            design: self.design(),
            actuator: self.actuator,
            controller: self.controller,
            disturbance: self.disturbance(),
            reference: Vector3::from(rad3(s.reference)),
            initial_chi: Orientation(Vector3::from(rad3(s.initial_chi))),
            initial_theta: JointVector(Vector3::from(rad3(s.initial_theta))),
            substeps: s.substeps,
        }
    }

    /// Writes the degrees-based sections from radian-valued parameters.
    pub fn set_design(&mut self, p: &DesignParameters) {
        self.design = DesignSection {
            alpha1: deg3(p.alpha1),
            alpha2: deg3(p.alpha2),
            eta: deg3(p.eta),
            beta1: p.beta1.to_degrees(),
            beta2: p.beta2.to_degrees(),
        };
    }
}
