use super::geometry::{closure, jacobians_unchecked, SINGULARITY_DET_THRESHOLD};
use super::{DesignParameters, JointVector, Orientation};
use crate::error::{Error, Result};

/// Convergence threshold on `‖f‖∞`.
pub const FGM_TOLERANCE: f64 = 1e-12;
pub const FGM_MAX_ITERATIONS: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FgmReport {
    pub orientation: Orientation,
    pub iterations: usize,
    pub residual: f64,
}

/// Forward geometric model by undamped Newton iteration on
/// `χ ↦ f(θ, χ)` from `seed`.
pub fn fgm(p: &DesignParameters, theta: &JointVector, seed: &Orientation) -> Result<Orientation> {
    fgm_with_report(p, theta, seed).map(|r| r.orientation)
}

pub fn fgm_with_report(
    p: &DesignParameters,
    theta: &JointVector,
    seed: &Orientation,
) -> Result<FgmReport> {
    let mut chi = *seed;
    let mut residual = f64::INFINITY;
    for iterations in 0..=FGM_MAX_ITERATIONS {
        let f = closure(p, theta, &chi);
        residual = if f.iter().all(|v| v.is_finite()) {
            f.amax()
        } else {
            f64::INFINITY
        };
        if residual < FGM_TOLERANCE {
            return Ok(FgmReport {
                orientation: chi,
                iterations,
                residual,
            });
        }
        if iterations == FGM_MAX_ITERATIONS || !residual.is_finite() {
            break;
        }
        let (j1, _) = jacobians_unchecked(p, theta, &chi);
        let det = j1.determinant();
        if det.abs() < SINGULARITY_DET_THRESHOLD {
            return Err(Error::SingularJ1 { det: det.abs() });
        }
        let step = j1
            .lu()
            .solve(&f)
            .ok_or(Error::SingularJ1 { det: det.abs() })?;
        chi.0 -= step;
    }
    Err(Error::NoConvergence {
        iterations: FGM_MAX_ITERATIONS,
        residual,
    })
}
