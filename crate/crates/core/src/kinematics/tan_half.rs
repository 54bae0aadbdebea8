use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Wrap to `(−π, π]`.
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Componentwise `tan(a/2)`, after wrapping each angle to `(−π, π]`.
pub fn tan_half_forward(angles: &Vector3<f64>) -> Result<Vector3<f64>> {
    let mut out = Vector3::zeros();
    for (o, &a) in out.iter_mut().zip(angles.iter()) {
        let w = wrap_angle(a);
        if w == PI {
            return Err(Error::AngleAtBranchPoint { angle: a });
        }
        *o = (0.5 * w).tan();
    }
    Ok(out)
}

/// Componentwise `2·atan(t)`, landing in `(−π, π)`.
pub fn tan_half_inverse(t: &Vector3<f64>) -> Vector3<f64> {
    t.map(|v| 2.0 * v.atan())
}
