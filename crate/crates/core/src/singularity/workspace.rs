use crate::error::{Error, Result};
use crate::kinematics::Orientation;

/// A rectangle in the (bank, elevation) plane at a fixed bearing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorkspaceBox {
    pub chi1: [f64; 2],
    pub chi2: [f64; 2],
    /// Representative bearing, rad.
    pub chi3: f64,
}

impl WorkspaceBox {
    pub fn new(chi1: [f64; 2], chi2: [f64; 2], chi3: f64) -> Result<Self> {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] <= r[1];
        if !ok(chi1) || !ok(chi2) || !chi3.is_finite() {
            return Err(Error::InvalidInput(format!(
                "workspace box bounds must be finite and ordered: {chi1:?} × {chi2:?}"
            )));
        }
        Ok(WorkspaceBox { chi1, chi2, chi3 })
    }

    /// Bank within ±10°, elevation within ±50°, bearing represented by 0.
    pub fn prescribed() -> Self {
        let b = 10f64.to_radians();
        let e = 50f64.to_radians();
        WorkspaceBox {
            chi1: [-b, b],
            chi2: [-e, e],
            chi3: 0.0,
        }
    }

    /// A box containing no orientation at all.
    pub fn empty() -> Self {
        WorkspaceBox {
            chi1: [1.0, -1.0],
            chi2: [1.0, -1.0],
            chi3: 0.0,
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.chi1[0] <= self.chi1[1] && self.chi2[0] <= self.chi2[1])
    }

    pub fn contains(&self, chi1: f64, chi2: f64) -> bool {
        self.chi1[0] <= chi1 && chi1 <= self.chi1[1] && self.chi2[0] <= chi2 && chi2 <= self.chi2[1]
    }

    pub fn with_chi3(&self, chi3: f64) -> Self {
        WorkspaceBox { chi3, ..*self }
    }

    pub fn orientation(&self, chi1: f64, chi2: f64) -> Orientation {
        Orientation::new(chi1, chi2, self.chi3)
    }

    /// Evenly spaced grid with `n1 × n2` nodes including every corner,
    /// elevation-major.
    pub fn grid(&self, n1: usize, n2: usize) -> Vec<(f64, f64)> {
        if self.is_empty() {
            return Vec::new();
        }
        let a = linspace(self.chi1, n1);
        let b = linspace(self.chi2, n2);
        b.iter()
            .flat_map(|&y| a.iter().map(move |&x| (x, y)))
            .collect()
    }

    /// Node counts per axis so that spacing never exceeds `step`.
    pub fn nodes_for_step(&self, step: f64) -> (usize, usize) {
        let n = |r: [f64; 2]| ((r[1] - r[0]) / step - 1e-9).ceil().max(0.0) as usize + 1;
        (n(self.chi1), n(self.chi2))
    }
}

impl Default for WorkspaceBox {
    fn default() -> Self {
        Self::prescribed()
    }
}

pub(crate) fn linspace(r: [f64; 2], n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (r[0] + r[1])],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    r[1]
                } else {
                    r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}
