//! Kinematic self-checks run by `cospm check`.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kinematics::{
    closure, fgm, igm, jacobians, BranchPolicy, DesignParameters, JointVector, Orientation,
};
use crate::singularity::WorkspaceBox;

pub const CHECK_SEED: u64 = 0x5eed;
pub const HOME_TOLERANCE: f64 = 1e-12;
pub const COAXIALITY_TOLERANCE: f64 = 1e-12;
pub const COAXIALITY_SAMPLES: usize = 1000;
pub const ROUNDTRIP_TOLERANCE: f64 = 1e-9;
pub const ROUNDTRIP_GRID: usize = 50;
pub const JACOBIAN_TOLERANCE: f64 = 1e-5;
pub const JACOBIAN_SAMPLES: usize = 100;
/// Central-difference step on the joints, rad.
pub const JACOBIAN_FD_STEP: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    /// Worst observed error; infinite when a solve failed.
    pub worst: f64,
    pub tolerance: f64,
    pub note: Option<String>,
}

impl CheckOutcome {
    pub fn pass(&self) -> bool {
        self.worst < self.tolerance
    }

    fn failed(name: &'static str, tolerance: f64, note: String) -> Self {
        CheckOutcome {
            name,
            worst: f64::INFINITY,
            tolerance,
            note: Some(note),
        }
    }
}

pub fn home_closure(p: &DesignParameters) -> CheckOutcome {
    CheckOutcome {
        name: "closure at home",
        worst: closure(p, &JointVector::home(), &Orientation::zero()).amax(),
        tolerance: HOME_TOLERANCE,
        note: None,
    }
}

/// Turning every joint by ε moves the closure residual exactly like a
/// bearing change of ε.
pub fn coaxiality(p: &DesignParameters, samples: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let th = JointVector(Vector3::from_fn(|_, _| rng.random_range(-3.2..3.2)));
        let chi = Orientation::new(
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.5..1.5),
            rng.random_range(-3.2..3.2),
        );
        let e = rng.random_range(-3.2..3.2);
        let a = closure(p, &th.offset(e), &chi);
        let b = closure(p, &th, &chi.with_bearing(chi.bearing() + e));
        worst = worst.max((a - b).amax());
    }
    CheckOutcome {
        name: "coaxiality",
        worst,
        tolerance: COAXIALITY_TOLERANCE,
        note: None,
    }
}

/// IGM then FGM (seeded at the zero pose) on an `n × n` grid of `w`.
pub fn roundtrip(p: &DesignParameters, w: &WorkspaceBox, n: usize) -> CheckOutcome {
    const NAME: &str = "igm/fgm roundtrip";
    let seed = Orientation::new(0.0, 0.0, w.chi3);
    let mut worst: f64 = 0.0;
    for (c1, c2) in w.grid(n, n) {
        let chi = w.orientation(c1, c2);
        let back = igm(p, &chi, BranchPolicy::default()).and_then(|th| fgm(p, &th, &seed));
        match back {
            Ok(b) => worst = worst.max((b.0 - chi.0).amax()),
            Err(e) => {
                return CheckOutcome::failed(NAME, ROUNDTRIP_TOLERANCE, format!("{chi:?}: {e}"))
            }
        }
    }
    CheckOutcome {
        name: NAME,
        worst,
        tolerance: ROUNDTRIP_TOLERANCE,
        note: None,
    }
}

/// Analytic `J` against central differences of the FGM at random poses of `w`.
pub fn jacobian_fd(
    p: &DesignParameters,
    w: &WorkspaceBox,
    samples: usize,
    seed: u64,
) -> CheckOutcome {
    const NAME: &str = "jacobian vs finite differences";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let pick = |rng: &mut ChaCha8Rng, r: [f64; 2]| {
        if r[0] < r[1] {
            rng.random_range(r[0]..=r[1])
        } else {
            r[0]
        }
    };
    for _ in 0..samples {
        let chi = w.orientation(pick(&mut rng, w.chi1), pick(&mut rng, w.chi2));
        let res = igm(p, &chi, BranchPolicy::default()).and_then(|th| {
            let maps = jacobians(p, &th, &chi)?;
            let mut fd = Matrix3::zeros();
            for k in 0..3 {
                let mut plus = th;
                let mut minus = th;
                plus.0[k] += JACOBIAN_FD_STEP;
                minus.0[k] -= JACOBIAN_FD_STEP;
                let col =
                    (fgm(p, &plus, &chi)?.0 - fgm(p, &minus, &chi)?.0) / (2.0 * JACOBIAN_FD_STEP);
                fd.set_column(k, &col);
            }
            Ok((maps.j - fd).amax())
        });
        match res {
            Ok(e) => worst = worst.max(e),
            Err(e) => {
                return CheckOutcome::failed(NAME, JACOBIAN_TOLERANCE, format!("{chi:?}: {e}"))
            }
        }
    }
    CheckOutcome {
        name: NAME,
        worst,
        tolerance: JACOBIAN_TOLERANCE,
        note: None,
    }
}

pub fn run_all(p: &DesignParameters, w: &WorkspaceBox) -> Vec<CheckOutcome> {
    vec![
        home_closure(p),
        coaxiality(p, COAXIALITY_SAMPLES, CHECK_SEED),
        roundtrip(p, w, ROUNDTRIP_GRID),
        jacobian_fd(p, w, JACOBIAN_SAMPLES, CHECK_SEED),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_design_passes_everything() {
        let p = DesignParameters::reference();
        let out = run_all(&p, &WorkspaceBox::prescribed());
        for o in &out {
            assert!(o.pass(), "{o:?}");
        }
    }

    #[test]
    fn offset_inner_platform_breaks_coaxiality() {
        let p = DesignParameters {
            beta1: 0.3,
            ..DesignParameters::reference()
        };
        assert!(!coaxiality(&p, 100, 1).pass());
    }

    #[test]
    fn unreachable_box_fails_roundtrip() {
        let p = DesignParameters::reference();
        let w = WorkspaceBox::new([-0.1, 0.1], [1.4, std::f64::consts::FRAC_PI_2], 0.0).unwrap();
        let o = roundtrip(&p, &w, 5);
        assert!(!o.pass());
        assert!(o.note.is_some());
    }
}
