use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use super::tf::{poly_mul, RationalTransferFunction};
use super::{ActuatorParameters, ControllerCoefficients};
use crate::error::{Error, Result};

/// Lower and upper end of the margin search band, rad/s.
pub const SEARCH_BAND: (f64, f64) = (1e-2, 1e5);
pub const SEARCH_SEEDS: usize = 2000;
const BISECTION_RTOL: f64 = 1e-12;

/// `K₀(s) = K̄₀ (s² + b₁s + b₂)(s+a₁)(s+a₂)(s+a₃) / [s² (s² + c₁s + d₁)(s² + c₂s + d₂)]`
pub fn k0_continuous(c: &ControllerCoefficients) -> RationalTransferFunction {
    let mut num = vec![c.k0bar];
    num = poly_mul(&num, &[1.0, c.b1, c.b2]);
    for a in c.a {
        num = poly_mul(&num, &[1.0, a]);
    }
    let mut den = vec![1.0, 0.0, 0.0];
    den = poly_mul(&den, &[1.0, c.c1, c.d1]);
    den = poly_mul(&den, &[1.0, c.c2, c.d2]);
    RationalTransferFunction::new(num, den).expect("controller coefficients are finite")
}

/// Closed speed loop of one actuator, `1/(1 + τ_m s)`.
pub fn actuator_tf(act: &ActuatorParameters) -> Result<RationalTransferFunction> {
    if !(act.tau_m > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tau_m must be positive, got {}",
            act.tau_m
        )));
    }
    RationalTransferFunction::first_order_lag(1.0, act.tau_m)
}

/// A rational loop transfer function followed by a pure delay.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopModel {
    pub tf: RationalTransferFunction,
    /// s
    pub delay: f64,
}

impl LoopModel {
    /// `K₀(s) H_m(s) e^{−sT_e}`.
    pub fn open_loop(
        c: &ControllerCoefficients,
        act: &ActuatorParameters,
        te: f64,
    ) -> Result<Self> {
        Ok(LoopModel {
            tf: k0_continuous(c).series(&actuator_tf(act)?),
            delay: te,
        })
    }

    pub fn response(&self, omega: f64) -> Complex64 {
        self.tf.at_frequency(omega) * Complex64::from_polar(1.0, -omega * self.delay)
    }

    pub fn magnitude_db(&self, omega: f64) -> f64 {
        20.0 * self.response(omega).norm().log10()
    }

    /// Phase in degrees on the branch nearest `near`.
    fn phase_near(&self, omega: f64, near: f64) -> f64 {
        let p = self.response(omega).arg().to_degrees();
        p + 360.0 * ((near - p) / 360.0).round()
    }
}

pub fn open_loop_response(
    c: &ControllerCoefficients,
    act: &ActuatorParameters,
    te: f64,
    omega: f64,
) -> Result<Complex64> {
    Ok(LoopModel::open_loop(c, act, te)?.response(omega))
}

/// `D(jω) = e^{−jωT_e} / (1 + K₀H_m e^{−jωT_e})`: inertial rate error per
/// unit of carrier rate, on one axis.
pub fn disturbance_transfer(
    c: &ControllerCoefficients,
    act: &ActuatorParameters,
    te: f64,
    omega: f64,
) -> Result<Complex64> {
    let l = LoopModel::open_loop(c, act, te)?;
    Ok(disturbance_of(&l, omega))
}

pub fn disturbance_of(l: &LoopModel, omega: f64) -> Complex64 {
    Complex64::from_polar(1.0, -omega * l.delay) / (1.0 + l.response(omega))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyPoint {
    /// rad/s
    pub omega: f64,
    pub magnitude_db: f64,
    /// Unwrapped, continuous from the low end of the sweep.
    pub phase_deg: f64,
}

/// Log-spaced sweep of `f` with the phase unwrapped along the sweep.
pub fn sweep(f: impl Fn(f64) -> Complex64, lo: f64, hi: f64, n: usize) -> Vec<FrequencyPoint> {
    let mut out: Vec<FrequencyPoint> = Vec::with_capacity(n);
    let mut prev: Option<f64> = None;
    for k in 0..n {
        let omega = if n == 1 {
            lo
        } else {
            lo * (hi / lo).powf(k as f64 / (n - 1) as f64)
        };
        let g = f(omega);
        let raw = g.arg().to_degrees();
        let phase = match prev {
            None => raw,
            Some(p) => raw + 360.0 * ((p - raw) / 360.0).round(),
        };
        prev = Some(phase);
        out.push(FrequencyPoint {
            omega,
            magnitude_db: 20.0 * g.norm().log10(),
            phase_deg: phase,
        });
    }
    out
}

/// CSV with header `omega,magnitude_db,phase_deg`.
pub fn write_frequency_csv<W: Write>(points: &[FrequencyPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "omega,magnitude_db,phase_deg")?;
    for p in points {
        writeln!(
            out,
            "{:.17e},{:.17e},{:.17e}",
            p.omega, p.magnitude_db, p.phase_deg
        )?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Margins {
    pub gain_margin_db: f64,
    pub phase_margin_deg: f64,
    /// 0 dB crossover used for the phase margin, rad/s.
    pub gain_crossover: f64,
    /// −180° crossover used for the gain margin, rad/s.
    pub phase_crossover: f64,
}

fn seeds() -> Vec<f64> {
    let (lo, hi) = SEARCH_BAND;
    (0..SEARCH_SEEDS)
        .map(|k| lo * (hi / lo).powf(k as f64 / (SEARCH_SEEDS - 1) as f64))
        .collect()
}

fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let glo = g(lo);
    while (hi - lo) > BISECTION_RTOL * hi {
        let mid = (lo * hi).sqrt();
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Smallest phase margin over every 0 dB crossing in the search band.
pub fn phase_margin_of(l: &LoopModel) -> Result<(f64, f64)> {
    let w = seeds();
    let phases = sweep(|o| l.response(o), w[0], w[w.len() - 1], w.len());
    let mut best: Option<(f64, f64)> = None;
    for k in 0..w.len() - 1 {
        let (m0, m1) = (phases[k].magnitude_db, phases[k + 1].magnitude_db);
        if m0 == 0.0 || (m0 > 0.0) != (m1 > 0.0) {
            let wc = if m0 == 0.0 {
                w[k]
            } else {
                bisect(w[k], w[k + 1], |o| l.magnitude_db(o))
            };
            let ph = l.phase_near(wc, phases[k].phase_deg);
            // Distance to the nearest odd multiple of −180°.
            let pm = (ph + 180.0) - 360.0 * ((ph + 180.0) / 360.0).round();
            if best.is_none_or(|(b, _)| pm.abs() < b.abs()) {
                best = Some((pm, wc));
            }
        }
    }
    best.ok_or(Error::NoCrossing { what: "0 dB" })
}

/// Smallest gain margin over every −180° (mod 360°) crossing in the band.
pub fn gain_margin_of(l: &LoopModel) -> Result<(f64, f64)> {
    let w = seeds();
    let pts = sweep(|o| l.response(o), w[0], w[w.len() - 1], w.len());
    let mut best: Option<(f64, f64)> = None;
    for k in 0..w.len() - 1 {
        let (p0, p1) = (pts[k].phase_deg, pts[k + 1].phase_deg);
        // Crossing of any −180° + 360°·n line between the two seeds.
        let n0 = ((p0 + 180.0) / 360.0).floor();
        let n1 = ((p1 + 180.0) / 360.0).floor();
        if n0 == n1 {
            continue;
        }
        let target = -180.0 + 360.0 * n0.max(n1);
        let g = |o: f64| l.phase_near(o, p0) - target;
        let wc = bisect(w[k], w[k + 1], g);
        let gm = -l.magnitude_db(wc);
        if best.is_none_or(|(b, _)| gm < b) {
            best = Some((gm, wc));
        }
    }
    best.ok_or(Error::NoCrossing {
        what: "-180 degree",
    })
}

pub fn margins_of(l: &LoopModel) -> Result<Margins> {
    let (phase_margin_deg, gain_crossover) = phase_margin_of(l)?;
    let (gain_margin_db, phase_crossover) = gain_margin_of(l)?;
    Ok(Margins {
        gain_margin_db,
        phase_margin_deg,
        gain_crossover,
        phase_crossover,
    })
}

/// Gain and phase margins of `K₀(s) H_m(s) e^{−sT_e}`.
pub fn margins(c: &ControllerCoefficients, act: &ActuatorParameters, te: f64) -> Result<Margins> {
    margins_of(&LoopModel::open_loop(c, act, te)?)
}

/// `ω = 2πf`
pub fn hz(f: f64) -> f64 {
    2.0 * PI * f
}
