//! C ABI over `cospm`.
//!
//! Every fallible call returns a [`CospmStatus`]. On failure, the message
//! of the most recent error on the calling thread is available from
//! [`cospm_last_error_message`]. Handles are opaque and owned by the caller,
//! who releases them with the matching `*_free` function. Angles are radians.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cospm::control::{margins, ActuatorParameters, ControllerCoefficients, DisturbanceMode};
use cospm::kinematics::{closure, fgm, igm, jacobians, BranchPolicy};
use cospm::simulation::{
    run, steady_state_metrics, DisturbanceProfile, SimulationConfig, SimulationTrace,
};
use cospm::singularity::{certify_workspace, WorkspaceBox};
use cospm::{DesignParameters, Error, JointVector, Orientation};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CospmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    NoRealSolution = 3,
    NoConvergence = 4,
    Singular = 5,
    NoCrossing = 6,
    Simulation = 7,
    Io = 8,
    OutOfRange = 9,
    Panic = 10,
}

/// Manipulator geometry.
pub struct CospmDesign(DesignParameters);

/// A completed simulation run.
pub struct CospmTrace(SimulationTrace);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct CospmCertification {
    pub all_pass: bool,
    pub tested: usize,
    pub failures: usize,
    pub leaves: usize,
    pub max_h: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct CospmMargins {
    pub gain_margin_db: f64,
    pub phase_margin_deg: f64,
    /// rad/s
    pub gain_crossover: f64,
    /// rad/s
    pub phase_crossover: f64,
}

/// Constant friction-equivalent step on every actuator input.
pub const COSPM_MODE_UNIT_STEP: u32 = 0;
/// Smoothed Coulomb friction opposing the joint rate.
pub const COSPM_MODE_COULOMB: u32 = 1;
/// No actuator input disturbance.
pub const COSPM_MODE_NONE: u32 = 2;

/// Closed-loop run settings; controller coefficients are the reference ones.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct CospmSimulationOptions {
    pub duration: f64,
    pub sample_period: f64,
    pub substeps: u32,
    pub wave_amplitude: [f64; 3],
    /// Hz
    pub wave_frequency: [f64; 3],
    pub wave_phase: [f64; 3],
    pub tau_m: f64,
    pub friction: [f64; 3],
    /// One of the `COSPM_MODE_*` constants.
    pub mode: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct CospmSample {
    pub t: f64,
    pub omega: [f64; 3],
    pub eps: [f64; 3],
    pub eps_omega: [f64; 3],
    pub theta: [f64; 3],
    pub theta_dot: [f64; 3],
    pub chi: [f64; 3],
    pub carrier: [f64; 3],
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct CospmSteadyState {
    pub max_abs_residual: f64,
    pub max_abs_speed_error: f64,
    pub max_abs_joint_rate: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CospmStatus {
    match e {
        Error::InvalidInput(_) | Error::Config(_) | Error::AngleAtBranchPoint { .. } => {
            CospmStatus::InvalidInput
        }
        Error::NoRealSolution { .. } | Error::DegenerateQuadratic { .. } => {
            CospmStatus::NoRealSolution
        }
        Error::NoConvergence { .. } => CospmStatus::NoConvergence,
        Error::SingularJ1 { .. }
        | Error::SingularJ2 { .. }
        | Error::SingularT { .. }
        | Error::SingularJacobianAtCenter => CospmStatus::Singular,
        Error::NoCrossing { .. } => CospmStatus::NoCrossing,
        Error::Simulation { .. } => CospmStatus::Simulation,
        Error::Io(_) => CospmStatus::Io,
    }
}

struct Fail(CospmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(CospmStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CospmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CospmStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside cospm".into());
            CospmStatus::Panic
        }
    }
}

unsafe fn read3(p: *const f64, what: &str) -> Result<[f64; 3], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok([*p, *p.add(1), *p.add(2)])
}

unsafe fn write_slice(p: *mut f64, v: &[f64], what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    ptr::copy_nonoverlapping(v.as_ptr(), p, v.len());
    Ok(())
}

unsafe fn design_ref<'a>(d: *const CospmDesign) -> Result<&'a DesignParameters, Fail> {
    d.as_ref().map(|d| &d.0).ok_or_else(|| null("design"))
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cospm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn cospm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The reference coaxial design.
#[no_mangle]
pub extern "C" fn cospm_design_new_reference() -> *mut CospmDesign {
    Box::into_raw(Box::new(CospmDesign(DesignParameters::reference())))
}

/// A design from its nine angles, each array holding three values.
///
/// # Safety
/// Array pointers must reference three readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cospm_design_new(
    alpha1: *const f64,
    alpha2: *const f64,
    eta: *const f64,
    beta1: f64,
    beta2: f64,
    out: *mut *mut CospmDesign,
) -> CospmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = DesignParameters {
            alpha1: read3(alpha1, "alpha1")?,
            alpha2: read3(alpha2, "alpha2")?,
            eta: read3(eta, "eta")?,
            beta1,
            beta2,
        };
        p.validate()?;
        *out = Box::into_raw(Box::new(CospmDesign(p)));
        Ok(())
    })
}

/// # Safety
/// `design` must come from a `cospm_design_new*` call and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn cospm_design_free(design: *mut CospmDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

/// Closure residual `f(θ, χ)`.
///
/// # Safety
/// `theta`, `chi` and `out` must each reference three doubles.
#[no_mangle]
pub unsafe extern "C" fn cospm_closure(
    design: *const CospmDesign,
    theta: *const f64,
    chi: *const f64,
    out: *mut f64,
) -> CospmStatus {
    guard(|| {
        let p = design_ref(design)?;
        let [t1, t2, t3] = read3(theta, "theta")?;
        let [c1, c2, c3] = read3(chi, "chi")?;
        let f = closure(
            p,
            &JointVector::new(t1, t2, t3),
            &Orientation::new(c1, c2, c3),
        );
        write_slice(out, f.as_slice(), "out")
    })
}

/// Inverse geometric model. `reference` selects, per leg, the root nearest
/// to it; NULL means the home joints.
///
/// # Safety
/// `chi` and `theta_out` must reference three doubles; `reference` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn cospm_igm(
    design: *const CospmDesign,
    chi: *const f64,
    reference: *const f64,
    theta_out: *mut f64,
) -> CospmStatus {
    guard(|| {
        let p = design_ref(design)?;
        let [c1, c2, c3] = read3(chi, "chi")?;
        let r = if reference.is_null() {
            JointVector::home()
        } else {
            let [a, b, c] = read3(reference, "reference")?;
            JointVector::new(a, b, c)
        };
        let th = igm(p, &Orientation::new(c1, c2, c3), BranchPolicy::NearestTo(r))?;
        write_slice(theta_out, th.0.as_slice(), "theta_out")
    })
}

/// Forward geometric model by Newton iteration from `seed`.
///
/// # Safety
/// `theta`, `seed` and `chi_out` must reference three doubles.
#[no_mangle]
pub unsafe extern "C" fn cospm_fgm(
    design: *const CospmDesign,
    theta: *const f64,
    seed: *const f64,
    chi_out: *mut f64,
) -> CospmStatus {
    guard(|| {
        let p = design_ref(design)?;
        let [t1, t2, t3] = read3(theta, "theta")?;
        let [s1, s2, s3] = read3(seed, "seed")?;
        let chi = fgm(
            p,
            &JointVector::new(t1, t2, t3),
            &Orientation::new(s1, s2, s3),
        )?;
        write_slice(chi_out, chi.0.as_slice(), "chi_out")
    })
}

/// `J` with `χ̇ = J θ̇`, written row-major into nine doubles.
///
/// # Safety
/// `theta` and `chi` must reference three doubles, `j_out` nine.
#[no_mangle]
pub unsafe extern "C" fn cospm_jacobian(
    design: *const CospmDesign,
    theta: *const f64,
    chi: *const f64,
    j_out: *mut f64,
) -> CospmStatus {
    guard(|| {
        let p = design_ref(design)?;
        let [t1, t2, t3] = read3(theta, "theta")?;
        let [c1, c2, c3] = read3(chi, "chi")?;
        let j = jacobians(
            p,
            &JointVector::new(t1, t2, t3),
            &Orientation::new(c1, c2, c3),
        )?
        .j;
        let rows: Vec<f64> = j.transpose().iter().copied().collect();
        write_slice(j_out, &rows, "j_out")
    })
}

/// Kantorovich certification of a bank × elevation box at bearing 0.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cospm_certify_workspace(
    design: *const CospmDesign,
    bank_min: f64,
    bank_max: f64,
    elevation_min: f64,
    elevation_max: f64,
    step: f64,
    out: *mut CospmCertification,
) -> CospmStatus {
    guard(|| {
        let p = design_ref(design)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let w = WorkspaceBox::new([bank_min, bank_max], [elevation_min, elevation_max], 0.0)?;
        let r = certify_workspace(p, &w, step)?;
        *out = CospmCertification {
            all_pass: r.all_pass,
            tested: r.tested,
            failures: r.failures.len(),
            leaves: r.leaves,
            max_h: r.max_h,
        };
        Ok(())
    })
}

/// Gain and phase margins of the reference speed loop for actuator time
/// constant `tau_m` and sample period `sample_period`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cospm_margins(
    tau_m: f64,
    sample_period: f64,
    out: *mut CospmMargins,
) -> CospmStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if sample_period.is_nan() || sample_period < 0.0 {
            return Err(Fail(
                CospmStatus::InvalidInput,
                format!("sample period must be non-negative, got {sample_period}"),
            ));
        }
        let act = ActuatorParameters {
            tau_m,
            ..ActuatorParameters::default()
        };
        act.validate()?;
        let m = margins(&ControllerCoefficients::default(), &act, sample_period)?;
        *out = CospmMargins {
            gain_margin_db: m.gain_margin_db,
            phase_margin_deg: m.phase_margin_deg,
            gain_crossover: m.gain_crossover,
            phase_crossover: m.phase_crossover,
        };
        Ok(())
    })
}

/// Fills `out` with the reference experiment settings.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cospm_simulation_options_default(
    out: *mut CospmSimulationOptions,
) -> CospmStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let c = SimulationConfig::default();
        *out = CospmSimulationOptions {
            duration: c.duration,
            sample_period: c.te,
            substeps: c.substeps as u32,
            wave_amplitude: c.disturbance.amplitude,
            wave_frequency: c.disturbance.frequency,
            wave_phase: c.disturbance.phase,
            tau_m: c.actuator.tau_m,
            friction: c.actuator.friction,
            mode: COSPM_MODE_UNIT_STEP,
        };
        Ok(())
    })
}

/// Runs the closed-loop experiment from the home pose.
///
/// # Safety
/// `options` must be readable and `out` writable. On success `*out` owns a
/// trace released with [`cospm_trace_free`].
#[no_mangle]
pub unsafe extern "C" fn cospm_simulate(
    design: *const CospmDesign,
    options: *const CospmSimulationOptions,
    out: *mut *mut CospmTrace,
) -> CospmStatus {
    guard(|| {
        let p = design_ref(design)?;
        let o = options.as_ref().ok_or_else(|| null("options"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mode = match o.mode {
            COSPM_MODE_UNIT_STEP => DisturbanceMode::UnitStep,
            COSPM_MODE_COULOMB => DisturbanceMode::Coulomb,
            COSPM_MODE_NONE => DisturbanceMode::None,
            m => {
                return Err(Fail(
                    CospmStatus::InvalidInput,
                    format!("unknown disturbance mode {m}"),
                ))
            }
        };
        let cfg = SimulationConfig {
            duration: o.duration,
            te: o.sample_period,
            substeps: o.substeps as usize,
            design: *p,
            disturbance: DisturbanceProfile {
                amplitude: o.wave_amplitude,
                frequency: o.wave_frequency,
                phase: o.wave_phase,
            },
            actuator: ActuatorParameters {
                tau_m: o.tau_m,
                friction: o.friction,
                mode,
            },
            ..SimulationConfig::default()
        };
        let trace = run(&cfg)?;
        *out = Box::into_raw(Box::new(CospmTrace(trace)));
        Ok(())
    })
}

/// Number of samples in a trace; 0 for NULL.
///
/// # Safety
/// `trace` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cospm_trace_len(trace: *const CospmTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `trace` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cospm_trace_sample(
    trace: *const CospmTrace,
    index: usize,
    out: *mut CospmSample,
) -> CospmStatus {
    guard(|| {
        let t = &trace.as_ref().ok_or_else(|| null("trace"))?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if index >= t.len() {
            return Err(Fail(
                CospmStatus::OutOfRange,
                format!("sample {index} of {}", t.len()),
            ));
        }
        let a = |v: &[f64]| [v[0], v[1], v[2]];
        *out = CospmSample {
            t: t.t[index],
            omega: a(t.omega[index].as_slice()),
            eps: a(t.eps[index].as_slice()),
            eps_omega: a(t.eps_omega[index].as_slice()),
            theta: a(t.theta[index].as_slice()),
            theta_dot: a(t.theta_dot[index].as_slice()),
            chi: a(t.chi[index].as_slice()),
            carrier: a(t.carrier[index].as_slice()),
        };
        Ok(())
    })
}

/// Maxima over samples at or after `t_start`.
///
/// # Safety
/// `trace` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cospm_trace_steady_state(
    trace: *const CospmTrace,
    t_start: f64,
    out: *mut CospmSteadyState,
) -> CospmStatus {
    guard(|| {
        let t = &trace.as_ref().ok_or_else(|| null("trace"))?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let m = steady_state_metrics(t, t_start);
        *out = CospmSteadyState {
            max_abs_residual: m.max_abs_residual,
            max_abs_speed_error: m.max_abs_speed_error,
            max_abs_joint_rate: m.max_abs_joint_rate,
        };
        Ok(())
    })
}

/// Writes the trace as CSV to a UTF-8 path.
///
/// # Safety
/// `trace` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cospm_trace_write_csv(
    trace: *const CospmTrace,
    path: *const c_char,
) -> CospmStatus {
    guard(|| {
        let t = &trace.as_ref().ok_or_else(|| null("trace"))?.0;
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Fail(CospmStatus::InvalidInput, "path is not UTF-8".into()))?;
        let io = |e: std::io::Error| Fail(CospmStatus::Io, format!("{path}: {e}"));
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        t.write_csv(&mut w).map_err(io)?;
        w.flush().map_err(io)
    })
}

/// # Safety
/// `trace` must come from [`cospm_simulate`] and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn cospm_trace_free(trace: *mut CospmTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}
