use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use super::workspace::WorkspaceBox;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::kinematics::polynomial::{Mat3, PolynomialSystem, Vec3};
use crate::kinematics::{
    igm, tan_half_forward, BranchPolicy, DesignParameters, JointVector, Orientation,
};

/// Outcome of the Kantorovich test for `X ↦ F(θ, X)` over a box of joint
/// angles `θ`. Rows are normalized by `(1+Θ_i²)` so the joint enters through
/// `cos θ_i, sin θ_i` while the system stays polynomial in `X`.
///
/// All quantities use the ∞-norm and are upper bounds, except
/// `uniqueness_radius` which is a lower bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KantorovichCertificate {
    pub theta0: Vector3<f64>,
    pub x0: Vector3<f64>,
    /// Radius of the ball around `x0` over which `l` was bounded.
    pub radius: f64,
    pub eta: f64,
    pub b: f64,
    pub l: f64,
    pub h: f64,
    /// A root lies within this distance of `x0`.
    pub convergence_radius: f64,
    /// No other root lies within this distance of `x0`.
    pub uniqueness_radius: f64,
    /// `h ≤ 1/2` and the convergence ball fits in the Lipschitz ball.
    pub valid: bool,
}

fn pt(v: f64) -> Interval {
    Interval::point(v)
}

fn row_norm(m: &Mat3<Interval>) -> Interval {
    let mut best = pt(0.0);
    for row in m {
        let s = row[0].abs() + row[1].abs() + row[2].abs();
        if s.hi() > best.hi() {
            best = s;
        }
    }
    Interval::point(best.hi())
}

fn vec_norm(v: &Vec3<Interval>) -> Interval {
    Interval::point(v.iter().fold(0.0, |m, x| m.max(x.mag())))
}

fn mul(a: &Mat3<Interval>, b: &Mat3<Interval>) -> Mat3<Interval> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j])
    })
}

fn mul_vec(a: &Mat3<Interval>, v: &Vec3<Interval>) -> Vec3<Interval> {
    std::array::from_fn(|i| a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2])
}

fn div(a: Interval, b: Interval) -> f64 {
    a.checked_div(b).map_or(f64::INFINITY, |q| q.hi())
}

/// Kantorovich test with joint angles ranging over `theta` (componentwise
/// intervals, rad) and `x0` in tan-half coordinates.
///
/// The test runs on the preconditioned system `G = M·F` with
/// `M = mid(∂F/∂X)⁻¹` at `x0`. With `e = ‖I − M·∂F/∂X‖ < 1` over the box,
/// `B = 1/(1−e)` and `η = ‖M·F‖/(1−e)`. `L` bounds the row sums of
/// `M·∂²F/∂X²` over the ball `‖X − x0‖ ≤ radius` and the whole joint box.
pub fn kantorovich_test_box(
    sys: &PolynomialSystem<Interval>,
    theta: &Vec3<Interval>,
    x0: &Vector3<f64>,
    radius: f64,
) -> Result<KantorovichCertificate> {
    let xc: Vec3<Interval> = std::array::from_fn(|j| pt(x0[j]));
    let jac = sys.jacobian_x_angle(theta, &xc);
    let jmid = Matrix3::from_fn(|i, j| jac[i][j].mid());
    let m = jmid.try_inverse().ok_or(Error::SingularJacobianAtCenter)?;
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::SingularJacobianAtCenter);
    }
    let mi: Mat3<Interval> = std::array::from_fn(|i| std::array::from_fn(|j| pt(m[(i, j)])));

    let mj = mul(&mi, &jac);
    let resid: Mat3<Interval> = std::array::from_fn(|i| {
        std::array::from_fn(|j| pt(if i == j { 1.0 } else { 0.0 }) - mj[i][j])
    });
    let e = row_norm(&resid);
    let one_minus_e = pt(1.0) - e;

    // Lipschitz constant of the preconditioned Jacobian `M·∂F/∂X`.
    let ball: Vec3<Interval> = std::array::from_fn(|j| Interval::centered(x0[j], radius));
    let hess = sys.hessian_x_angle(theta, &ball);
    #[allow(clippy::needless_range_loop)]
    let l = (0..3)
        .map(|i| {
            let mut s = pt(0.0);
            for j in 0..3 {
                for k in 0..3 {
                    let mh = mi[i][0] * hess[0][j][k]
                        + mi[i][1] * hess[1][j][k]
                        + mi[i][2] * hess[2][j][k];
                    s = s + mh.abs();
                }
            }
            s.hi()
        })
        .fold(0.0, f64::max);

    let theta0 = Vector3::from_fn(|i, _| theta[i].mid());
    if !(one_minus_e.lo() > 0.0) {
        return Ok(KantorovichCertificate {
            theta0,
            x0: *x0,
            radius,
            eta: f64::INFINITY,
            b: f64::INFINITY,
            l,
            h: f64::INFINITY,
            convergence_radius: f64::INFINITY,
            uniqueness_radius: 0.0,
            valid: false,
        });
    }

    // Mean-value form in θ: F(θ) ∈ F(θ₀) + ∂F/∂θ(box)·(θ − θ₀), each leg
    // depending on its own joint only. Much tighter than evaluating F on
    // the box directly.
    let t0: Vec3<Interval> = std::array::from_fn(|i| pt(theta[i].mid()));
    let f0 = sys.value_angle(&t0, &xc);
    let slope = sys.joint_derivative_angle(theta, &xc);
    let f: Vec3<Interval> = std::array::from_fn(|i| f0[i] + slope[i] * (theta[i] - t0[i]));
    let b = div(pt(1.0), one_minus_e);
    let eta = div(vec_norm(&mul_vec(&mi, &f)), one_minus_e);
    let bl = pt(b) * pt(l);
    let h = (bl * pt(eta)).hi();

    let (convergence_radius, uniqueness_radius) = if h <= 0.5 {
        // s = √(1−2h), bounded below so that r0 is an upper bound
        let s_lo = (pt(1.0) - pt(2.0) * pt(h))
            .lo()
            .max(0.0)
            .sqrt()
            .next_down()
            .max(0.0);
        let s_hi = (pt(1.0) - pt(2.0) * pt(h)).hi().max(0.0).sqrt().next_up();
        let r0 = div(pt(2.0) * pt(eta), pt(1.0) + pt(s_lo));
        let r1 = if l == 0.0 {
            f64::INFINITY
        } else {
            (pt(1.0) + pt(s_lo)).checked_div(bl).map_or(0.0, |q| q.lo())
        };
        let _ = s_hi;
        (r0, r1)
    } else {
        (f64::INFINITY, 0.0)
    };
    let valid = h <= 0.5 && convergence_radius <= radius;
    Ok(KantorovichCertificate {
        theta0,
        x0: *x0,
        radius,
        eta,
        b,
        l,
        h,
        convergence_radius,
        uniqueness_radius,
        valid,
    })
}

/// Point version of [`kantorovich_test_box`] at nominal design parameters.
/// The platform angles are mapped to tan-half coordinates.
pub fn kantorovich_test(
    p: &DesignParameters,
    theta: &JointVector,
    chi: &Orientation,
    radius: f64,
) -> Result<KantorovichCertificate> {
    let sys = PolynomialSystem::with_parameter_radius(p, 0.0);
    let x = tan_half_forward(&chi.0)?;
    let tb: Vec3<Interval> = std::array::from_fn(|i| pt(theta.0[i]));
    kantorovich_test_box(&sys, &tb, &x, radius)
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CertifyOptions {
    /// Half-width of the interval replacing every design angle, rad.
    pub parameter_radius: f64,
    /// Lipschitz ball radius in tan-half units. By default it starts at the
    /// cell width and grows to hold the convergence ball.
    pub radius: Option<f64>,
}

// Corners and edge midpoints of the cell, in half steps.
const CELL_PROBES: [(f64, f64); 8] = [
    (-1.0, -1.0),
    (0.0, -1.0),
    (1.0, -1.0),
    (-1.0, 0.0),
    (1.0, 0.0),
    (-1.0, 1.0),
    (0.0, 1.0),
    (1.0, 1.0),
];
// Widening of the sampled joint spread, covering the curvature of the
// joint map across a cell.
const CELL_MARGIN: f64 = 1.25;

/// Subdivision depth below a grid cell: a failing cell is split into four
/// quarters up to this many times.
pub const MAX_SUBDIVISION_DEPTH: u32 = 3;

/// Result of certifying one grid cell, possibly through subdivision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellCertificate {
    /// Every leaf cell passed.
    pub valid: bool,
    /// Number of leaf cells tested.
    pub leaves: usize,
    /// Leaf certificate with the largest `h` (the first failing leaf when
    /// not valid).
    pub worst: KantorovichCertificate,
}

/// Certifies the grid cell `[χ₁ ± step/2] × [χ₂ ± step/2]` around `chi`.
/// For each (sub)cell the joint box holds the joint values sampled at its
/// corners and edge midpoints, widened by a quarter.
pub fn certify_point(
    p: &DesignParameters,
    chi: &Orientation,
    step: f64,
    options: &CertifyOptions,
) -> Result<CellCertificate> {
    let sys = PolynomialSystem::with_parameter_radius(p, options.parameter_radius);
    certify_cell(&sys, p, chi, 0.5 * step, options, 0)
}

fn certify_cell(
    sys: &PolynomialSystem<Interval>,
    p: &DesignParameters,
    chi: &Orientation,
    half: f64,
    options: &CertifyOptions,
    depth: u32,
) -> Result<CellCertificate> {
    let cert = certify_leaf(sys, p, chi, half, options)?;
    if cert.valid || depth >= MAX_SUBDIVISION_DEPTH {
        return Ok(CellCertificate {
            valid: cert.valid,
            leaves: 1,
            worst: cert,
        });
    }
    let q = 0.5 * half;
    let mut out: Option<CellCertificate> = None;
    for (d1, d2) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
        let sub = Orientation::new(chi.bank() + d1 * q, chi.elevation() + d2 * q, chi.bearing());
        let c = certify_cell(sys, p, &sub, q, options, depth + 1)?;
        out = Some(match out {
            None => c,
            Some(acc) => CellCertificate {
                valid: acc.valid && c.valid,
                leaves: acc.leaves + c.leaves,
                worst: if !acc.valid || (c.valid && acc.worst.h >= c.worst.h) {
                    acc.worst
                } else {
                    c.worst
                },
            },
        });
        if !c.valid {
            break;
        }
    }
    Ok(out.expect("four sub-cells"))
}

fn certify_leaf(
    sys: &PolynomialSystem<Interval>,
    p: &DesignParameters,
    chi: &Orientation,
    half: f64,
    options: &CertifyOptions,
) -> Result<KantorovichCertificate> {
    let bearing_ref = JointVector::home().offset(-chi.bearing());
    let theta = igm(p, chi, BranchPolicy::NearestTo(bearing_ref))?;
    let mut spread = Vector3::<f64>::zeros();
    for (d1, d2) in CELL_PROBES {
        let n = Orientation::new(
            chi.bank() + d1 * half,
            chi.elevation() + d2 * half,
            chi.bearing(),
        );
        let tn = igm(p, &n, BranchPolicy::NearestTo(theta))?;
        spread = spread.zip_map(&(tn.0 - theta.0), |s, d| s.max(CELL_MARGIN * d.abs()));
    }
    let tb: Vec3<Interval> = std::array::from_fn(|i| Interval::centered(theta.0[i], spread[i]));
    let x0 = tan_half_forward(&chi.0)?;
    if let Some(r) = options.radius {
        return kantorovich_test_box(sys, &tb, &x0, r);
    }
    // Grow the Lipschitz ball until it holds the convergence ball.
    let mut radius = 2.0 * half;
    let mut cert = kantorovich_test_box(sys, &tb, &x0, radius)?;
    for _ in 0..4 {
        if cert.valid || cert.h > 0.5 {
            break;
        }
        radius = 1.25 * cert.convergence_radius;
        cert = kantorovich_test_box(sys, &tb, &x0, radius)?;
    }
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificationFailure {
    pub chi: Orientation,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificationReport {
    pub all_pass: bool,
    pub tested: usize,
    pub failures: Vec<CertificationFailure>,
    /// Largest `h` among the passing leaf cells.
    pub max_h: f64,
    /// Leaf cells tested, counting subdivisions.
    pub leaves: usize,
}

pub fn certify_workspace(
    p: &DesignParameters,
    workspace: &WorkspaceBox,
    step: f64,
) -> Result<CertificationReport> {
    certify_workspace_with(p, workspace, step, &CertifyOptions::default())
}

/// Certifies every cell of a grid over `workspace` with spacing at most
/// `step` in both bank and elevation.
pub fn certify_workspace_with(
    p: &DesignParameters,
    workspace: &WorkspaceBox,
    step: f64,
    options: &CertifyOptions,
) -> Result<CertificationReport> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidInput(format!(
            "certification step must be positive, got {step}"
        )));
    }
    let (n1, n2) = workspace.nodes_for_step(step);
    let nodes = workspace.grid(n1, n2);
    let sys = PolynomialSystem::with_parameter_radius(p, options.parameter_radius);
    let outcomes: Vec<(Orientation, Result<CellCertificate>)> = nodes
        .par_iter()
        .map(|&(a, b)| {
            let chi = workspace.orientation(a, b);
            (chi, certify_cell(&sys, p, &chi, 0.5 * step, options, 0))
        })
        .collect();
    let mut failures = Vec::new();
    let mut max_h: f64 = 0.0;
    let mut leaves = 0;
    for (chi, out) in outcomes {
        match out {
            Ok(c) => {
                leaves += c.leaves;
                if c.valid {
                    max_h = max_h.max(c.worst.h);
                } else {
                    let w = &c.worst;
                    failures.push(CertificationFailure {
                        chi,
                        reason: format!(
                            "h = {:.3e}, r0 = {:.3e}, radius = {:.3e}",
                            w.h, w.convergence_radius, w.radius
                        ),
                    });
                }
            }
            Err(e) => failures.push(CertificationFailure {
                chi,
                reason: e.to_string(),
            }),
        }
    }
    Ok(CertificationReport {
        all_pass: failures.is_empty(),
        tested: nodes.len(),
        failures,
        max_h,
        leaves,
    })
}
