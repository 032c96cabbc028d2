//! Gradient and Hessian of the Robin function by three routes, and
//! symmetry-plane scans.
//!
//! * spectral: differentiate the diagonal heat kernel in the source point
//!   under the τ-integral (the free diagonal is translation invariant and
//!   drops out),
//! * fd: central differences of Robin values with one Richardson level for
//!   the gradient,
//! * boundary: the lateral-flux representation on the extension cylinder.
//!
//! Route disagreement beyond tolerance is a hard failure in the scan
//! reports, never silently averaged.

use alloc::vec::Vec;
use core::fmt;

use crate::basis::EigenBasis;
use crate::extension::{
    robin_gradient_boundary, robin_hessian_boundary, Cylinder, ExtensionError,
};
use crate::fractional::FractionalParams;
use crate::green::{
    check_interior_distance, robin_value, weighted_heat_integral, Accuracy, GreenError,
    QuadratureSpec, RobinRoute,
};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub enum RobinError {
    Green(GreenError),
    Extension(ExtensionError),
    /// Scan point off the symmetry hyperplane (rejected, not snapped).
    OffHyperplane { axis: usize, value: f64 },
}

impl fmt::Display for RobinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Green(e) => write!(f, "{e}"),
            Self::Extension(e) => write!(f, "{e}"),
            Self::OffHyperplane { axis, value } => write!(
                f,
                "scan point off the hyperplane: coordinate {axis} is {value:e}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RobinError {}

impl From<GreenError> for RobinError {
    fn from(e: GreenError) -> Self {
        Self::Green(e)
    }
}

impl From<ExtensionError> for RobinError {
    fn from(e: ExtensionError) -> Self {
        Self::Extension(e)
    }
}

/// Differentiation route for Robin derivatives.
#[derive(Debug, Clone, Copy)]
pub enum GradRoute<'a> {
    Spectral,
    Fd,
    Boundary(&'a Cylinder),
}

impl GradRoute<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            GradRoute::Spectral => "spectral",
            GradRoute::Fd => "fd",
            GradRoute::Boundary(_) => "boundary",
        }
    }
}

fn heat_robin(
    basis: &EigenBasis,
    t: [f64; 2],
    s: f64,
    params: &FractionalParams,
) -> Result<f64, GreenError> {
    let d = check_interior_distance(basis, t)?;
    let quad = QuadratureSpec::build(basis, d, Accuracy::Best)?;
    Ok(robin_value(basis, t, s, params, &quad, RobinRoute::Heat)?.value)
}

/// Gradient of the Robin function.
pub fn robin_gradient(
    basis: &EigenBasis,
    t: [f64; 2],
    s: f64,
    params: &FractionalParams,
    route: GradRoute<'_>,
) -> Result<[f64; 2], RobinError> {
    let dim = basis.domain().dim();
    match route {
        GradRoute::Spectral => {
            let d = check_interior_distance(basis, t)?;
            let quad = QuadratureSpec::build(basis, d, Accuracy::Best)?;
            let ev = basis.point_eval(t);
            let mut out = [0.0; 2];
            for axis in 0..dim {
                let weights: Vec<f64> = ev
                    .phi
                    .iter()
                    .zip(&ev.grad)
                    .map(|(&p, g)| 2.0 * p * g[axis])
                    .collect();
                out[axis] = -weighted_heat_integral(basis.lambdas(), &weights, s, &quad);
            }
            Ok(out)
        }
        GradRoute::Fd => {
            check_interior_distance(basis, t)?;
            let h = 2.0 * f64::max(basis.grid().spacing[0], basis.grid().spacing[1]);
            let mut out = [0.0; 2];
            for axis in 0..dim {
                let shift = |mult: f64| -> Result<f64, GreenError> {
                    let mut p = t;
                    p[axis] += mult * h;
                    heat_robin(basis, p, s, params)
                };
                let g_h = (shift(1.0)? - shift(-1.0)?) / (2.0 * h);
                let g_2h = (shift(2.0)? - shift(-2.0)?) / (4.0 * h);
                // One Richardson level on the central difference.
                out[axis] = (4.0 * g_h - g_2h) / 3.0;
            }
            Ok(out)
        }
        GradRoute::Boundary(cyl) => Ok(robin_gradient_boundary(basis, t, s, cyl, params)?),
    }
}

/// Hessian of the Robin function.
pub fn robin_hessian(
    basis: &EigenBasis,
    t: [f64; 2],
    s: f64,
    params: &FractionalParams,
    route: GradRoute<'_>,
) -> Result<[[f64; 2]; 2], RobinError> {
    let dim = basis.domain().dim();
    match route {
        GradRoute::Spectral => {
            let d = check_interior_distance(basis, t)?;
            let quad = QuadratureSpec::build(basis, d, Accuracy::Best)?;
            let ev = basis.point_eval(t);
            let mut out = [[0.0; 2]; 2];
            for i in 0..dim {
                for j in i..dim {
                    let hess_idx = i + j; // packed [d11, d12, d22]
                    let weights: Vec<f64> = (0..basis.len())
                        .map(|m| {
                            2.0 * (ev.grad[m][i] * ev.grad[m][j]
                                + ev.phi[m] * ev.hess[m][hess_idx])
                        })
                        .collect();
                    let v = -weighted_heat_integral(basis.lambdas(), &weights, s, &quad);
                    out[i][j] = v;
                    out[j][i] = v;
                }
            }
            Ok(out)
        }
        GradRoute::Fd => {
            check_interior_distance(basis, t)?;
            // Second differences amplify noise; a larger step trades
            // truncation for conditioning.
            let h = 4.0 * f64::max(basis.grid().spacing[0], basis.grid().spacing[1]);
            let r0 = heat_robin(basis, t, s, params)?;
            let at = |dx: f64, dy: f64| -> Result<f64, GreenError> {
                heat_robin(basis, [t[0] + dx * h, t[1] + dy * h], s, params)
            };
            let mut out = [[0.0; 2]; 2];
            out[0][0] = (at(1.0, 0.0)? - 2.0 * r0 + at(-1.0, 0.0)?) / (h * h);
            if dim == 2 {
                out[1][1] = (at(0.0, 1.0)? - 2.0 * r0 + at(0.0, -1.0)?) / (h * h);
                let mixed = (at(1.0, 1.0)? - at(1.0, -1.0)? - at(-1.0, 1.0)?
                    + at(-1.0, -1.0)?)
                    / (4.0 * h * h);
                out[0][1] = mixed;
                out[1][0] = mixed;
            }
            Ok(out)
        }
        GradRoute::Boundary(cyl) => Ok(robin_hessian_boundary(basis, t, s, cyl, params)?),
    }
}

/// Thresholds used by [`symmetry_scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanTolerances {
    /// Absolute bound on the spectral-route gradient component normal to
    /// the plane (exact parity).
    pub grad_spec_abs: f64,
    /// Relative bound for the same component, against the in-plane scale
    /// (used for numeric bases).
    pub grad_spec_ratio: f64,
    /// fd route: `|∂_axis R| ≤ ratio × scale`.
    pub grad_fd_ratio: f64,
    /// boundary route: `|∂_axis R| ≤ ratio × H_aa × diam`.
    pub grad_boundary_ratio: f64,
    /// `|H_{axis,i}| ≤ ratio × H_{axis,axis}` for `i ≠ axis`.
    pub hess_offdiag_ratio: f64,
    /// Cross-route agreement on the nonzero gradient components.
    pub route_rel: f64,
    /// Cross-route agreement on the Hessian diagonal (the fd route uses
    /// plain second differences at step 4h, whose truncation dominates).
    pub hess_route_rel: f64,
}

impl ScanTolerances {
    /// Defaults for closed-form bases.
    pub fn analytic() -> Self {
        Self {
            grad_spec_abs: 1e-12,
            grad_spec_ratio: 0.0,
            grad_fd_ratio: 1e-6,
            grad_boundary_ratio: 1e-3,
            hess_offdiag_ratio: 1e-3,
            route_rel: 1e-2,
            hess_route_rel: 5e-2,
        }
    }

    /// Defaults for grid (ellipse) bases: 0.5% relative.
    pub fn numeric() -> Self {
        Self {
            grad_spec_abs: 1e-9,
            grad_spec_ratio: 5e-3,
            grad_fd_ratio: 5e-3,
            grad_boundary_ratio: 5e-3,
            hess_offdiag_ratio: 5e-3,
            route_rel: 5e-3,
            hess_route_rel: 1.5e-1,
        }
    }
}

/// Per-point verdict of a symmetry-plane scan.
#[derive(Debug, Clone)]
pub struct RobinReport {
    pub t: [f64; 2],
    pub s: f64,
    pub axis: usize,
    pub grad_spectral: [f64; 2],
    pub grad_fd: [f64; 2],
    pub grad_boundary: Option<[f64; 2]>,
    pub hess_spectral: [[f64; 2]; 2],
    pub hess_fd: [[f64; 2]; 2],
    /// Diagonal Hessian entry along the scan axis (spectral route).
    pub alpha: f64,
    pub tolerances: ScanTolerances,
    /// Gradient component normal to the plane vanishes (all routes).
    pub th1a_pass: bool,
    /// Mixed Hessian entries through the axis vanish and the diagonal
    /// entry is positive.
    pub th1b_pass: bool,
    /// Routes agree on the quantities that are not forced to zero.
    pub route_agree_pass: bool,
    /// Spectral Hessian is symmetric to roundoff.
    pub hess_sym_pass: bool,
}

impl RobinReport {
    pub fn pass(&self) -> bool {
        self.th1a_pass && self.th1b_pass && self.route_agree_pass && self.hess_sym_pass
    }
}

/// Evaluate the symmetry-plane claims at each point of `points` (all of
/// which must lie on `{x_axis = 0}`): the normal gradient component
/// vanishes and the Hessian row through the axis is `α δ` with `α > 0`.
pub fn symmetry_scan(
    basis: &EigenBasis,
    s: f64,
    params: &FractionalParams,
    axis: usize,
    points: &[[f64; 2]],
    cylinder: Option<&Cylinder>,
    tols: &ScanTolerances,
) -> Result<Vec<RobinReport>, RobinError> {
    for p in points {
        if math::abs(p[axis]) > 1e-12 {
            return Err(RobinError::OffHyperplane {
                axis,
                value: p[axis],
            });
        }
    }
    let dim = basis.domain().dim();
    let diam = basis.domain().diameter();
    let mut rows = Vec::with_capacity(points.len());
    for &t in points {
        let grad_spectral = robin_gradient(basis, t, s, params, GradRoute::Spectral)?;
        let grad_fd = robin_gradient(basis, t, s, params, GradRoute::Fd)?;
        let grad_boundary = match cylinder {
            Some(cyl) => Some(robin_gradient(basis, t, s, params, GradRoute::Boundary(cyl))?),
            None => None,
        };
        let hess_spectral = robin_hessian(basis, t, s, params, GradRoute::Spectral)?;
        let hess_fd = robin_hessian(basis, t, s, params, GradRoute::Fd)?;
        rows.push((t, grad_spectral, grad_fd, grad_boundary, hess_spectral, hess_fd));
    }
    // In-plane gradient scale across the scan (the nonzero reference for
    // ratio checks; points at the center have zero in-plane gradient too).
    let mut scale: f64 = 0.0;
    for row in &rows {
        for i in 0..dim {
            if i != axis {
                scale = f64::max(scale, math::abs(row.2[i]));
            }
        }
        scale = f64::max(scale, math::abs(row.4[axis][axis]) * diam * 1e-3);
    }

    let mut reports = Vec::with_capacity(rows.len());
    for (t, grad_spectral, grad_fd, grad_boundary, hess_spectral, hess_fd) in rows {
        let alpha = hess_spectral[axis][axis];
        let spec_bound = f64::max(tols.grad_spec_abs, tols.grad_spec_ratio * scale);
        let mut th1a = math::abs(grad_spectral[axis]) <= spec_bound;
        th1a &= math::abs(grad_fd[axis]) <= f64::max(tols.grad_fd_ratio * scale, 1e-14);
        if let Some(gb) = grad_boundary {
            th1a &= math::abs(gb[axis]) <= tols.grad_boundary_ratio * math::abs(alpha) * diam;
        }
        let mut th1b = alpha > 0.0 && hess_fd[axis][axis] > 0.0;
        for i in 0..dim {
            if i != axis {
                th1b &= math::abs(hess_spectral[axis][i])
                    <= tols.hess_offdiag_ratio * math::abs(alpha);
                th1b &= math::abs(hess_fd[axis][i]) <= tols.hess_offdiag_ratio * math::abs(alpha);
            }
        }
        // Cross-route agreement on in-plane gradient components and the
        // diagonal Hessian entry.
        let mut agree = rel_close(hess_fd[axis][axis], alpha, tols.hess_route_rel);
        for i in 0..dim {
            if i != axis && math::abs(grad_spectral[i]) > 1e-3 * scale {
                agree &= rel_close(grad_fd[i], grad_spectral[i], tols.route_rel);
            }
        }
        let hess_sym_pass =
            math::abs(hess_spectral[0][1] - hess_spectral[1][0]) <= 1e-10 * (1.0 + math::abs(alpha));
        reports.push(RobinReport {
            t,
            s,
            axis,
            grad_spectral,
            grad_fd,
            grad_boundary,
            hess_spectral,
            hess_fd,
            alpha,
            tolerances: *tols,
            th1a_pass: th1a,
            th1b_pass: th1b,
            route_agree_pass: agree,
            hess_sym_pass,
        });
    }
    Ok(reports)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    math::abs(a - b) <= tol * f64::max(math::abs(a), math::abs(b))
}
