//! Green function of `(-Δ)^s`, its regular part, and the Robin function.
//!
//! The workhorse identity is `λ^{-s} = 1/Γ(s) ∫_0^∞ τ^{s-1} e^{-λτ} dτ`,
//! which renders every Green/Robin quantity as a τ-integral of heat kernels:
//!
//! * `G(x, t)    = 1/Γ(s) ∫ τ^{s-1} p_Ω(τ, x, t) dτ`
//! * `R(t)       = 1/Γ(s) ∫ τ^{s-1} [ (4πτ)^{-N/2} - p_Ω(τ, t, t) ] dτ`
//!
//! The free diagonal integrates in closed form above the short-time split
//! `τ*`, below which the integrand is exponentially small in
//! `d(t, ∂Ω)²/(4τ)`; the spectral sum truncates with error `e^{-λ_J τ*}`.
//! A [`QuadratureSpec`] carries the split, the composite Gauss–Legendre
//! rule in `ln τ`, and the achieved tail bound.

use alloc::vec::Vec;
use core::fmt;

use crate::basis::{BasisError, EigenBasis};
use crate::fractional::FractionalParams;
use crate::math;
use crate::quadrature::{pairwise_sum, LogQuadrature};
use crate::special::{bessel_j1, gamma, gamma_reg_lower, gamma_reg_upper};
use core::f64::consts::PI;

/// Gauss–Legendre points per unit log-τ interval.
const NODES_PER_UNIT: usize = 32;
/// `e^{-λ₁ τ_cut}` at the upper end of the numeric window.
const TAIL_EXPONENT: f64 = 42.0;

#[derive(Debug, Clone, PartialEq)]
pub enum GreenError {
    CoincidentPoints,
    PointNotInterior([f64; 2]),
    TooCloseToBoundary { dist: f64, need: f64 },
    MollifierTooWide { rho: f64, max: f64 },
    /// The basis cannot deliver the requested split accuracy at this
    /// distance from the boundary: `e^{-d √λ_J / 2}` exceeds the target.
    QuadratureUnsatisfiable { achievable: f64, target: f64 },
    Basis(BasisError),
}

impl fmt::Display for GreenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::CoincidentPoints => write!(f, "source and evaluation points coincide"),
            Self::PointNotInterior(p) => {
                write!(f, "point ({}, {}) is not strictly interior", p[0], p[1])
            }
            Self::TooCloseToBoundary { dist, need } => write!(
                f,
                "point too close to the boundary: distance {dist:.4e} < required {need:.4e}"
            ),
            Self::MollifierTooWide { rho, max } => {
                write!(f, "mollifier radius {rho} exceeds half the boundary distance {max}")
            }
            Self::QuadratureUnsatisfiable { achievable, target } => write!(
                f,
                "quadrature split unsatisfiable: achievable tail {achievable:.3e} > target {target:.3e} (increase the mode count)"
            ),
            Self::Basis(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GreenError {}

impl From<BasisError> for GreenError {
    fn from(e: BasisError) -> Self {
        Self::Basis(e)
    }
}

/// Free-space kernel `c_{N,s} |x - t|^{2s - N}`.
pub fn free_green(x: [f64; 2], t: [f64; 2], params: &FractionalParams) -> Result<f64, GreenError> {
    let r = math::dist(x, t);
    if r == 0.0 {
        return Err(GreenError::CoincidentPoints);
    }
    Ok(params.c_fund * math::powf(r, 2.0 * params.s - params.dim as f64))
}

/// Requested accuracy for the τ-split of heat-route integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Accuracy {
    /// Hard target for both tail bounds; construction fails if the basis
    /// cannot deliver it.
    Target(f64),
    /// Balance the two tails at the best achievable level for the given
    /// mode count and boundary distance.
    Best,
}

/// τ-integration plan for heat-route quantities at a fixed distance from
/// the boundary.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    /// Short-time split: the integrand is dropped below this τ.
    pub tau_star: f64,
    /// Upper end of the numeric window; beyond it `p_Ω ≤ e^{-λ₁ τ}` is
    /// negligible and the free part integrates in closed form.
    pub tau_cut: f64,
    pub modes_used: usize,
    /// Achieved exponential tail bound (both split errors are below this
    /// factor times the integrand scale).
    pub tail_bound: f64,
    rule: LogQuadrature,
}

impl QuadratureSpec {
    /// Build a plan for points at boundary distance `dist`, targeting
    /// `accuracy`. The split balances `e^{-λ_J τ*}` (series truncation)
    /// against `e^{-d²/(4τ*)}` (short-time kernel difference); both equal
    /// `e^{-d √λ_J / 2}` at the balance point.
    pub fn build(
        basis: &EigenBasis,
        dist: f64,
        accuracy: Accuracy,
    ) -> Result<Self, GreenError> {
        let lambda_last = *basis.lambdas().last().expect("nonempty basis");
        let lambda_first = basis.lambda(0);
        let achievable = math::exp(-0.5 * dist * math::sqrt(lambda_last));
        let target = match accuracy {
            Accuracy::Target(t) => {
                if achievable > t {
                    return Err(GreenError::QuadratureUnsatisfiable {
                        achievable,
                        target: t,
                    });
                }
                t
            }
            Accuracy::Best => achievable,
        };
        let tau_star = 0.5 * dist / math::sqrt(lambda_last);
        let tau_cut = TAIL_EXPONENT / lambda_first;
        if tau_star >= 0.5 * tau_cut {
            return Err(GreenError::QuadratureUnsatisfiable {
                achievable,
                target,
            });
        }
        let rule = LogQuadrature::new(math::ln(tau_star), math::ln(tau_cut), NODES_PER_UNIT);
        Ok(Self {
            tau_star,
            tau_cut,
            modes_used: basis.len(),
            tail_bound: f64::max(achievable, target),
            rule,
        })
    }

    pub(crate) fn rule(&self) -> &LogQuadrature {
        &self.rule
    }
}

/// `1/Γ(s) ∫_{τ*}^{τcut} τ^{s-1} Σ_j w_j e^{-λ_j τ} dτ` with fixed-order
/// reductions.
pub(crate) fn weighted_heat_integral(
    lambdas: &[f64],
    weights: &[f64],
    s: f64,
    spec: &QuadratureSpec,
) -> f64 {
    debug_assert_eq!(lambdas.len(), weights.len());
    let rule = spec.rule();
    let mut g = Vec::with_capacity(rule.len());
    let mut terms = alloc::vec![0.0; lambdas.len()];
    for &tau in &rule.tau {
        for (k, (&lam, &w)) in lambdas.iter().zip(weights).enumerate() {
            terms[k] = w * math::exp(-lam * tau);
        }
        g.push(math::powf(tau, s - 1.0) * pairwise_sum(&terms));
    }
    rule.integrate_values(&g) / gamma(s)
}

/// Mode sums `q(τ_k) = Σ_j w_j e^{-λ_j τ_k}` at the plan's abscissae.
pub(crate) fn heat_mode_sums(lambdas: &[f64], weights: &[f64], spec: &QuadratureSpec) -> Vec<f64> {
    let rule = spec.rule();
    let mut out = Vec::with_capacity(rule.len());
    let mut terms = alloc::vec![0.0; lambdas.len()];
    for &tau in &rule.tau {
        for (k, (&lam, &w)) in lambdas.iter().zip(weights).enumerate() {
            terms[k] = w * math::exp(-lam * tau);
        }
        out.push(pairwise_sum(&terms));
    }
    out
}

/// Subordination transform of precomputed mode sums:
/// `1/Γ(s) ∫ τ^{s-1} e^{-y²/(4τ)} q(τ) dτ`. At `y = 0` this is the plain
/// `λ^{-s}`-weighted sum; for `y > 0` it evaluates the harmonic extension
/// without touching the slowly-converging Bessel-profile series.
pub(crate) fn subordination_transform(q: &[f64], spec: &QuadratureSpec, s: f64, y: f64) -> f64 {
    let rule = spec.rule();
    debug_assert_eq!(q.len(), rule.len());
    let values: Vec<f64> = rule
        .tau
        .iter()
        .zip(q)
        .map(|(&tau, &qk)| math::powf(tau, s - 1.0) * math::exp(-y * y / (4.0 * tau)) * qk)
        .collect();
    rule.integrate_values(&values) / gamma(s)
}

/// Closed-form free-diagonal integral
/// `1/Γ(s) ∫_{τ*}^∞ τ^{s-1} (4πτ)^{-N/2} dτ` (converges since `N > 2s`).
fn free_diagonal_tail(params: &FractionalParams, tau_star: f64) -> f64 {
    let n = params.dim as f64;
    math::powf(4.0 * PI, -n / 2.0) / gamma(params.s) * math::powf(tau_star, params.s - n / 2.0)
        / (n / 2.0 - params.s)
}

/// Heat-route reproduction of the free kernel:
/// `1/Γ(s) ∫_0^∞ τ^{s-1} (4πτ)^{-N/2} e^{-r²/(4τ)} dτ`, which must equal
/// `c_{N,s} r^{2s-N}`. Uses its own wide window plus a three-term analytic
/// tail; serves as the quadrature self-test behind the constant `c_{N,s}`.
pub fn free_kernel_heat_value(params: &FractionalParams, r: f64) -> f64 {
    let n = params.dim as f64;
    let s = params.s;
    let tau_lo = r * r / 190.0;
    let tau_hi = 1.0e4 * r * r;
    let rule = LogQuadrature::new(math::ln(tau_lo), math::ln(tau_hi), NODES_PER_UNIT);
    let body = rule.integrate(|tau| {
        math::powf(tau, s - 1.0 - n / 2.0) * math::exp(-r * r / (4.0 * tau))
    });
    // ∫_{τhi}^∞ τ^{s-1-N/2} e^{-r²/(4τ)} dτ with e^{-u} ≈ 1 - u + u²/2.
    let p = n / 2.0 - s;
    let u = r * r / 4.0;
    let tail = math::powf(tau_hi, -p) / p - u * math::powf(tau_hi, -p - 1.0) / (p + 1.0)
        + u * u * math::powf(tau_hi, -p - 2.0) / (2.0 * (p + 2.0));
    math::powf(4.0 * PI, -n / 2.0) * (body + tail) / gamma(s)
}

/// How a Green field is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenRoute {
    /// Truncated eigenexpansion `Σ φ_j(t) φ_j(x) / λ_j^s`.
    Spectral,
    /// Spectral solve against the normalized ball indicator `η_ρ`
    /// (solid-mean coefficients), converging to the Green function as
    /// `ρ → 0`.
    Mollified(f64),
}

/// Green function values on the interior nodes of the basis grid.
#[derive(Debug, Clone)]
pub struct GreenField {
    pub source: [f64; 2],
    pub s: f64,
    pub route: GreenRoute,
    /// Values in interior-node order.
    pub values: Vec<f64>,
}

/// Expansion coefficients of the (possibly mollified) Green function.
pub(crate) fn green_coefficients(
    basis: &EigenBasis,
    t: [f64; 2],
    s: f64,
    route: GreenRoute,
) -> Result<Vec<f64>, GreenError> {
    let phi_t = basis.values_at(t);
    let coeffs = match route {
        GreenRoute::Spectral => phi_t
            .iter()
            .zip(basis.lambdas())
            .map(|(&p, &lam)| p / math::powf(lam, s))
            .collect(),
        GreenRoute::Mollified(rho) => phi_t
            .iter()
            .zip(basis.lambdas())
            .map(|(&p, &lam)| {
                ball_mean_factor(math::sqrt(lam) * rho, basis.domain().dim()) * p
                    / math::powf(lam, s)
            })
            .collect(),
    };
    Ok(coeffs)
}

/// Solid mean of an eigenmode over a ball of radius `ρ`, relative to its
/// center value: `sin(z)/z` in 1-D, `2 J₁(z)/z` in 2-D, with `z = √λ ρ`.
pub(crate) fn ball_mean_factor(z: f64, dim: usize) -> f64 {
    if z < 1e-8 {
        return 1.0;
    }
    match dim {
        1 => math::sin(z) / z,
        _ => 2.0 * bessel_j1(z) / z,
    }
}

/// Solve `(-Δ)^s u = δ_t` (spectral route) or `(-Δ)^s u = η_ρ` (mollified
/// route) over the basis grid.
pub fn green_solve(
    basis: &EigenBasis,
    t: [f64; 2],
    s: f64,
    route: GreenRoute,
) -> Result<GreenField, GreenError> {
    if !basis.domain().contains(t) {
        return Err(GreenError::PointNotInterior(t));
    }
    if let GreenRoute::Mollified(rho) = route {
        let max = basis.domain().distance_to_boundary(t) / 2.0;
        if !(rho > 0.0) || rho >= max {
            return Err(GreenError::MollifierTooWide { rho, max });
        }
    }
    let coeffs = green_coefficients(basis, t, s, route)?;
    Ok(GreenField {
        source: t,
        s,
        route,
        values: basis.weighted_field(&coeffs),
    })
}

/// Pointwise Green value by the plain coefficient sum.
pub fn green_value(
    basis: &EigenBasis,
    t: [f64; 2],
    x: [f64; 2],
    s: f64,
    route: GreenRoute,
) -> Result<f64, GreenError> {
    if !basis.domain().contains(t) {
        return Err(GreenError::PointNotInterior(t));
    }
    let coeffs = green_coefficients(basis, t, s, route)?;
    let phi_x = basis.values_at(x);
    let terms: Vec<f64> = coeffs.iter().zip(&phi_x).map(|(&c, &p)| c * p).collect();
    Ok(pairwise_sum(&terms))
}

/// Route selector for [`robin_value`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobinRoute {
    /// Heat-kernel (Mellin) quadrature of the diagonal defect.
    Heat,
    /// Near-diagonal Richardson extrapolation of `G_free - G`.
    Extrapolation,
}

impl RobinRoute {
    pub fn name(self) -> &'static str {
        match self {
            RobinRoute::Heat => "heat",
            RobinRoute::Extrapolation => "extrapolation",
        }
    }
}

/// Robin function value with an error estimate.
#[derive(Debug, Clone)]
pub struct RobinValue {
    pub t: [f64; 2],
    pub s: f64,
    pub value: f64,
    pub route: RobinRoute,
    pub err_est: f64,
}

/// Minimum boundary distance in units of the grid spacing.
pub(crate) const MIN_DISTANCE_CELLS: f64 = 4.0;

pub(crate) fn check_interior_distance(
    basis: &EigenBasis,
    t: [f64; 2],
) -> Result<f64, GreenError> {
    if !basis.domain().contains(t) {
        return Err(GreenError::PointNotInterior(t));
    }
    let h = f64::max(basis.grid().spacing[0], basis.grid().spacing[1]);
    let d = basis.domain().distance_to_boundary(t);
    let need = MIN_DISTANCE_CELLS * h;
    if d < need {
        return Err(GreenError::TooCloseToBoundary { dist: d, need });
    }
    Ok(d)
}

/// Robin function `R(t) = H(t, t)` of the regular part.
pub fn robin_value(
    basis: &EigenBasis,
    t: [f64; 2],
    s: f64,
    params: &FractionalParams,
    quad: &QuadratureSpec,
    route: RobinRoute,
) -> Result<RobinValue, GreenError> {
    let d = check_interior_distance(basis, t)?;
    match route {
        RobinRoute::Heat => {
            let phi = basis.values_at(t);
            let weights: Vec<f64> = phi.iter().map(|&p| p * p).collect();
            let diag_integral = weighted_heat_integral(basis.lambdas(), &weights, s, quad);
            let free_part = free_diagonal_tail(params, quad.tau_star);
            // Error estimate: dropped short-time slab plus series tail.
            let n = params.dim as f64;
            let short = math::powf(quad.tau_star, s - n / 2.0)
                * math::powf(4.0 * PI, -n / 2.0)
                * math::exp(-d * d / (4.0 * quad.tau_star))
                / gamma(s);
            let lambda_last = *basis.lambdas().last().unwrap();
            let series = math::exp(-lambda_last * quad.tau_star)
                * math::powf(4.0 * PI * quad.tau_star, -n / 2.0)
                * math::powf(quad.tau_star, s)
                / gamma(s);
            Ok(RobinValue {
                t,
                s,
                value: free_part - diag_integral,
                route,
                err_est: short + series,
            })
        }
        RobinRoute::Extrapolation => {
            let h = f64::max(basis.grid().spacing[0], basis.grid().spacing[1]);
            let eps_max = 8.0 * h;
            // Short-time split for the off-diagonal regular part: below θ
            // the domain kernel equals the free Gaussian up to image terms
            // at distance ≥ 2(d - ε) - ε; above θ the mode sum carries
            // upper-incomplete-gamma weights. Both tails must be inert.
            let image_dist = 2.0 * (d - eps_max) - eps_max;
            if image_dist <= 0.0 {
                return Err(GreenError::TooCloseToBoundary {
                    dist: d,
                    need: 1.5 * eps_max,
                });
            }
            let lambda_last = *basis.lambdas().last().unwrap();
            let theta = image_dist * image_dist / 184.0;
            let achievable = math::exp(-lambda_last * theta);
            if achievable > 1e-13 {
                return Err(GreenError::QuadratureUnsatisfiable {
                    achievable,
                    target: 1e-13,
                });
            }
            let phi_t = basis.values_at(t);
            let dim = basis.domain().dim();
            let mut ladder = [0.0; 3];
            for (level, mult) in [(0usize, 2.0), (1, 4.0), (2, 8.0)] {
                let eps = mult * h;
                let mut dirs: Vec<[f64; 2]> = alloc::vec![[eps, 0.0], [-eps, 0.0]];
                if dim == 2 {
                    dirs.push([0.0, eps]);
                    dirs.push([0.0, -eps]);
                }
                let mut acc = Vec::with_capacity(dirs.len());
                for dvec in dirs {
                    let x = [t[0] + dvec[0], t[1] + dvec[1]];
                    if !basis.domain().contains(x) {
                        return Err(GreenError::PointNotInterior(x));
                    }
                    acc.push(regular_part_split(basis, &phi_t, t, x, s, params, theta));
                }
                ladder[level] = pairwise_sum(&acc) / acc.len() as f64;
            }
            // ± averaging cancels odd orders; two Richardson levels in ε².
            let r12 = (4.0 * ladder[0] - ladder[1]) / 3.0;
            let r23 = (4.0 * ladder[1] - ladder[2]) / 3.0;
            let value = (16.0 * r12 - r23) / 15.0;
            Ok(RobinValue {
                t,
                s,
                value,
                route,
                err_est: math::abs(value - r12),
            })
        }
    }
}

/// Off-diagonal regular part `H(x, t) = G_free(x - t) - G_Ω(x, t)` by the
/// short-time split at `θ`:
///
/// `H = (4π)^{-N/2} (r²/4)^{s-N/2} γ(N/2 - s, r²/(4θ)) / Γ(s)
///      - Σ_j φ_j(t) φ_j(x) λ_j^{-s} Q(s, λ_j θ)`
///
/// where `γ` / `Q` are the (regularized) incomplete gamma functions. The
/// form is exact up to boundary-image corrections `e^{-|x-t*|²/(4θ)}` and
/// the mode truncation `e^{-λ_J θ}`; no cancellation of large free-kernel
/// terms occurs.
fn regular_part_split(
    basis: &EigenBasis,
    phi_t: &[f64],
    _t: [f64; 2],
    x: [f64; 2],
    s: f64,
    params: &FractionalParams,
    theta: f64,
) -> f64 {
    let n = params.dim as f64;
    let r2: f64 = {
        let dx = x[0] - _t[0];
        let dy = x[1] - _t[1];
        dx * dx + dy * dy
    };
    let p = n / 2.0 - s;
    let short = math::powf(4.0 * PI, -n / 2.0)
        * math::powf(r2 / 4.0, s - n / 2.0)
        * gamma_reg_lower(p, r2 / (4.0 * theta))
        * gamma(p)
        / gamma(s);
    let phi_x = basis.values_at(x);
    let terms: Vec<f64> = phi_t
        .iter()
        .zip(&phi_x)
        .zip(basis.lambdas())
        .map(|((&pt, &px), &lam)| {
            pt * px / math::powf(lam, s) * gamma_reg_upper(s, lam * theta)
        })
        .collect();
    short - pairwise_sum(&terms)
}
