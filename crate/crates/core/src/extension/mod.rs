//! Harmonic extension on the truncated cylinder `Ω × (0, Y_max)` and the
//! boundary-flux route to the Robin gradient and Hessian.
//!
//! A function `u = Σ a_j φ_j` extends to
//! `E[u](x, y) = Σ a_j φ_j(x) h_s(√λ_j y)` with the Bessel profile `h_s`;
//! the weighted conormal trace `-κ_s lim y^{1-2s} ∂_y` of the extension
//! returns `(-Δ)^s u`, and the weighted Dirichlet energy `κ_s ∫ y^{1-2s}
//! |∇E|²` equals `Σ a_j² λ_j^s`.
//!
//! Lateral flux values of Green extensions are evaluated through the
//! subordination identity
//! `h_s(√λ y)/λ^s = 1/Γ(s) ∫ τ^{s-1} e^{-λτ - y²/(4τ)} dτ`, which turns the
//! slowly converging profile series at small `y` into the same rapidly
//! convergent heat sums used everywhere else.

mod solver;

use alloc::vec::Vec;
use core::fmt;

use crate::basis::EigenBasis;
use crate::domain::BoundarySample;
use crate::fractional::FractionalParams;
use crate::green::{
    check_interior_distance, green_coefficients, heat_mode_sums, subordination_transform,
    Accuracy, GreenError, GreenRoute, QuadratureSpec,
};
use crate::linalg::LinalgError;
use crate::math;
use crate::quadrature::pairwise_sum;
use crate::special::extension_profile;

pub(crate) use solver::collect_cut_points;
use solver::{solve_cylinder, BaseCondition};

/// Truncation height such that `e^{-√λ₁ Y}` is at most this.
const TRUNCATION_TOL: f64 = 1e-10;
const MAX_CG_ITER: usize = 60_000;

#[derive(Debug, Clone, PartialEq)]
pub enum ExtensionError {
    /// `e^{-√λ₁ y_max}` above the truncation tolerance.
    TruncationTooShort { y_max: f64, need: f64 },
    TooFewLevels(usize),
    /// Graded-mesh rule for trace extraction: `γ ≥ 2` unless `s = 1/2`.
    GradingTooWeak { grading: f64, s: f64 },
    /// Flux is only meaningful for fields vanishing on the lateral
    /// boundary; auxiliary fields carry data there.
    LateralDataNonzero,
    PointOffHyperplane { axis: usize, value: f64 },
    Solver(LinalgError),
    Green(GreenError),
}

impl fmt::Display for ExtensionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TruncationTooShort { y_max, need } => write!(
                f,
                "cylinder height {y_max} too short for inert truncation (need at least {need:.3})"
            ),
            Self::TooFewLevels(k) => write!(f, "cylinder needs at least 32 levels, got {k}"),
            Self::GradingTooWeak { grading, s } => write!(
                f,
                "grading exponent {grading} too weak to resolve the y^{{2s}} layer at s = {s} (need γ ≥ 2)"
            ),
            Self::LateralDataNonzero => {
                write!(f, "lateral flux requested on a field with nonzero lateral data")
            }
            Self::PointOffHyperplane { axis, value } => write!(
                f,
                "point lies off the symmetry hyperplane: coordinate {axis} is {value:e} (rejected, not snapped)"
            ),
            Self::Solver(e) => write!(f, "cylinder solve failed: {e}"),
            Self::Green(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ExtensionError {}

impl From<LinalgError> for ExtensionError {
    fn from(e: LinalgError) -> Self {
        Self::Solver(e)
    }
}

impl From<GreenError> for ExtensionError {
    fn from(e: GreenError) -> Self {
        Self::Green(e)
    }
}

/// Requested cylinder mesh: truncation height (default `24/√λ₁`), level
/// count `K` and grading exponent `γ` of `y_k = Y_max (k/K)^γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderParams {
    pub y_max: Option<f64>,
    pub levels: usize,
    pub grading: f64,
}

impl Default for CylinderParams {
    fn default() -> Self {
        Self {
            y_max: None,
            levels: 256,
            grading: 2.0,
        }
    }
}

/// Truncated extension cylinder: the base grid is shared with the basis;
/// this type carries the graded y-mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    pub y: Vec<f64>,
    pub y_max: f64,
    pub grading: f64,
}

impl Cylinder {
    pub fn new(basis: &EigenBasis, params: &CylinderParams) -> Result<Self, ExtensionError> {
        let lambda1 = basis.lambda(0);
        let need = -math::ln(TRUNCATION_TOL) / math::sqrt(lambda1);
        let y_max = match params.y_max {
            Some(v) => {
                if v < need {
                    return Err(ExtensionError::TruncationTooShort { y_max: v, need });
                }
                v
            }
            None => 24.0 / math::sqrt(lambda1),
        };
        if params.levels < 32 {
            return Err(ExtensionError::TooFewLevels(params.levels));
        }
        let grading = params.grading;
        if grading < 1.0 {
            return Err(ExtensionError::GradingTooWeak {
                grading,
                s: f64::NAN,
            });
        }
        let k = params.levels;
        let y: Vec<f64> = (0..=k)
            .map(|i| y_max * math::powf(i as f64 / k as f64, grading))
            .collect();
        Ok(Self { y, y_max, grading })
    }

    pub fn levels(&self) -> usize {
        self.y.len() - 1
    }

    /// Exact `∫ y^{1-2s} g(y) dy` moments paired with a trapezoid in `g`.
    fn weighted_y_integral(&self, s: f64, g: impl Fn(usize) -> f64) -> f64 {
        let e = 2.0 - 2.0 * s;
        let k = self.levels();
        let mut terms = Vec::with_capacity(k);
        let mut g_lo = g(0);
        for kk in 0..k {
            let g_hi = g(kk + 1);
            let mom = (math::powf(self.y[kk + 1], e) - math::powf(self.y[kk], e)) / e;
            terms.push(mom * 0.5 * (g_lo + g_hi));
            g_lo = g_hi;
        }
        pairwise_sum(&terms)
    }
}

/// How an extension field was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Semi-analytic profile sum with these coefficients.
    Spectral { coeffs: Vec<f64> },
    /// Finite-difference solve of the extension problem.
    FdExtension,
    /// Auxiliary solve with lateral data (`U_i` problems).
    FdAuxiliary { axis: usize },
}

/// Scalar field on interior base nodes × the y-mesh (level-major).
#[derive(Debug, Clone)]
pub struct ExtField {
    pub s: f64,
    pub provenance: Provenance,
    pub levels: usize,
    pub n_interior: usize,
    pub values: Vec<f64>,
}

impl ExtField {
    pub fn level(&self, k: usize) -> &[f64] {
        &self.values[k * self.n_interior..(k + 1) * self.n_interior]
    }

    /// Base trace `w(·, 0)`.
    pub fn trace(&self) -> &[f64] {
        self.level(0)
    }

    pub fn value(&self, k: usize, i: usize) -> f64 {
        self.values[k * self.n_interior + i]
    }
}

/// Source of an extension.
#[derive(Debug, Clone)]
pub enum ExtSource {
    /// Eigen-coefficients of the function to extend.
    Coeffs(Vec<f64>),
    /// Green function centered at `t` (coefficients `φ_j(t)/λ_j^s`).
    Green { t: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtRoute {
    Spectral,
    Fd,
}

fn source_coeffs(
    basis: &EigenBasis,
    source: &ExtSource,
    s: f64,
) -> Result<Vec<f64>, ExtensionError> {
    match source {
        ExtSource::Coeffs(c) => Ok(c.clone()),
        ExtSource::Green { t } => {
            check_interior_distance(basis, *t)?;
            Ok(green_coefficients(basis, *t, s, GreenRoute::Spectral)?)
        }
    }
}

/// Harmonic extension of a function to the cylinder.
pub fn extend(
    basis: &EigenBasis,
    source: &ExtSource,
    s: f64,
    cyl: &Cylinder,
    route: ExtRoute,
) -> Result<ExtField, ExtensionError> {
    let coeffs = source_coeffs(basis, source, s)?;
    let n = basis.grid().interior_count();
    let k = cyl.levels();
    match route {
        ExtRoute::Spectral => {
            let mut values = alloc::vec![0.0; (k + 1) * n];
            let mut damped = alloc::vec![0.0; coeffs.len()];
            for (level, &y) in cyl.y.iter().enumerate() {
                for (j, &c) in coeffs.iter().enumerate() {
                    damped[j] = c * extension_profile(s, math::sqrt(basis.lambda(j)) * y);
                }
                let slice = basis.weighted_field(&damped);
                values[level * n..(level + 1) * n].copy_from_slice(&slice);
            }
            Ok(ExtField {
                s,
                provenance: Provenance::Spectral { coeffs },
                levels: k,
                n_interior: n,
                values,
            })
        }
        ExtRoute::Fd => {
            let base = basis.weighted_field(&coeffs);
            let cuts = collect_cut_points(basis.domain(), basis.grid());
            let sol = solve_cylinder(
                basis.domain(),
                basis.grid(),
                cyl,
                s,
                BaseCondition::Dirichlet,
                &base,
                &cuts,
                None,
                MAX_CG_ITER,
            )?;
            Ok(ExtField {
                s,
                provenance: Provenance::FdExtension,
                levels: k,
                n_interior: n,
                values: sol.values,
            })
        }
    }
}

/// Weighted conormal trace `-κ_s lim_{y→0} y^{1-2s} ∂_y w` on the base.
///
/// Spectral fields return the exact `Σ a_j λ_j^s φ_j`. Discrete fields fit
/// the two-node expansion `w ≈ w₀ + c y^{2s} + d y²` on the first two mesh
/// levels; naive one-sided differencing would lose an order for `s < 1/2`.
pub fn neumann_trace(
    basis: &EigenBasis,
    field: &ExtField,
    cyl: &Cylinder,
    params: &FractionalParams,
) -> Result<Vec<f64>, ExtensionError> {
    let s = field.s;
    if let Provenance::Spectral { coeffs } = &field.provenance {
        let scaled: Vec<f64> = coeffs
            .iter()
            .zip(basis.lambdas())
            .map(|(&c, &lam)| c * math::powf(lam, s))
            .collect();
        return Ok(basis.weighted_field(&scaled));
    }
    if math::abs(s - 0.5) > 1e-12 && cyl.grading < 2.0 - 1e-12 {
        return Err(ExtensionError::GradingTooWeak {
            grading: cyl.grading,
            s,
        });
    }
    if cyl.levels() < 32 {
        return Err(ExtensionError::TooFewLevels(cyl.levels()));
    }
    let (y1, y2) = (cyl.y[1], cyl.y[2]);
    let (p1, p2) = (math::powf(y1, 2.0 * s), math::powf(y2, 2.0 * s));
    let det = p1 * y2 * y2 - p2 * y1 * y1;
    let w0 = field.level(0);
    let w1 = field.level(1);
    let w2 = field.level(2);
    Ok((0..field.n_interior)
        .map(|i| {
            let c = ((w1[i] - w0[i]) * y2 * y2 - (w2[i] - w0[i]) * y1 * y1) / det;
            -params.kappa * 2.0 * s * c
        })
        .collect())
}

/// Lateral flux samples: values of the outward normal derivative on
/// boundary samples × y-levels (level-major).
#[derive(Debug, Clone)]
pub struct FluxField {
    pub samples: Vec<BoundarySample>,
    pub levels: usize,
    pub values: Vec<f64>,
}

impl FluxField {
    pub fn value(&self, k: usize, sample: usize) -> f64 {
        self.values[k * self.samples.len() + sample]
    }
}

/// One-sided second-order normal derivative of a field at every lateral
/// boundary sample, per y-level. Refused for fields carrying lateral data.
pub fn lateral_flux(
    basis: &EigenBasis,
    field: &ExtField,
    cyl: &Cylinder,
) -> Result<FluxField, ExtensionError> {
    if matches!(field.provenance, Provenance::FdAuxiliary { .. }) {
        return Err(ExtensionError::LateralDataNonzero);
    }
    debug_assert_eq!(field.levels, cyl.levels());
    let grid = basis.grid();
    let samples = grid.boundary.clone();
    let ns = samples.len();
    let k = field.levels;
    let mut values = alloc::vec![0.0; (k + 1) * ns];
    let h = if grid.dim == 1 {
        grid.spacing[0]
    } else {
        f64::min(grid.spacing[0], grid.spacing[1])
    };
    let delta = 1.5 * h;
    for (si, sample) in samples.iter().enumerate() {
        for level in 0..=k {
            let plane = field.level(level);
            // Parabola through (0, g(δ), g(2δ)) with g(0) = 0 on the lateral
            // boundary; outward derivative is -g'(0).
            let q1 = inward_value(grid, plane, sample, delta);
            let q2 = inward_value(grid, plane, sample, 2.0 * delta);
            let (g1, g2) = match (q1, q2) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    // Corner samples: the field vanishes on both adjacent
                    // faces and so does the flux.
                    values[level * ns + si] = 0.0;
                    continue;
                }
            };
            values[level * ns + si] = (g2 - 4.0 * g1) / (2.0 * delta);
        }
    }
    Ok(FluxField {
        samples,
        levels: k,
        values,
    })
}

/// Interpolate a base-plane field at `sample.point - dist · normal`.
fn inward_value(
    grid: &crate::domain::Grid,
    plane: &[f64],
    sample: &BoundarySample,
    dist: f64,
) -> Option<f64> {
    let q = [
        sample.point[0] - dist * sample.normal[0],
        sample.point[1] - dist * sample.normal[1],
    ];
    interp_plane(grid, plane, q)
}

/// Bilinear interpolation over interior nodes, with a least-squares plane
/// fallback next to curved boundaries.
fn interp_plane(grid: &crate::domain::Grid, plane: &[f64], q: [f64; 2]) -> Option<f64> {
    let nx = grid.xs.len();
    let [hx, hy] = grid.spacing;
    if grid.dim == 1 {
        let fx = (q[0] - grid.xs[0]) / hx;
        let i0 = math::floor(fx) as isize;
        if i0 < 0 || (i0 as usize) + 1 >= nx {
            return None;
        }
        let i0 = i0 as usize;
        let tx = fx - i0 as f64;
        let v = |ix: usize| -> f64 {
            match grid.interior_index(ix, 0) {
                Some(i) => plane[i],
                None => 0.0, // boundary value of a lateral-vanishing field
            }
        };
        return Some((1.0 - tx) * v(i0) + tx * v(i0 + 1));
    }
    let fx = (q[0] - grid.xs[0]) / hx;
    let fy = (q[1] - grid.ys[0]) / hy;
    let (i0, j0) = (math::floor(fx) as isize, math::floor(fy) as isize);
    if i0 < 0 || j0 < 0 || (i0 as usize) + 1 >= nx || (j0 as usize) + 1 >= grid.ys.len() {
        return None;
    }
    let (i0, j0) = (i0 as usize, j0 as usize);
    let (tx, ty) = (fx - i0 as f64, fy - j0 as f64);
    let mut all_known = true;
    let mut corner = [[0.0; 2]; 2];
    for dx in 0..2 {
        for dy in 0..2 {
            match grid.interior_index(i0 + dx, j0 + dy) {
                Some(i) => corner[dx][dy] = plane[i],
                None => {
                    // Nodes outside the open domain: for rectangle grids the
                    // boundary value is zero; for curved cuts fall through
                    // to the least-squares plane.
                    if grid.mask[(j0 + dy) * nx + (i0 + dx)] {
                        unreachable!();
                    }
                    let p = grid.node(i0 + dx, j0 + dy);
                    let on_box = math::abs(math::abs(p[0]) - grid.xs[nx - 1]) < 1e-12
                        || math::abs(math::abs(p[1]) - grid.ys[grid.ys.len() - 1]) < 1e-12;
                    if on_box {
                        corner[dx][dy] = 0.0;
                    } else {
                        all_known = false;
                    }
                }
            }
        }
    }
    if all_known {
        return Some(
            (1.0 - tx) * (1.0 - ty) * corner[0][0]
                + tx * (1.0 - ty) * corner[1][0]
                + (1.0 - tx) * ty * corner[0][1]
                + tx * ty * corner[1][1],
        );
    }
    // Least-squares plane over interior nodes within 2 cells.
    let mut sums = [0.0f64; 10]; // normal equations for [1, dx, dy]
    let mut count = 0;
    for dj in -2isize..=2 {
        for di in -2isize..=2 {
            let (ix, iy) = (i0 as isize + di, j0 as isize + dj);
            if ix < 0 || iy < 0 || ix as usize >= nx || iy as usize >= grid.ys.len() {
                continue;
            }
            if let Some(i) = grid.interior_index(ix as usize, iy as usize) {
                let p = grid.node(ix as usize, iy as usize);
                let (dx, dy) = ((p[0] - q[0]) / hx, (p[1] - q[1]) / hy);
                let v = plane[i];
                sums[0] += 1.0;
                sums[1] += dx;
                sums[2] += dy;
                sums[3] += dx * dx;
                sums[4] += dx * dy;
                sums[5] += dy * dy;
                sums[6] += v;
                sums[7] += v * dx;
                sums[8] += v * dy;
                count += 1;
            }
        }
    }
    if count < 3 {
        return None;
    }
    // Solve the 3×3 normal system for the constant term.
    let a = [
        [sums[0], sums[1], sums[2]],
        [sums[1], sums[3], sums[4]],
        [sums[2], sums[4], sums[5]],
    ];
    let b = [sums[6], sums[7], sums[8]];
    solve3(a, b).map(|c| c[0])
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let mut piv = col;
        for r in col + 1..3 {
            if math::abs(a[r][col]) > math::abs(a[piv][col]) {
                piv = r;
            }
        }
        if math::abs(a[piv][col]) < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let mut acc = b[r];
        for c in r + 1..3 {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}

/// Weighted Dirichlet energy `κ_s ∫ y^{1-2s} |∇w|²` of a field (trapezoid
/// in y with exact weight moments, edge sums in x including boundary arms).
pub fn extension_energy(
    basis: &EigenBasis,
    field: &ExtField,
    cyl: &Cylinder,
    params: &FractionalParams,
) -> f64 {
    let grid = basis.grid();
    let domain = basis.domain();
    let s = field.s;
    let n = field.n_interior;
    let dirs = if grid.dim == 1 { 2 } else { 4 };
    let arms: Vec<_> = grid
        .interior
        .iter()
        .map(|&(ix, iy)| crate::domain::cut_arms(domain, grid, ix, iy))
        .collect();
    let [hx, hy] = grid.spacing;
    let trans = if grid.dim == 1 {
        [1.0, 1.0, 0.0, 0.0]
    } else {
        [hy, hy, hx, hx]
    };
    // In-plane gradient energy per level.
    let ex = |level: usize| -> f64 {
        let plane = field.level(level);
        let mut terms = Vec::with_capacity(n * 2);
        for (i, arm4) in arms.iter().enumerate() {
            for (d, arm) in arm4.iter().enumerate().take(dirs) {
                // Count interior edges once (from the lower index side);
                // every cut arm belongs to exactly one node.
                if arm.neighbor != usize::MAX {
                    if arm.neighbor > i {
                        let dw = plane[arm.neighbor] - plane[i];
                        terms.push(dw * dw / arm.len * trans[d]);
                    }
                } else {
                    let dw = plane[i];
                    terms.push(dw * dw / arm.len * trans[d]);
                }
            }
        }
        pairwise_sum(&terms)
    };
    let mut ex_vals = Vec::with_capacity(field.levels + 1);
    for k in 0..=field.levels {
        ex_vals.push(ex(k));
    }
    let energy_x = cyl.weighted_y_integral(s, |k| ex_vals[k]);

    // Vertical gradient energy: per-edge exact energy of the local
    // harmonic profile, 2s (Δw)²/Δ(y^{2s}); resolves the y^{2s} layer at
    // the base exactly and reduces to (Δw)²/Δy at s = 1/2.
    let area: Vec<f64> = arms
        .iter()
        .map(|a| {
            if grid.dim == 1 {
                0.5 * (a[0].len + a[1].len)
            } else {
                0.25 * (a[0].len + a[1].len) * (a[2].len + a[3].len)
            }
        })
        .collect();
    let mut terms = Vec::with_capacity(field.levels);
    for k in 0..field.levels {
        let dp = math::powf(cyl.y[k + 1], 2.0 * s) - math::powf(cyl.y[k], 2.0 * s);
        let lo = field.level(k);
        let hi = field.level(k + 1);
        let mut inner = Vec::with_capacity(n);
        for i in 0..n {
            let dw = hi[i] - lo[i];
            inner.push(dw * dw * area[i]);
        }
        terms.push(2.0 * s / dp * pairwise_sum(&inner));
    }
    let energy_y = pairwise_sum(&terms);
    params.kappa * (energy_x + energy_y)
}

/// Pointwise value of the Green extension `E[G_t]` at `(x, y)`, evaluated
/// as the free extension `c_{N,s}/|(x-t, y)|^{N-2s}` minus the regular
/// part, with the regular part computed by subordination of
/// `p_free - p_Ω` (exponentially small at short times, so the split is
/// uniformly accurate even on top of the singularity).
pub fn green_extension_value(
    basis: &EigenBasis,
    t: [f64; 2],
    x: [f64; 2],
    y: f64,
    s: f64,
    params: &FractionalParams,
) -> Result<f64, ExtensionError> {
    use crate::special::{gamma, gamma_reg_lower};
    let d = check_interior_distance(basis, t)?;
    let spec = QuadratureSpec::build(basis, d, Accuracy::Best)?;
    let n = params.dim as f64;
    let r2 = {
        let dx = x[0] - t[0];
        let dy = x[1] - t[1];
        dx * dx + dy * dy
    };
    let rt2 = r2 + y * y;
    let phi_t = basis.values_at(t);
    let phi_x = basis.values_at(x);
    let weights: Vec<f64> = phi_t.iter().zip(&phi_x).map(|(&a, &b)| a * b).collect();
    let q = heat_mode_sums(basis.lambdas(), &weights, &spec);
    let rule = spec.rule();
    let vals: Vec<f64> = rule
        .tau
        .iter()
        .zip(&q)
        .map(|(&tau, &qk)| {
            let free = math::powf(4.0 * core::f64::consts::PI * tau, -n / 2.0)
                * math::exp(-r2 / (4.0 * tau));
            math::powf(tau, s - 1.0) * math::exp(-y * y / (4.0 * tau)) * (free - qk)
        })
        .collect();
    let body = rule.integrate_values(&vals);
    // Free-kernel tail beyond the numeric window (the domain kernel is
    // dead there): ∫_{τcut}^∞ τ^{s-1-N/2} e^{-r̃²/(4τ)} dτ.
    let p = n / 2.0 - s;
    let u0 = rt2 / (4.0 * spec.tau_cut);
    let tail = math::powf(4.0 * core::f64::consts::PI, -n / 2.0)
        * math::powf(rt2 / 4.0, s - n / 2.0)
        * gamma_reg_lower(p, u0)
        * gamma(p);
    let regular = (body + tail) / gamma(s);
    let free_ext = params.c_fund * math::powf(rt2, (2.0 * s - n) / 2.0);
    Ok(free_ext - regular)
}

/// Lateral flux of the Green extension `E[G_t]` on the grid's boundary
/// samples, evaluated by subordination (accurate down to `y = 0`).
pub fn green_lateral_flux(
    basis: &EigenBasis,
    t: [f64; 2],
    s: f64,
    cyl: &Cylinder,
) -> Result<FluxField, ExtensionError> {
    let samples = basis.grid().boundary.clone();
    let values = flux_at_samples(basis, t, s, cyl, &samples)?;
    Ok(FluxField {
        samples,
        levels: cyl.levels(),
        values,
    })
}

/// Flux values of `E[G_t]` at arbitrary boundary samples (level-major).
fn flux_at_samples(
    basis: &EigenBasis,
    t: [f64; 2],
    s: f64,
    cyl: &Cylinder,
    samples: &[BoundarySample],
) -> Result<Vec<f64>, ExtensionError> {
    let d = check_interior_distance(basis, t)?;
    let spec = QuadratureSpec::build(basis, d, Accuracy::Best)?;
    let phi_t = basis.values_at(t);
    let k = cyl.levels();
    let ns = samples.len();
    let mut values = alloc::vec![0.0; (k + 1) * ns];
    let mut weights = alloc::vec![0.0; basis.len()];
    for (si, sample) in samples.iter().enumerate() {
        let nd = basis.normal_derivs(sample);
        for j in 0..basis.len() {
            weights[j] = phi_t[j] * nd[j];
        }
        let q = heat_mode_sums(basis.lambdas(), &weights, &spec);
        for (level, &y) in cyl.y.iter().enumerate() {
            values[level * ns + si] = subordination_transform(&q, &spec, s, y);
        }
    }
    Ok(values)
}

/// Solve the auxiliary problem `U_axis`: weighted-harmonic in the cylinder,
/// zero conormal trace on the base, lateral datum `∂_{x_axis} E[G_t̄]`,
/// decay at the truncation height.
pub fn solve_ui(
    basis: &EigenBasis,
    t_bar: [f64; 2],
    axis: usize,
    s: f64,
    cyl: &Cylinder,
    _params: &FractionalParams,
) -> Result<ExtField, ExtensionError> {
    if math::abs(t_bar[axis]) > 1e-12 {
        return Err(ExtensionError::PointOffHyperplane {
            axis,
            value: t_bar[axis],
        });
    }
    check_interior_distance(basis, t_bar)?;
    let grid = basis.grid();
    let cuts = collect_cut_points(basis.domain(), grid);
    // Datum ∂_{x_axis} E = ν_axis ∂_ν E on the lateral boundary (the
    // tangential gradient of a lateral-vanishing field is zero).
    let cut_samples: Vec<BoundarySample> = cuts
        .iter()
        .map(|c| BoundarySample {
            point: c.point,
            normal: c.normal,
            weight: 0.0,
            face: 0,
        })
        .collect();
    let flux = flux_at_samples(basis, t_bar, s, cyl, &cut_samples)?;
    let ne = cuts.len();
    let mut lateral = alloc::vec![0.0; (cyl.levels() + 1) * ne];
    for (e, c) in cuts.iter().enumerate() {
        for k in 0..=cyl.levels() {
            lateral[k * ne + e] = c.normal[axis] * flux[k * ne + e];
        }
    }
    let zeros = alloc::vec![0.0; grid.interior_count()];
    let sol = solve_cylinder(
        basis.domain(),
        grid,
        cyl,
        s,
        BaseCondition::NeumannZero,
        &zeros,
        &cuts,
        Some(&lateral),
        MAX_CG_ITER,
    )?;
    Ok(ExtField {
        s,
        provenance: Provenance::FdAuxiliary { axis },
        levels: cyl.levels(),
        n_interior: grid.interior_count(),
        values: sol.values,
    })
}

/// Boundary-integral representation of `U_axis(t, 0)`:
/// `-κ_s ∫_{∂_L} y^{1-2s} ∂_{x_axis}E[G_t̄] · ∂_{ν*}E[G_t] dσ`.
pub fn u1_representation(
    basis: &EigenBasis,
    t_bar: [f64; 2],
    axis: usize,
    t: [f64; 2],
    s: f64,
    cyl: &Cylinder,
    params: &FractionalParams,
) -> Result<f64, ExtensionError> {
    if math::abs(t_bar[axis]) > 1e-12 {
        return Err(ExtensionError::PointOffHyperplane {
            axis,
            value: t_bar[axis],
        });
    }
    let flux_bar = green_lateral_flux(basis, t_bar, s, cyl)?;
    let flux_t = green_lateral_flux(basis, t, s, cyl)?;
    let ns = flux_bar.samples.len();
    let mut terms = Vec::with_capacity(ns);
    for (si, sample) in flux_bar.samples.iter().enumerate() {
        let inner = cyl.weighted_y_integral(s, |k| {
            flux_bar.value(k, si) * sample.normal[axis] * flux_t.value(k, si)
        });
        terms.push(sample.weight * inner);
    }
    Ok(-params.kappa * pairwise_sum(&terms))
}

/// Robin gradient by the boundary-flux representation:
/// `∂_i R(t) = κ_s ∫_{∂_L} y^{1-2s} (∂_{ν*} E[G_t])² ν_i dσ`.
pub fn robin_gradient_boundary(
    basis: &EigenBasis,
    t: [f64; 2],
    s: f64,
    cyl: &Cylinder,
    params: &FractionalParams,
) -> Result<[f64; 2], ExtensionError> {
    let flux = green_lateral_flux(basis, t, s, cyl)?;
    let ns = flux.samples.len();
    let mut out = [0.0; 2];
    for axis in 0..basis.domain().dim() {
        let mut terms = Vec::with_capacity(ns);
        for (si, sample) in flux.samples.iter().enumerate() {
            let inner = cyl.weighted_y_integral(s, |k| {
                let f = flux.value(k, si);
                f * f
            });
            terms.push(sample.weight * sample.normal[axis] * inner);
        }
        out[axis] = params.kappa * pairwise_sum(&terms);
    }
    Ok(out)
}

/// Robin Hessian column-by-column: the flux field is differentiated in the
/// source point (base step `4 ×` the grid spacing, five-point fourth-order
/// stencil) and paired with the gradient factor `ν_i ∂_ν E`.
pub fn robin_hessian_boundary(
    basis: &EigenBasis,
    t: [f64; 2],
    s: f64,
    cyl: &Cylinder,
    params: &FractionalParams,
) -> Result<[[f64; 2]; 2], ExtensionError> {
    let dim = basis.domain().dim();
    let grid = basis.grid();
    let h_t = 4.0 * f64::max(grid.spacing[0], grid.spacing[1]);
    let flux_t = green_lateral_flux(basis, t, s, cyl)?;
    let ns = flux_t.samples.len();
    let mut hess = [[0.0; 2]; 2];
    for jcol in 0..dim {
        let shifted = |mult: f64| -> Result<FluxField, ExtensionError> {
            let mut tq = t;
            tq[jcol] += mult * h_t;
            green_lateral_flux(basis, tq, s, cyl)
        };
        let fp1 = shifted(1.0)?;
        let fm1 = shifted(-1.0)?;
        let fp2 = shifted(2.0)?;
        let fm2 = shifted(-2.0)?;
        for irow in 0..dim {
            let mut terms = Vec::with_capacity(ns);
            for (si, sample) in flux_t.samples.iter().enumerate() {
                let inner = cyl.weighted_y_integral(s, |k| {
                    let df = (8.0 * (fp1.value(k, si) - fm1.value(k, si))
                        - (fp2.value(k, si) - fm2.value(k, si)))
                        / (12.0 * h_t);
                    sample.normal[irow] * flux_t.value(k, si) * df
                });
                terms.push(sample.weight * inner);
            }
            hess[irow][jcol] = 2.0 * params.kappa * pairwise_sum(&terms);
        }
    }
    Ok(hess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::eigenbasis;
    use crate::domain::{build_domain, DomainKind, DomainSpec};
    use core::f64::consts::PI;

    fn square_basis(h_div: usize, modes: usize) -> EigenBasis {
        let (dom, grid) = build_domain(&DomainSpec {
            kind: DomainKind::Rectangle,
            half_extents: alloc::vec![PI / 2.0, PI / 2.0],
            spacing: PI / h_div as f64,
        })
        .unwrap();
        eigenbasis(&dom, &grid, modes).unwrap()
    }

    #[test]
    fn half_exponent_profile_pointwise() {
        // s = 1/2: E[φ₁](x, y) = φ₁(x) e^{-√2 y}; check at ((0,0), 1).
        let basis = square_basis(32, 1);
        let cyl = Cylinder::new(&basis, &CylinderParams {
            levels: 64,
            ..CylinderParams::default()
        })
        .unwrap();
        let field = extend(&basis, &ExtSource::Coeffs(alloc::vec![1.0]), 0.5, &cyl, ExtRoute::Spectral)
            .unwrap();
        // Find the level nearest y = 1 and the center node.
        let (kbest, _) = cyl
            .y
            .iter()
            .enumerate()
            .min_by(|a, b| {
                math::abs(*a.1 - 1.0)
                    .partial_cmp(&math::abs(*b.1 - 1.0))
                    .unwrap()
            })
            .unwrap();
        let y = cyl.y[kbest];
        let center = basis.grid().nearest_interior([0.0, 0.0]).unwrap();
        let got = field.value(kbest, center);
        let want = (2.0 / PI) * math::exp(-math::sqrt(2.0) * y);
        assert!(
            math::abs(got - want) < 1e-10 * want,
            "value {got} vs {want}"
        );
    }

    #[test]
    fn spectral_trace_is_exact() {
        let basis = square_basis(32, 3);
        let cyl = Cylinder::new(&basis, &CylinderParams {
            levels: 64,
            ..CylinderParams::default()
        })
        .unwrap();
        let params = FractionalParams::new(2, 0.3).unwrap();
        let field = extend(&basis, &ExtSource::Coeffs(alloc::vec![1.0]), 0.3, &cyl, ExtRoute::Spectral)
            .unwrap();
        let trace = neumann_trace(&basis, &field, &cyl, &params).unwrap();
        let lam_s = math::powf(basis.lambda(0), 0.3);
        for (i, &(ix, iy)) in basis.grid().interior.iter().enumerate() {
            let phi = basis.values_at(basis.grid().node(ix, iy))[0];
            assert!(math::abs(trace[i] - lam_s * phi) < 1e-12);
        }
    }

    #[test]
    fn cylinder_invariants() {
        let basis = square_basis(32, 1);
        // Default height is inert.
        let cyl = Cylinder::new(&basis, &CylinderParams::default()).unwrap();
        assert!(math::exp(-math::sqrt(basis.lambda(0)) * cyl.y_max) <= 1e-10);
        // Explicit too-short height is rejected.
        assert!(matches!(
            Cylinder::new(
                &basis,
                &CylinderParams {
                    y_max: Some(2.0),
                    ..CylinderParams::default()
                }
            ),
            Err(ExtensionError::TruncationTooShort { .. })
        ));
        // Strictly increasing graded mesh from zero.
        assert_eq!(cyl.y[0], 0.0);
        for k in 0..cyl.levels() {
            assert!(cyl.y[k + 1] > cyl.y[k]);
        }
    }

    #[test]
    fn flux_refused_on_auxiliary_fields() {
        let basis = square_basis(32, 4);
        let cyl = Cylinder::new(&basis, &CylinderParams {
            levels: 32,
            ..CylinderParams::default()
        })
        .unwrap();
        let field = ExtField {
            s: 0.5,
            provenance: Provenance::FdAuxiliary { axis: 0 },
            levels: cyl.levels(),
            n_interior: basis.grid().interior_count(),
            values: alloc::vec![0.0; (cyl.levels() + 1) * basis.grid().interior_count()],
        };
        assert!(matches!(
            lateral_flux(&basis, &field, &cyl),
            Err(ExtensionError::LateralDataNonzero)
        ));
    }
}
