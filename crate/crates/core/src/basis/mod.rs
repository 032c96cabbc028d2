//! Dirichlet Laplacian eigenbases and the fractional calculus acting on
//! eigen-coefficients.
//!
//! Intervals and rectangles use the closed-form sine (tensor) bases;
//! ellipses use eigenpairs of a symmetrized cut-cell finite-volume
//! Laplacian with eigenvalues Richardson-extrapolated across two grids.
//! Mode lists always close eigenvalue clusters: if the requested count
//! would split a degenerate eigenvalue, the whole cluster is included, so
//! every kernel formed from the basis stays reflection-invariant.

mod numeric;

use alloc::vec::Vec;
use core::fmt;

use crate::domain::{refined_grid, BoundarySample, Domain, DomainKind, Grid};
use crate::math;
use crate::quadrature::pairwise_sum;
use core::f64::consts::PI;

pub(crate) use numeric::NumericBasis;

#[derive(Debug, Clone, PartialEq)]
pub enum BasisError {
    InvalidModeCount(usize),
    /// Numeric bases cap the mode count at a quarter of the interior nodes.
    TooManyModes { requested: usize, cap: usize },
    Eigensolve(crate::linalg::LinalgError),
    /// Fractional order outside `(0, 1]` (`s = 1` is the classical-limit
    /// diagnostic).
    OrderOutOfRange(f64),
    CoefficientCount { got: usize, cap: usize },
}

impl fmt::Display for BasisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidModeCount(j) => write!(f, "mode count {j} must be at least 1"),
            Self::TooManyModes { requested, cap } => write!(
                f,
                "requested {requested} modes, but the grid supports at most {cap} (a quarter of the interior nodes)"
            ),
            Self::Eigensolve(e) => write!(f, "eigensolver failed: {e}"),
            Self::OrderOutOfRange(s) => {
                write!(f, "fractional exponent {s} must lie in (0, 1]")
            }
            Self::CoefficientCount { got, cap } => {
                write!(f, "coefficient vector of length {got} exceeds mode count {cap}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BasisError {}

/// Per-mode values, gradients and Hessians at one point.
#[derive(Debug, Clone)]
pub struct PointEval {
    pub phi: Vec<f64>,
    pub grad: Vec<[f64; 2]>,
    /// Packed Hessian entries `[∂₁₁, ∂₁₂, ∂₂₂]` per mode.
    pub hess: Vec<[f64; 3]>,
}

enum ModeSet {
    Interval {
        a: f64,
        js: Vec<usize>,
    },
    Rectangle {
        a: f64,
        b: f64,
        jk: Vec<(usize, usize)>,
    },
    Numeric(NumericBasis),
}

/// Dirichlet Laplacian eigenbasis on a symmetric domain, L²-normalized.
pub struct EigenBasis {
    domain: Domain,
    grid: Grid,
    lambdas: Vec<f64>,
    modes: ModeSet,
}

impl EigenBasis {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn lambda(&self, j: usize) -> f64 {
        self.lambdas[j]
    }

    /// Values, gradients and Hessians of every mode at an interior point.
    pub fn point_eval(&self, p: [f64; 2]) -> PointEval {
        match &self.modes {
            ModeSet::Interval { a, js } => {
                let omega = PI / (2.0 * a);
                let norm = math::sqrt(1.0 / a);
                let mut phi = Vec::with_capacity(js.len());
                let mut grad = Vec::with_capacity(js.len());
                let mut hess = Vec::with_capacity(js.len());
                for (&j, &lam) in js.iter().zip(&self.lambdas) {
                    let arg = j as f64 * omega * (p[0] + a);
                    let sv = norm * math::sin(arg);
                    let cv = norm * j as f64 * omega * math::cos(arg);
                    phi.push(sv);
                    grad.push([cv, 0.0]);
                    hess.push([-lam * sv, 0.0, 0.0]);
                }
                PointEval { phi, grad, hess }
            }
            ModeSet::Rectangle { a, b, jk } => {
                let (oa, ob) = (PI / (2.0 * a), PI / (2.0 * b));
                let norm = math::sqrt(1.0 / (a * b));
                let mut phi = Vec::with_capacity(jk.len());
                let mut grad = Vec::with_capacity(jk.len());
                let mut hess = Vec::with_capacity(jk.len());
                for &(j, k) in jk {
                    let (wj, wk) = (j as f64 * oa, k as f64 * ob);
                    let (ax, ay) = (wj * (p[0] + a), wk * (p[1] + b));
                    let (sx, cx) = (math::sin(ax), math::cos(ax));
                    let (sy, cy) = (math::sin(ay), math::cos(ay));
                    phi.push(norm * sx * sy);
                    grad.push([norm * wj * cx * sy, norm * wk * sx * cy]);
                    hess.push([
                        -norm * wj * wj * sx * sy,
                        norm * wj * wk * cx * cy,
                        -norm * wk * wk * sx * sy,
                    ]);
                }
                PointEval { phi, grad, hess }
            }
            ModeSet::Numeric(nb) => nb.point_eval(p),
        }
    }

    /// Mode values only (cheaper than [`Self::point_eval`]).
    pub fn values_at(&self, p: [f64; 2]) -> Vec<f64> {
        match &self.modes {
            ModeSet::Interval { a, js } => {
                let omega = PI / (2.0 * a);
                let norm = math::sqrt(1.0 / a);
                js.iter()
                    .map(|&j| norm * math::sin(j as f64 * omega * (p[0] + a)))
                    .collect()
            }
            ModeSet::Rectangle { a, b, jk } => {
                let (oa, ob) = (PI / (2.0 * a), PI / (2.0 * b));
                let norm = math::sqrt(1.0 / (a * b));
                jk.iter()
                    .map(|&(j, k)| {
                        norm * math::sin(j as f64 * oa * (p[0] + a))
                            * math::sin(k as f64 * ob * (p[1] + b))
                    })
                    .collect()
            }
            ModeSet::Numeric(nb) => nb.point_eval(p).phi,
        }
    }

    /// Outward normal derivative of every mode at a boundary sample.
    pub fn normal_derivs(&self, sample: &BoundarySample) -> Vec<f64> {
        match &self.modes {
            ModeSet::Interval { a, js } => {
                let omega = PI / (2.0 * a);
                let norm = math::sqrt(1.0 / a);
                js.iter()
                    .map(|&j| {
                        // ∂_x φ at +a carries cos(jπ) = (-1)^j; at -a, cos(0) = 1.
                        let dx = if sample.point[0] > 0.0 {
                            norm * j as f64 * omega * if j % 2 == 0 { 1.0 } else { -1.0 }
                        } else {
                            norm * j as f64 * omega
                        };
                        dx * sample.normal[0]
                    })
                    .collect()
            }
            ModeSet::Rectangle { a, b, jk } => {
                let (oa, ob) = (PI / (2.0 * a), PI / (2.0 * b));
                let norm = math::sqrt(1.0 / (a * b));
                jk.iter()
                    .map(|&(j, k)| match sample.face {
                        0 | 1 => {
                            // faces x = ±a: ∂_ν φ = ±∂_x φ
                            let sgn_j = if j % 2 == 0 { 1.0 } else { -1.0 };
                            let dx_at_a = norm * j as f64 * oa * sgn_j
                                * math::sin(k as f64 * ob * (sample.point[1] + b));
                            if sample.face == 0 {
                                dx_at_a
                            } else {
                                // ∂_ν = -∂_x at x = -a; cos(0) = 1 there
                                -(norm * j as f64 * oa
                                    * math::sin(k as f64 * ob * (sample.point[1] + b)))
                            }
                        }
                        _ => {
                            let sgn_k = if k % 2 == 0 { 1.0 } else { -1.0 };
                            let base = norm
                                * k as f64
                                * ob
                                * math::sin(j as f64 * oa * (sample.point[0] + a));
                            if sample.face == 2 {
                                base * sgn_k
                            } else {
                                -base
                            }
                        }
                    })
                    .collect()
            }
            ModeSet::Numeric(nb) => nb.normal_derivs(sample),
        }
    }

    /// Field `Σ_j c_j φ_j` evaluated at every interior node of the basis
    /// grid, in interior order.
    pub fn weighted_field(&self, coeffs: &[f64]) -> Vec<f64> {
        debug_assert!(coeffs.len() <= self.len());
        match &self.modes {
            ModeSet::Interval { a, js } => {
                let omega = PI / (2.0 * a);
                let norm = math::sqrt(1.0 / a);
                self.grid
                    .interior
                    .iter()
                    .map(|&(ix, _)| {
                        let x = self.grid.xs[ix];
                        let mut terms: Vec<f64> = coeffs
                            .iter()
                            .zip(js)
                            .map(|(&c, &j)| c * norm * math::sin(j as f64 * omega * (x + a)))
                            .collect();
                        pairwise_in_place(&mut terms)
                    })
                    .collect()
            }
            ModeSet::Rectangle { a, b, jk } => {
                // Per-axis sine tables keep the cost at one multiply-add per
                // (mode, node).
                let (oa, ob) = (PI / (2.0 * a), PI / (2.0 * b));
                let norm = math::sqrt(1.0 / (a * b));
                let jmax = jk.iter().map(|&(j, _)| j).max().unwrap_or(1);
                let kmax = jk.iter().map(|&(_, k)| k).max().unwrap_or(1);
                let nx = self.grid.xs.len();
                let ny = self.grid.ys.len();
                let mut sx = alloc::vec![0.0; (jmax + 1) * nx];
                for j in 1..=jmax {
                    for (ix, &x) in self.grid.xs.iter().enumerate() {
                        sx[j * nx + ix] = math::sin(j as f64 * oa * (x + a));
                    }
                }
                let mut sy = alloc::vec![0.0; (kmax + 1) * ny];
                for k in 1..=kmax {
                    for (iy, &y) in self.grid.ys.iter().enumerate() {
                        sy[k * ny + iy] = math::sin(k as f64 * ob * (y + b));
                    }
                }
                self.grid
                    .interior
                    .iter()
                    .map(|&(ix, iy)| {
                        let mut terms: Vec<f64> = coeffs
                            .iter()
                            .zip(jk)
                            .map(|(&c, &(j, k))| c * norm * sx[j * nx + ix] * sy[k * ny + iy])
                            .collect();
                        pairwise_in_place(&mut terms)
                    })
                    .collect()
            }
            ModeSet::Numeric(nb) => nb.weighted_field(coeffs),
        }
    }

    /// Discrete `∫ φ_i φ_j` over the grid (trapezoid; boundary values
    /// vanish).
    pub fn l2_inner(&self, i: usize, j: usize) -> f64 {
        match &self.modes {
            ModeSet::Numeric(nb) => nb.l2_inner(i, j),
            _ => {
                let cell = if self.grid.dim == 1 {
                    self.grid.spacing[0]
                } else {
                    self.grid.spacing[0] * self.grid.spacing[1]
                };
                let mut terms = Vec::with_capacity(self.grid.interior.len());
                for &(ix, iy) in &self.grid.interior {
                    let p = self.grid.node(ix, iy);
                    let vals = self.values_two(p, i, j);
                    terms.push(vals.0 * vals.1 * cell);
                }
                pairwise_in_place(&mut terms)
            }
        }
    }

    fn values_two(&self, p: [f64; 2], i: usize, j: usize) -> (f64, f64) {
        match &self.modes {
            ModeSet::Interval { a, js } => {
                let omega = PI / (2.0 * a);
                let norm = math::sqrt(1.0 / a);
                let f = |m: usize| norm * math::sin(js[m] as f64 * omega * (p[0] + a));
                (f(i), f(j))
            }
            ModeSet::Rectangle { a, b, jk } => {
                let (oa, ob) = (PI / (2.0 * a), PI / (2.0 * b));
                let norm = math::sqrt(1.0 / (a * b));
                let f = |m: usize| {
                    let (jj, kk) = jk[m];
                    norm * math::sin(jj as f64 * oa * (p[0] + a))
                        * math::sin(kk as f64 * ob * (p[1] + b))
                };
                (f(i), f(j))
            }
            ModeSet::Numeric(_) => unreachable!(),
        }
    }
}

fn pairwise_in_place(terms: &mut [f64]) -> f64 {
    pairwise_sum(terms)
}

/// Build the eigenbasis with (at least) `j_count` modes; the count is
/// extended to close a degenerate eigenvalue cluster when necessary.
pub fn eigenbasis(domain: &Domain, grid: &Grid, j_count: usize) -> Result<EigenBasis, BasisError> {
    if j_count == 0 {
        return Err(BasisError::InvalidModeCount(j_count));
    }
    match domain.kind {
        DomainKind::Interval => {
            let a = domain.half_extents[0];
            let omega = PI / (2.0 * a);
            let js: Vec<usize> = (1..=j_count).collect();
            let lambdas: Vec<f64> = js
                .iter()
                .map(|&j| (j as f64 * omega) * (j as f64 * omega))
                .collect();
            Ok(EigenBasis {
                domain: domain.clone(),
                grid: grid.clone(),
                lambdas,
                modes: ModeSet::Interval { a, js },
            })
        }
        DomainKind::Rectangle => {
            let [a, b] = domain.half_extents;
            let (lambdas, jk) = rectangle_modes(a, b, j_count);
            Ok(EigenBasis {
                domain: domain.clone(),
                grid: grid.clone(),
                lambdas,
                modes: ModeSet::Rectangle { a, b, jk },
            })
        }
        DomainKind::Ellipse => {
            let cap = grid.interior_count() / 4;
            if j_count > cap {
                return Err(BasisError::TooManyModes {
                    requested: j_count,
                    cap,
                });
            }
            let fine = refined_grid(domain, grid);
            let nb = NumericBasis::build(domain, grid.clone(), fine, j_count)
                .map_err(BasisError::Eigensolve)?;
            let lambdas = nb.lambdas.clone();
            Ok(EigenBasis {
                domain: domain.clone(),
                grid: grid.clone(),
                lambdas,
                modes: ModeSet::Numeric(nb),
            })
        }
    }
}

/// Enumerate the `j_count` lowest rectangle modes (cluster-closed), sorted
/// by eigenvalue with lexicographic tie-break.
fn rectangle_modes(a: f64, b: f64, j_count: usize) -> (Vec<f64>, Vec<(usize, usize)>) {
    let (oa, ob) = (PI / (2.0 * a), PI / (2.0 * b));
    let mut lambda_cap = (oa * oa + ob * ob) * 4.0 * (j_count as f64 + 4.0);
    loop {
        let jmax = (math::sqrt(lambda_cap) / oa) as usize + 1;
        let kmax = (math::sqrt(lambda_cap) / ob) as usize + 1;
        let mut modes: Vec<(f64, usize, usize)> = Vec::new();
        for j in 1..=jmax {
            for k in 1..=kmax {
                let lam = (j as f64 * oa) * (j as f64 * oa) + (k as f64 * ob) * (k as f64 * ob);
                if lam <= lambda_cap {
                    modes.push((lam, j, k));
                }
            }
        }
        if modes.len() >= j_count + 4 {
            modes.sort_by(|x, y| {
                x.0.partial_cmp(&y.0)
                    .unwrap()
                    .then(x.1.cmp(&y.1))
                    .then(x.2.cmp(&y.2))
            });
            let mut take = j_count;
            while take < modes.len() && modes[take].0 <= modes[j_count - 1].0 * (1.0 + 1e-12) {
                take += 1;
            }
            if take < modes.len() {
                let lambdas = modes[..take].iter().map(|m| m.0).collect();
                let jk = modes[..take].iter().map(|m| (m.1, m.2)).collect();
                return (lambdas, jk);
            }
        }
        lambda_cap *= 1.7;
    }
}

/// Apply `(-Δ)^s` on eigen-coefficients: `a_j ↦ a_j λ_j^s`.
///
/// `s = 1` is admitted as the classical-limit diagnostic.
pub fn apply_fractional(basis: &EigenBasis, coeffs: &[f64], s: f64) -> Result<Vec<f64>, BasisError> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(BasisError::OrderOutOfRange(s));
    }
    if coeffs.len() > basis.len() {
        return Err(BasisError::CoefficientCount {
            got: coeffs.len(),
            cap: basis.len(),
        });
    }
    Ok(coeffs
        .iter()
        .zip(basis.lambdas())
        .map(|(&c, &lam)| c * math::powf(lam, s))
        .collect())
}

/// Squared `H₀ˢ` norm of a coefficient vector: `Σ a_j² λ_j^s`.
pub fn hs_norm_sq(basis: &EigenBasis, coeffs: &[f64], s: f64) -> Result<f64, BasisError> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(BasisError::OrderOutOfRange(s));
    }
    if coeffs.len() > basis.len() {
        return Err(BasisError::CoefficientCount {
            got: coeffs.len(),
            cap: basis.len(),
        });
    }
    let terms: Vec<f64> = coeffs
        .iter()
        .zip(basis.lambdas())
        .map(|(&c, &lam)| c * c * math::powf(lam, s))
        .collect();
    Ok(pairwise_sum(&terms))
}
