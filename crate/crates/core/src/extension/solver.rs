//! Finite-volume solver for the degenerate cylinder equation
//! `-div(y^{1-2s} ∇w) = 0` on `Ω × (0, Y_max)` with a graded y-mesh.
//!
//! The discrete operator comes from the weighted quadratic form: x-gradient
//! terms carry the exact `y^{1-2s}` moment of the dual cell around each
//! level, vertical flux terms carry the midpoint weight (the midpoint
//! variant preserves the `y^{2s}` boundary layer on graded meshes). The
//! resulting SPD system is solved matrix-free by Jacobi-preconditioned
//! conjugate gradients to relative residual 1e-10.

use alloc::vec::Vec;

use crate::domain::{cut_arms, Arm, Domain, Grid};
use crate::linalg::{pcg_op, LinalgError};
use crate::math;

use super::Cylinder;

pub(crate) const CG_TOL: f64 = 1e-10;

/// Lateral boundary crossing of a cut grid arm.
#[derive(Debug, Clone)]
pub(crate) struct CutEntry {
    /// Interior node the arm starts from.
    pub node: usize,
    /// Arm direction (0..4 = +x, -x, +y, -y).
    pub dir: usize,
    pub point: [f64; 2],
    pub normal: [f64; 2],
    pub arm_len: f64,
}

/// Deterministic enumeration of all lateral cut points of the grid.
pub(crate) fn collect_cut_points(domain: &Domain, grid: &Grid) -> Vec<CutEntry> {
    let mut out = Vec::new();
    let dirs = if grid.dim == 1 { 2 } else { 4 };
    for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
        let arms = cut_arms(domain, grid, ix, iy);
        for (d, arm) in arms.iter().enumerate().take(dirs) {
            if let Some(point) = arm.cut {
                out.push(CutEntry {
                    node: i,
                    dir: d,
                    point,
                    normal: crate::domain::boundary_normal(domain, point),
                    arm_len: arm.len,
                });
            }
        }
    }
    out
}

/// Geometry tables shared by the operator apply and the assembly of
/// right-hand sides.
struct Tables {
    n: usize,
    levels: usize,
    /// Base arm data per interior node.
    arms: Vec<[Arm; 4]>,
    /// Transverse face length per direction.
    trans: [f64; 4],
    /// Base cell area per node.
    area: Vec<f64>,
    /// Dual-cell `y^{1-2s}` moment per level (x-gradient weight).
    mu: Vec<f64>,
    /// Vertical edge coefficient `ŷ^{1-2s}/Δy` per edge `k → k+1`.
    nu_over_dy: Vec<f64>,
    dirs: usize,
}

fn weight_moment(s: f64, p: f64, q: f64) -> f64 {
    // ∫_p^q y^{1-2s} dy
    let e = 2.0 - 2.0 * s;
    (math::powf(q, e) - math::powf(p, e)) / e
}

fn build_tables(domain: &Domain, grid: &Grid, cyl: &Cylinder, s: f64) -> Tables {
    let n = grid.interior.len();
    let levels = cyl.levels();
    let [hx, hy] = grid.spacing;
    let dirs = if grid.dim == 1 { 2 } else { 4 };
    let arms: Vec<[Arm; 4]> = grid
        .interior
        .iter()
        .map(|&(ix, iy)| cut_arms(domain, grid, ix, iy))
        .collect();
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
    let trans = if grid.dim == 1 {
        [1.0, 1.0, 0.0, 0.0]
    } else {
        [hy, hy, hx, hx]
    };
    let y = &cyl.y;
    let mut mu = alloc::vec![0.0; levels + 1];
    for k in 0..=levels {
        let lo = if k == 0 { 0.0 } else { 0.5 * (y[k - 1] + y[k]) };
        let hi = if k == levels {
            y[levels]
        } else {
            0.5 * (y[k] + y[k + 1])
        };
        mu[k] = weight_moment(s, lo, hi);
    }
    // Vertical edge conductance: exact resistance of the local harmonic
    // profile, 2s/Δ(y^{2s}). Midpoint weights ŷ^{1-2s}/Δy agree to O(Δy²)
    // away from the base but mis-resolve the y^{2s} boundary layer in the
    // first cell by a factor 2^{2s-1}/(2s) for s ≠ 1/2.
    let mut nu_over_dy = alloc::vec![0.0; levels];
    for k in 0..levels {
        let p = math::powf(y[k + 1], 2.0 * s) - math::powf(y[k], 2.0 * s);
        nu_over_dy[k] = 2.0 * s / p;
    }
    Tables {
        n,
        levels,
        arms,
        trans,
        area,
        mu,
        nu_over_dy,
        dirs,
    }
}

/// Which condition holds on the base `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BaseCondition {
    /// `w(·, 0)` prescribed (harmonic extensions).
    Dirichlet,
    /// Zero weighted conormal flux (auxiliary odd problems).
    NeumannZero,
}

pub(crate) struct CylinderSolve {
    /// Full field, `(levels+1) × n`, level-major, including the base level
    /// and the homogeneous top.
    pub values: Vec<f64>,
    #[allow(dead_code)]
    pub iterations: usize,
}

/// Solve the weighted cylinder problem.
///
/// `base_values`: datum at `y = 0` for the Dirichlet case (length `n`).
/// `lateral`: datum at the cut points per level (`(levels+1) × n_cut`,
/// level-major), or `None` for homogeneous lateral data.
pub(crate) fn solve_cylinder(
    domain: &Domain,
    grid: &Grid,
    cyl: &Cylinder,
    s: f64,
    base: BaseCondition,
    base_values: &[f64],
    cuts: &[CutEntry],
    lateral: Option<&[f64]>,
    max_iter: usize,
) -> Result<CylinderSolve, LinalgError> {
    let t = build_tables(domain, grid, cyl, s);
    let n = t.n;
    let levels = t.levels;
    let k_lo = match base {
        BaseCondition::Dirichlet => 1usize,
        BaseCondition::NeumannZero => 0usize,
    };
    let k_hi = levels - 1; // top level is Dirichlet zero
    let n_levels_unknown = k_hi - k_lo + 1;
    let n_unknown = n_levels_unknown * n;
    let idx = |k: usize, i: usize| (k - k_lo) * n + i;

    // Diagonal and right-hand side.
    let mut diag = alloc::vec![0.0; n_unknown];
    let mut rhs = alloc::vec![0.0; n_unknown];
    for k in k_lo..=k_hi {
        for i in 0..n {
            let mut d = 0.0;
            for dir in 0..t.dirs {
                let arm = &t.arms[i][dir];
                let c = t.mu[k] * t.trans[dir] / arm.len;
                d += c;
            }
            let c_up = t.nu_over_dy[k] * t.area[i];
            d += c_up;
            if k > 0 {
                d += t.nu_over_dy[k - 1] * t.area[i];
            }
            diag[idx(k, i)] = d;
        }
    }
    // Base datum feeds level k = 1 in the Dirichlet case.
    if base == BaseCondition::Dirichlet {
        debug_assert_eq!(base_values.len(), n);
        for i in 0..n {
            rhs[idx(1, i)] += t.nu_over_dy[0] * t.area[i] * base_values[i];
        }
    }
    // Lateral datum feeds through the cut arms.
    if let Some(g) = lateral {
        debug_assert_eq!(g.len(), (levels + 1) * cuts.len());
        for (e, cut) in cuts.iter().enumerate() {
            for k in k_lo..=k_hi {
                let c = t.mu[k] * t.trans[cut.dir] / cut.arm_len;
                rhs[idx(k, cut.node)] += c * g[k * cuts.len() + e];
            }
        }
    }

    let apply = |x: &[f64], out: &mut [f64]| {
        for k in k_lo..=k_hi {
            let base_off = (k - k_lo) * n;
            for i in 0..n {
                let xi = x[base_off + i];
                let mut acc = diag[base_off + i] * xi;
                for dir in 0..t.dirs {
                    let arm = &t.arms[i][dir];
                    if arm.neighbor != usize::MAX {
                        let c = t.mu[k] * t.trans[dir] / arm.len;
                        acc -= c * x[base_off + arm.neighbor];
                    }
                }
                if k < k_hi {
                    acc -= t.nu_over_dy[k] * t.area[i] * x[base_off + n + i];
                }
                if k > k_lo {
                    acc -= t.nu_over_dy[k - 1] * t.area[i] * x[base_off - n + i];
                }
                out[base_off + i] = acc;
            }
        }
    };

    let mut x = alloc::vec![0.0; n_unknown];
    let iterations = pcg_op(apply, &diag, &rhs, &mut x, CG_TOL, max_iter)?;

    // Expand to the full field including base and top levels.
    let mut values = alloc::vec![0.0; (levels + 1) * n];
    match base {
        BaseCondition::Dirichlet => values[..n].copy_from_slice(base_values),
        BaseCondition::NeumannZero => {
            values[..n].copy_from_slice(&x[..n]);
        }
    }
    for k in 1..=k_hi {
        let src = &x[idx(k, 0)..idx(k, 0) + n];
        values[k * n..(k + 1) * n].copy_from_slice(src);
    }
    // Top level stays zero.
    Ok(CylinderSolve { values, iterations })
}
