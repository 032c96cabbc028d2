//! Numeric eigenbasis for curved (ellipse) domains.
//!
//! The Dirichlet Laplacian is discretized by a symmetric cut-cell finite
//! volume scheme with shortened boundary arms (Shortley–Weller arm lengths),
//! yielding a generalized pencil `S u = λ M u` with `S` symmetric and `M`
//! the diagonal of cell areas. The pencil is symmetrized by `M^{-1/2}` and
//! solved by shift-invert Lanczos on a banded Cholesky factorization.
//! Eigenvalues are Richardson-extrapolated across the grid and its 2×
//! refinement (second order); eigenvectors live on the fine grid and are
//! evaluated off-node through local least-squares quartic fits.

use alloc::vec::Vec;

use crate::domain::{cut_arms, BoundarySample, Domain, Grid};
use crate::linalg::{lanczos_smallest, BandedCholesky, LinalgError};
use crate::math;
use crate::quadrature::pairwise_sum;

use super::PointEval;

pub(crate) struct NumericBasis {
    pub lambdas: Vec<f64>,
    fine: Grid,
    /// Cell measures on the fine interior (diagonal of M).
    fine_m: Vec<f64>,
    /// Per-mode values on the fine interior, `‖v‖_M = 1`.
    vectors: Vec<Vec<f64>>,
    /// Coarse interior index → fine interior index.
    inject: Vec<usize>,
}

struct Assembled {
    n: usize,
    m_diag: Vec<f64>,
    /// Banded storage of `M^{-1/2} S M^{-1/2}`: `band[i*(bw+1)+k] = Â[i, i-k]`.
    band: Vec<f64>,
    bw: usize,
}

fn assemble(domain: &Domain, grid: &Grid) -> Assembled {
    let [hx, hy] = grid.spacing;
    let n = grid.interior.len();

    let mut m_diag = alloc::vec![0.0; n];
    // (row, col, value) with col ≤ row for band storage.
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut diag = alloc::vec![0.0; n];
    let mut bw = 0usize;

    for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
        let arms = cut_arms(domain, grid, ix, iy);
        m_diag[i] = 0.25 * (arms[0].len + arms[1].len) * (arms[2].len + arms[3].len);
        for (d, arm) in arms.iter().enumerate() {
            // Transverse face length: hy across x-arms, hx across y-arms.
            let trans = if d < 2 { hy } else { hx };
            let coeff = trans / arm.len;
            diag[i] += coeff;
            if arm.neighbor != usize::MAX && arm.neighbor < i {
                entries.push((i, arm.neighbor, -coeff));
                bw = bw.max(i - arm.neighbor);
            }
        }
    }

    let w = bw + 1;
    let mut band = alloc::vec![0.0; n * w];
    for i in 0..n {
        band[i * w] = diag[i] / m_diag[i];
    }
    for &(r, c, v) in &entries {
        band[r * w + (r - c)] = v / math::sqrt(m_diag[r] * m_diag[c]);
    }
    Assembled {
        n,
        m_diag,
        band,
        bw,
    }
}

struct GridModes {
    lambdas: Vec<f64>,
    /// M-normalized nodal values per mode.
    vectors: Vec<Vec<f64>>,
    /// Reflection parity per mode: (even_x, even_y).
    parity: Vec<(bool, bool)>,
}

fn solve_modes(domain: &Domain, grid: &Grid, want: usize) -> Result<GridModes, LinalgError> {
    let asm = assemble(domain, grid);
    let w = asm.bw + 1;
    let chol = BandedCholesky::factor(asm.n, asm.bw, |i, j| asm.band[i * w + (i - j)])?;

    let mut krylov = (3 * want + 40).min(asm.n - 1);
    let result = loop {
        let attempt = lanczos_smallest(
            asm.n,
            |bvec, x| {
                x.copy_from_slice(bvec);
                chol.solve(x);
            },
            want,
            krylov,
            1e-7,
        );
        match attempt {
            Ok(r) => break r,
            Err(e) => {
                let bigger = (4 * want + 120).min(asm.n - 1);
                if bigger > krylov {
                    krylov = bigger;
                } else {
                    return Err(e);
                }
            }
        }
    };

    // Undo the M^{1/2} similarity: u = M^{-1/2} v is then M-orthonormal,
    // i.e. orthonormal in the discrete L².
    let mirror = mirror_maps(grid);
    let mut vectors = Vec::with_capacity(want);
    let mut parity = Vec::with_capacity(want);
    for v in &result.vectors {
        let mut u: Vec<f64> = v
            .iter()
            .zip(&asm.m_diag)
            .map(|(&vi, &mi)| vi / math::sqrt(mi))
            .collect();
        canonical_sign(&mut u);
        let px = parity_sign(&u, &mirror.0, &asm.m_diag);
        let py = parity_sign(&u, &mirror.1, &asm.m_diag);
        parity.push((px, py));
        vectors.push(u);
    }
    Ok(GridModes {
        lambdas: result.eigenvalues,
        vectors,
        parity,
    })
}

/// Interior-index maps of the two axis reflections.
fn mirror_maps(grid: &Grid) -> (Vec<usize>, Vec<usize>) {
    let nx = grid.xs.len();
    let ny = grid.ys.len();
    let n = grid.interior.len();
    let mut mx = alloc::vec![0usize; n];
    let mut my = alloc::vec![0usize; n];
    for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
        mx[i] = grid.index[iy * nx + (nx - 1 - ix)];
        my[i] = grid.index[(ny - 1 - iy) * nx + ix];
    }
    (mx, my)
}

fn parity_sign(v: &[f64], mirror: &[usize], m: &[f64]) -> bool {
    let mut acc = 0.0;
    for (i, &vi) in v.iter().enumerate() {
        acc += vi * v[mirror[i]] * m[i];
    }
    acc >= 0.0
}

fn canonical_sign(v: &mut [f64]) {
    let mut best = 0usize;
    let mut best_abs = 0.0;
    for (i, &x) in v.iter().enumerate() {
        if math::abs(x) > best_abs {
            best_abs = math::abs(x);
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

impl NumericBasis {
    pub(crate) fn build(
        domain: &Domain,
        coarse: Grid,
        fine: Grid,
        want: usize,
    ) -> Result<Self, LinalgError> {
        let coarse_modes = solve_modes(domain, &coarse, want)?;
        let fine_want = (want + 8).min(fine.interior.len() / 4);
        let fine_modes = solve_modes(domain, &fine, fine_want.max(want))?;

        // Pair modes by (parity class, rank within class); near-degenerate
        // eigenvalues can swap plain spectral order between grids, while the
        // reflection class is exact on mirrored grids.
        let pair = match_modes(&coarse_modes, &fine_modes, want);

        let mut lambdas = Vec::with_capacity(want);
        let mut vectors = Vec::with_capacity(want);
        for &(ci, fi) in &pair {
            // Second-order Richardson across h and h/2.
            lambdas.push((4.0 * fine_modes.lambdas[fi] - coarse_modes.lambdas[ci]) / 3.0);
            vectors.push(fine_modes.vectors[fi].clone());
        }
        // The pairing preserves ascending order per class but can interleave
        // classes slightly differently after extrapolation; re-sort.
        let mut order: Vec<usize> = (0..want).collect();
        order.sort_by(|&p, &q| lambdas[p].partial_cmp(&lambdas[q]).unwrap());
        let lambdas: Vec<f64> = order.iter().map(|&i| lambdas[i]).collect();
        let vectors: Vec<Vec<f64>> = order.iter().map(|&i| vectors[i].clone()).collect();

        let fine_m = assemble(domain, &fine).m_diag;
        let nxf = fine.xs.len();
        let inject: Vec<usize> = coarse
            .interior
            .iter()
            .map(|&(ix, iy)| {
                let idx = fine.index[(2 * iy) * nxf + 2 * ix];
                debug_assert_ne!(idx, usize::MAX);
                idx
            })
            .collect();

        Ok(Self {
            lambdas,
            fine,
            fine_m,
            vectors,
            inject,
        })
    }

    pub(crate) fn point_eval(&self, p: [f64; 2]) -> PointEval {
        let fit = self.stencil_fit(p);
        let nmodes = self.vectors.len();
        let mut phi = Vec::with_capacity(nmodes);
        let mut grad = Vec::with_capacity(nmodes);
        let mut hess = Vec::with_capacity(nmodes);
        for v in &self.vectors {
            let mut rhs = [0.0; N_MONO];
            for (r, &idx) in fit.nodes.iter().enumerate() {
                let val = v[idx];
                for c in 0..N_MONO {
                    rhs[c] += fit.design[r * N_MONO + c] * val;
                }
            }
            let mut coef = rhs;
            solve_with_factor(&fit.chol, &mut coef);
            let (f, gx, gy, fxx, fxy, fyy) = eval_poly(&coef, fit.local, fit.scale);
            phi.push(f);
            grad.push([gx, gy]);
            hess.push([fxx, fxy, fyy]);
        }
        PointEval { phi, grad, hess }
    }

    pub(crate) fn normal_derivs(&self, sample: &BoundarySample) -> Vec<f64> {
        let h = f64::min(self.fine.spacing[0], self.fine.spacing[1]);
        let delta = 1.5 * h;
        let q = |m: f64| {
            [
                sample.point[0] - m * delta * sample.normal[0],
                sample.point[1] - m * delta * sample.normal[1],
            ]
        };
        let e1 = self.point_eval(q(1.0));
        let e2 = self.point_eval(q(2.0));
        let e3 = self.point_eval(q(3.0));
        // Cubic through (0, f1, f2, f3) with f(0) = 0 on the boundary;
        // inward derivative g'(0), outward normal derivative is -g'(0).
        (0..self.vectors.len())
            .map(|m| {
                let g = (18.0 * e1.phi[m] - 9.0 * e2.phi[m] + 2.0 * e3.phi[m]) / (6.0 * delta);
                -g
            })
            .collect()
    }

    pub(crate) fn weighted_field(&self, coeffs: &[f64]) -> Vec<f64> {
        self.inject
            .iter()
            .map(|&fi| {
                let terms: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .map(|(m, &c)| c * self.vectors[m][fi])
                    .collect();
                pairwise_sum(&terms)
            })
            .collect()
    }

    pub(crate) fn l2_inner(&self, i: usize, j: usize) -> f64 {
        let terms: Vec<f64> = self.vectors[i]
            .iter()
            .zip(&self.vectors[j])
            .zip(&self.fine_m)
            .map(|((&a, &b), &m)| a * b * m)
            .collect();
        pairwise_sum(&terms)
    }

    /// Build the least-squares quartic fit around `p` on the fine grid.
    fn stencil_fit(&self, p: [f64; 2]) -> StencilFit {
        let g = &self.fine;
        let nx = g.xs.len();
        let ny = g.ys.len();
        let [hx, hy] = g.spacing;
        let mut cx = clamp_idx((p[0] - g.xs[0]) / hx, nx);
        let mut cy = clamp_idx((p[1] - g.ys[0]) / hy, ny);

        // Shift the 5×5 window toward the center of the domain until every
        // node is interior.
        let fits = |cx: usize, cy: usize| -> bool {
            if cx < 2 || cy < 2 || cx + 2 >= nx || cy + 2 >= ny {
                return false;
            }
            for dy in 0..5 {
                for dx in 0..5 {
                    if g.index[(cy + dy - 2) * nx + (cx + dx - 2)] == usize::MAX {
                        return false;
                    }
                }
            }
            true
        };
        let mut tries = 0;
        while !fits(cx, cy) && tries < 40 {
            if cx * 2 > nx {
                cx -= 1;
            } else if cx * 2 < nx {
                cx += 1;
            }
            if fits(cx, cy) {
                break;
            }
            if cy * 2 > ny {
                cy -= 1;
            } else if cy * 2 < ny {
                cy += 1;
            }
            tries += 1;
        }
        debug_assert!(fits(cx, cy), "no interior 5x5 stencil near {p:?}");

        let scale = f64::min(hx, hy);
        let center = [g.xs[cx], g.ys[cy]];
        let mut nodes = Vec::with_capacity(25);
        let mut design = alloc::vec![0.0; 25 * N_MONO];
        for dy in 0..5 {
            for dx in 0..5 {
                let (jx, jy) = (cx + dx - 2, cy + dy - 2);
                let idx = g.index[jy * nx + jx];
                let r = nodes.len();
                nodes.push(idx);
                let u = (g.xs[jx] - center[0]) / scale;
                let v = (g.ys[jy] - center[1]) / scale;
                fill_monomials(u, v, &mut design[r * N_MONO..(r + 1) * N_MONO]);
            }
        }
        // Normal equations with a tiny ridge; factored once per point.
        let mut normal = [0.0; N_MONO * N_MONO];
        for r in 0..25 {
            for a in 0..N_MONO {
                for b in a..N_MONO {
                    normal[a * N_MONO + b] += design[r * N_MONO + a] * design[r * N_MONO + b];
                }
            }
        }
        for a in 0..N_MONO {
            for b in 0..a {
                normal[a * N_MONO + b] = normal[b * N_MONO + a];
            }
            normal[a * N_MONO + a] += 1e-12;
        }
        let chol = factor_spd_small(&normal);
        let local = [(p[0] - center[0]) / scale, (p[1] - center[1]) / scale];
        StencilFit {
            nodes,
            design,
            chol,
            local,
            scale,
        }
    }
}

const N_MONO: usize = 15; // monomials up to total degree 4

struct StencilFit {
    nodes: Vec<usize>,
    /// 25 × N_MONO design matrix (rows = Aᵀ applied later).
    design: Vec<f64>,
    chol: [f64; N_MONO * N_MONO],
    local: [f64; 2],
    scale: f64,
}

fn clamp_idx(t: f64, n: usize) -> usize {
    let i = math::floor(t + 0.5);
    if i < 0.0 {
        0
    } else if i as usize >= n {
        n - 1
    } else {
        i as usize
    }
}

/// Monomial exponents in declaration order.
const MONO_POWERS: [(u32, u32); N_MONO] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
    (4, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 4),
];

fn fill_monomials(u: f64, v: f64, out: &mut [f64]) {
    for (i, &(p, q)) in MONO_POWERS.iter().enumerate() {
        out[i] = powu(u, p) * powu(v, q);
    }
}

fn powu(x: f64, p: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..p {
        acc *= x;
    }
    acc
}

/// Value/gradient/Hessian of the fitted polynomial at the (scaled) local
/// point, mapped back to physical units.
fn eval_poly(c: &[f64; N_MONO], local: [f64; 2], scale: f64) -> (f64, f64, f64, f64, f64, f64) {
    let (u, v) = (local[0], local[1]);
    let (mut f, mut fu, mut fv, mut fuu, mut fuv, mut fvv) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, &(p, q)) in MONO_POWERS.iter().enumerate() {
        let (pf, qf) = (p as f64, q as f64);
        let up = powu(u, p);
        let vq = powu(v, q);
        f += c[i] * up * vq;
        if p >= 1 {
            fu += c[i] * pf * powu(u, p - 1) * vq;
        }
        if q >= 1 {
            fv += c[i] * qf * up * powu(v, q - 1);
        }
        if p >= 2 {
            fuu += c[i] * pf * (pf - 1.0) * powu(u, p - 2) * vq;
        }
        if p >= 1 && q >= 1 {
            fuv += c[i] * pf * qf * powu(u, p - 1) * powu(v, q - 1);
        }
        if q >= 2 {
            fvv += c[i] * qf * (qf - 1.0) * up * powu(v, q - 2);
        }
    }
    let s = scale;
    (f, fu / s, fv / s, fuu / (s * s), fuv / (s * s), fvv / (s * s))
}

fn factor_spd_small(a: &[f64; N_MONO * N_MONO]) -> [f64; N_MONO * N_MONO] {
    let n = N_MONO;
    let mut l = [0.0; N_MONO * N_MONO];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                l[i * n + i] = math::sqrt(f64::max(sum, 1e-300));
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    l
}

fn solve_with_factor(l: &[f64; N_MONO * N_MONO], b: &mut [f64; N_MONO]) {
    let n = N_MONO;
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * b[k];
        }
        b[i] = sum / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut sum = b[i];
        for k in (i + 1)..n {
            sum -= l[k * n + i] * b[k];
        }
        b[i] = sum / l[i * n + i];
    }
}

/// Pair coarse and fine modes: ascending coarse order, each taking the
/// lowest unused fine mode of the same reflection class. Plain spectral
/// order can swap near-degenerate neighbors between grids; the parity class
/// cannot, because the discrete operators commute with the reflections
/// exactly on mirrored grids.
fn match_modes(coarse: &GridModes, fine: &GridModes, want: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(want);
    let mut fine_used = alloc::vec![false; fine.lambdas.len()];
    for ci in 0..want {
        let class = coarse.parity[ci];
        let chosen = fine
            .parity
            .iter()
            .enumerate()
            .find(|&(fi, &fp)| fp == class && !fine_used[fi])
            .map(|(fi, _)| fi);
        let fi = chosen
            .or_else(|| fine_used.iter().position(|&u| !u))
            .expect("fine mode buffer exhausted");
        fine_used[fi] = true;
        pairs.push((ci, fi));
    }
    pairs
}
