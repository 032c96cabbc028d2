//! Sparse symmetric linear algebra: CSR matrices, Jacobi-preconditioned
//! conjugate gradients, banded Cholesky factorization, a symmetric
//! tridiagonal QL eigensolver, and shift-invert Lanczos for the low end of
//! an SPD spectrum.
//!
//! Everything here runs in a fixed sequential order, so solves are
//! bit-reproducible across runs.

use alloc::vec::Vec;
use core::fmt;

use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Iterative solve did not reach the requested residual.
    NoConvergence {
        what: &'static str,
        achieved: f64,
        target: f64,
    },
    /// Cholesky hit a non-positive pivot.
    NotPositiveDefinite { row: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoConvergence {
                what,
                achieved,
                target,
            } => write!(
                f,
                "{what} did not converge: residual {achieved:.3e} (target {target:.3e})"
            ),
            Self::NotPositiveDefinite { row } => {
                write!(f, "matrix not positive definite at row {row}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LinalgError {}

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<f64>,
}

impl Csr {
    /// Assemble from (row, col, value) triplets; duplicate entries are
    /// summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = alloc::vec![0usize; n + 1];
        let mut indices: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut data: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut cur_row = 0usize;
        for &(r, c, v) in &triplets {
            debug_assert!(r < n && c < n);
            while cur_row < r {
                cur_row += 1;
                indptr[cur_row] = indices.len();
            }
            if indices.len() > indptr[cur_row] && *indices.last().unwrap() == c {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
            }
        }
        while cur_row < n {
            cur_row += 1;
            indptr[cur_row] = indices.len();
        }
        Self {
            n,
            indptr,
            indices,
            data,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for row in 0..self.n {
            let mut acc = 0.0;
            for k in self.indptr[row]..self.indptr[row + 1] {
                acc += self.data[k] * x[self.indices[k]];
            }
            y[row] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = alloc::vec![0.0; self.n];
        for row in 0..self.n {
            for k in self.indptr[row]..self.indptr[row + 1] {
                if self.indices[k] == row {
                    d[row] += self.data[k];
                }
            }
        }
        d
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four partial accumulators let the loop vectorize without changing
    // the (fixed) summation order across runs.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Jacobi-preconditioned conjugate gradients for SPD systems. Returns the
/// iteration count; `x` holds the solution on success.
pub fn pcg(
    a: &Csr,
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<usize, LinalgError> {
    let diag = a.diagonal();
    pcg_op(|v, out| a.matvec(v, out), &diag, b, x, rel_tol, max_iter)
}

/// Matrix-free variant of [`pcg`]: `apply` computes `y = A x`, `diag` is
/// the matrix diagonal (Jacobi preconditioner).
pub fn pcg_op(
    mut apply: impl FnMut(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<usize, LinalgError> {
    let n = b.len();
    let inv_diag: Vec<f64> = diag
        .iter()
        .map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let norm_b = math::sqrt(dot(b, b));
    if norm_b == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let target = rel_tol * norm_b;

    let mut r = alloc::vec![0.0; n];
    apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(&ri, &di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = alloc::vec![0.0; n];

    for it in 0..max_iter {
        let res = math::sqrt(dot(&r, &r));
        if res <= target {
            return Ok(it);
        }
        apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = math::sqrt(dot(&r, &r));
    if res <= target {
        Ok(max_iter)
    } else {
        Err(LinalgError::NoConvergence {
            what: "conjugate gradients",
            achieved: res / norm_b,
            target: rel_tol,
        })
    }
}

/// Banded Cholesky factorization `A = L Lᵀ` of an SPD matrix with (lower)
/// bandwidth `bw`. Storage is row-major: `l[i*(bw+1) + k] = L[i, i-k]`.
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    /// Factor from a band accessor: `band(i, j)` returns `A[i, j]` for
    /// `i - bw ≤ j ≤ i`.
    pub fn factor(
        n: usize,
        bw: usize,
        band: impl Fn(usize, usize) -> f64,
    ) -> Result<Self, LinalgError> {
        let w = bw + 1;
        let mut l = alloc::vec![0.0; n * w];
        for i in 0..n {
            let j_lo = i.saturating_sub(bw);
            for j in j_lo..=i {
                let mut sum = band(i, j);
                let m_lo = if j >= bw { j - bw } else { 0 }.max(j_lo);
                for m in m_lo..j {
                    sum -= l[i * w + (i - m)] * l[j * w + (j - m)];
                }
                if j == i {
                    if sum <= 0.0 {
                        return Err(LinalgError::NotPositiveDefinite { row: i });
                    }
                    l[i * w] = math::sqrt(sum);
                } else {
                    l[i * w + (i - j)] = sum / l[j * w];
                }
            }
        }
        Ok(Self { n, bw, l })
    }

    /// Solve `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        // Forward: L y = b.
        for i in 0..n {
            let mut sum = b[i];
            let m_lo = i.saturating_sub(bw);
            for m in m_lo..i {
                sum -= self.l[i * w + (i - m)] * b[m];
            }
            b[i] = sum / self.l[i * w];
        }
        // Backward: Lᵀ x = y.
        for i in (0..n).rev() {
            let mut sum = b[i];
            let m_hi = (i + bw).min(n - 1);
            for m in (i + 1)..=m_hi {
                sum -= self.l[m * w + (m - i)] * b[m];
            }
            b[i] = sum / self.l[i * w];
        }
    }
}

/// Eigen-decomposition of a symmetric tridiagonal matrix by the implicit QL
/// algorithm with Wilkinson shifts. `diag` and `off` are consumed; returns
/// ascending eigenvalues with eigenvectors as columns (`z[i*n + j]` is
/// component `i` of eigenvector `j`).
pub fn sym_tridiag_eig(
    mut diag: Vec<f64>,
    mut off: Vec<f64>,
) -> Result<(Vec<f64>, Vec<f64>), LinalgError> {
    let n = diag.len();
    debug_assert!(off.len() >= n.saturating_sub(1));
    off.resize(n, 0.0);
    let mut z = alloc::vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = math::abs(diag[m]) + math::abs(diag[m + 1]);
                if math::abs(off[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(LinalgError::NoConvergence {
                    what: "tridiagonal QL",
                    achieved: math::abs(off[l]),
                    target: 0.0,
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = math::hypot(g, 1.0);
            let sign_r = if g >= 0.0 { math::abs(r) } else { -math::abs(r) };
            g = diag[m] - diag[l] + off[l] / (g + sign_r);
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut i = m;
            while i > l {
                i -= 1;
                let mut f = s * off[i];
                let b = c * off[i];
                r = math::hypot(f, g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if r == 0.0 && i > l {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    // Sort ascending, permuting eigenvector columns.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].partial_cmp(&diag[b]).unwrap());
    let evals: Vec<f64> = order.iter().map(|&j| diag[j]).collect();
    let mut vecs = alloc::vec![0.0; n * n];
    for (newj, &oldj) in order.iter().enumerate() {
        for i in 0..n {
            vecs[i * n + newj] = z[i * n + oldj];
        }
    }
    Ok((evals, vecs))
}

/// Result of a Lanczos run: ascending eigenvalues of the original SPD
/// operator and the corresponding orthonormal eigenvectors.
pub struct LanczosResult {
    pub eigenvalues: Vec<f64>,
    /// Row-major: `vectors[j]` is the j-th eigenvector.
    pub vectors: Vec<Vec<f64>>,
    /// Relative residual estimates per pair.
    pub residuals: Vec<f64>,
}

/// Shift-invert Lanczos for the `want` smallest eigenpairs of an SPD
/// operator `A`, given a solver for `A x = b`. Uses full
/// reorthogonalization; `krylov` is the subspace dimension.
pub fn lanczos_smallest(
    n: usize,
    mut solve: impl FnMut(&[f64], &mut [f64]),
    want: usize,
    krylov: usize,
    tol: f64,
) -> Result<LanczosResult, LinalgError> {
    assert!(want >= 1 && krylov >= want && krylov <= n);
    let m = krylov;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    // Deterministic start vector with no special symmetry.
    let mut v0 = alloc::vec![0.0; n];
    for (i, v) in v0.iter_mut().enumerate() {
        *v = math::sin(0.7548776662466927 * (i as f64 + 1.0) + 0.1);
    }
    let nrm = math::sqrt(dot(&v0, &v0));
    v0.iter_mut().for_each(|v| *v /= nrm);
    basis.push(v0);

    let mut alphas = Vec::with_capacity(m);
    let mut betas = Vec::with_capacity(m);
    let mut w = alloc::vec![0.0; n];
    for k in 0..m {
        solve(&basis[k], &mut w);
        let alpha = dot(&basis[k], &w);
        alphas.push(alpha);
        for (wi, qi) in w.iter_mut().zip(&basis[k]) {
            *wi -= alpha * qi;
        }
        if k > 0 {
            let beta_prev = betas[k - 1];
            for (wi, qi) in w.iter_mut().zip(&basis[k - 1]) {
                *wi -= beta_prev * qi;
            }
        }
        // Full reorthogonalization; repeat once more only if the first
        // pass removed a substantial component.
        let before = math::sqrt(dot(&w, &w));
        for pass in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
            if pass == 0 && math::sqrt(dot(&w, &w)) > 0.5 * before {
                break;
            }
        }
        let beta = math::sqrt(dot(&w, &w));
        if k + 1 == m {
            betas.push(beta);
            break;
        }
        if beta < 1e-300 {
            // Invariant subspace found early; pad with a fresh direction.
            return Err(LinalgError::NoConvergence {
                what: "Lanczos (breakdown)",
                achieved: beta,
                target: tol,
            });
        }
        betas.push(beta);
        let next: Vec<f64> = w.iter().map(|&x| x / beta).collect();
        basis.push(next);
    }

    let (thetas, y) = sym_tridiag_eig(alphas.clone(), betas[..m - 1].to_vec())?;
    // θ are eigenvalues of A⁻¹, ascending; the largest θ give the smallest
    // eigenvalues of A.
    let beta_last = betas[m - 1];
    let mut eigenvalues = Vec::with_capacity(want);
    let mut vectors = Vec::with_capacity(want);
    let mut residuals = Vec::with_capacity(want);
    for idx in 0..want {
        let col = m - 1 - idx; // descending θ
        let theta = thetas[col];
        if theta <= 0.0 {
            return Err(LinalgError::NoConvergence {
                what: "Lanczos (nonpositive Ritz value)",
                achieved: theta,
                target: tol,
            });
        }
        let resid = math::abs(beta_last * y[(m - 1) * m + col]) / theta;
        residuals.push(resid);
        eigenvalues.push(1.0 / theta);
        let mut vec = alloc::vec![0.0; n];
        for (k, q) in basis.iter().enumerate() {
            let c = y[k * m + col];
            for (vi, qi) in vec.iter_mut().zip(q) {
                *vi += c * qi;
            }
        }
        let nrm = math::sqrt(dot(&vec, &vec));
        vec.iter_mut().for_each(|v| *v /= nrm);
        vectors.push(vec);
    }
    // Sort ascending by eigenvalue (descending θ already gives this, but a
    // defensive sort keeps the contract explicit).
    let mut order: Vec<usize> = (0..want).collect();
    order.sort_by(|&a, &b| eigenvalues[a].partial_cmp(&eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
    let vectors: Vec<Vec<f64>> = order.iter().map(|&i| vectors[i].clone()).collect();
    let residuals: Vec<f64> = order.iter().map(|&i| residuals[i]).collect();

    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if worst > tol {
        return Err(LinalgError::NoConvergence {
            what: "Lanczos",
            achieved: worst,
            target: tol,
        });
    }
    Ok(LanczosResult {
        eigenvalues,
        vectors,
        residuals,
    })
}
