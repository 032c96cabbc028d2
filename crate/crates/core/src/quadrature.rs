//! Gauss–Legendre quadrature, composite rules on logarithmic windows, and
//! fixed-order pairwise summation.
//!
//! Every spectral reduction in the crate funnels through [`pairwise_sum`],
//! which evaluates in a fixed tree order so repeated (and parallel) runs
//! produce bit-identical results.

use alloc::vec::Vec;

use crate::math;
use core::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence. Accurate to machine precision for `n ≤ 128`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th positive root.
        let mut x = math::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n and its derivative by recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if math::abs(dx) < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// A fixed set of abscissae/weights for integrals `∫ f(τ) dτ` over
/// `[exp(u_lo), exp(u_hi)]`, assembled as composite Gauss–Legendre panels in
/// `u = ln τ` with `points_per_unit` nodes per unit log-interval.
#[derive(Debug, Clone)]
pub struct LogQuadrature {
    /// τ abscissae, ascending.
    pub tau: Vec<f64>,
    /// Weights including the Jacobian `dτ = τ du`.
    pub weight: Vec<f64>,
}

impl LogQuadrature {
    pub fn new(u_lo: f64, u_hi: f64, points_per_unit: usize) -> Self {
        assert!(u_hi > u_lo);
        assert!(points_per_unit >= 2);
        let panels = math::ceil(u_hi - u_lo) as usize;
        let panels = panels.max(1);
        let width = (u_hi - u_lo) / panels as f64;
        let (xs, ws) = gauss_legendre(points_per_unit);
        let mut tau = Vec::with_capacity(panels * points_per_unit);
        let mut weight = Vec::with_capacity(panels * points_per_unit);
        for p in 0..panels {
            let a = u_lo + p as f64 * width;
            let half = 0.5 * width;
            let mid = a + half;
            for (&x, &w) in xs.iter().zip(&ws) {
                let u = mid + half * x;
                let t = math::exp(u);
                tau.push(t);
                weight.push(w * half * t);
            }
        }
        Self { tau, weight }
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// Integrate a function given its values at the abscissae.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.tau.len());
        let mut products: Vec<f64> = values
            .iter()
            .zip(&self.weight)
            .map(|(&v, &w)| v * w)
            .collect();
        pairwise_sum_in_place(&mut products)
    }

    /// Integrate a closure over the abscissae.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut products: Vec<f64> = self
            .tau
            .iter()
            .zip(&self.weight)
            .map(|(&t, &w)| f(t) * w)
            .collect();
        pairwise_sum_in_place(&mut products)
    }
}

/// Fixed-order pairwise sum. The reduction tree depends only on the slice
/// length, never on threading or chunk boundaries.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    let mut buf: Vec<f64> = values.to_vec();
    pairwise_sum_in_place(&mut buf)
}

fn pairwise_sum_in_place(buf: &mut [f64]) -> f64 {
    let mut n = buf.len();
    if n == 0 {
        return 0.0;
    }
    while n > 1 {
        let half = n / 2;
        for i in 0..half {
            buf[i] = buf[2 * i] + buf[2 * i + 1];
        }
        if n % 2 == 1 {
            buf[half] = buf[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    buf[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    #[test]
    fn legendre_exactness() {
        // n-point rule integrates polynomials of degree 2n-1 exactly.
        let (xs, ws) = gauss_legendre(8);
        for degree in 0..16usize {
            let exact = if degree % 2 == 0 {
                2.0 / (degree as f64 + 1.0)
            } else {
                0.0
            };
            let mut acc = 0.0;
            for (&x, &w) in xs.iter().zip(&ws) {
                acc += w * math::powf(x, degree as f64);
            }
            assert!(math::abs(acc - exact) < 1e-14, "degree {degree}: {acc}");
        }
    }

    #[test]
    fn legendre_weights_sum_to_two() {
        for &n in &[1usize, 2, 5, 16, 32, 64] {
            let (_, ws) = gauss_legendre(n);
            let total: f64 = ws.iter().sum();
            assert!(math::abs(total - 2.0) < 1e-13, "n={n}");
        }
    }

    #[test]
    fn log_rule_gamma_integral() {
        // ∫_0^∞ τ^{s-1} e^{-λτ} dτ = Γ(s)/λ^s. The left tail carries mass
        // τ^s/s, so the log window must reach down to e^{-36/s}.
        for &(s, lambda) in &[(0.3, 1.0), (0.5, 2.0), (0.7, 13.0)] {
            let rule = LogQuadrature::new(-36.0 / s, math::ln(50.0 / lambda), 32);
            let got = rule.integrate(|t| math::powf(t, s - 1.0) * math::exp(-lambda * t));
            let exact = gamma(s) / math::powf(lambda, s);
            assert!(
                math::abs(got - exact) < 1e-12 * exact,
                "s={s}, λ={lambda}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn pairwise_matches_naive() {
        let values: Vec<f64> = (0..1001)
            .map(|i| {
                let x = i as f64 * 0.37;
                math::sin(x) / (1.0 + x)
            })
            .collect();
        let naive: f64 = values.iter().sum();
        let pair = pairwise_sum(&values);
        assert!(math::abs(naive - pair) < 1e-12 * (1.0 + math::abs(naive)));
    }

    #[test]
    fn pairwise_edge_cases() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[4.25]), 4.25);
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0]), 6.0);
    }
}
