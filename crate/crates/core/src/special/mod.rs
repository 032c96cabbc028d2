//! Special functions used by the fractional calculus: the gamma function,
//! modified Bessel functions of the second kind with real order in `(0, 1)`,
//! Bessel functions `J_0`, `J_1`, and the harmonic-extension profile
//! `h_s(z) = 2^{1-s}/Γ(s) · z^s K_s(z)`.

mod bessel;
mod gamma;

pub use bessel::{bessel_j0, bessel_j1, bessel_k, bessel_k_scaled};
pub use gamma::{gamma, gamma_reg_lower, gamma_reg_upper};

use crate::math;

/// Radial profile of the harmonic extension of a single eigenmode.
///
/// `E[φ_λ](x, y) = φ_λ(x) · h_s(√λ y)` solves the weighted cylinder equation
/// `div(y^{1-2s} ∇w) = 0` with `h_s(0) = 1` and exponential decay at
/// infinity. At `s = 1/2` the profile is exactly `e^{-z}`.
pub fn extension_profile(s: f64, z: f64) -> f64 {
    debug_assert!(s > 0.0 && s < 1.0);
    if z == 0.0 {
        return 1.0;
    }
    if z > 740.0 {
        // e^{-z} underflows; the profile is zero to machine precision.
        return 0.0;
    }
    let front = math::powf(2.0, 1.0 - s) / gamma(s);
    // Work with the scaled K to postpone underflow: K_s(z) = e^{-z} K̂_s(z).
    let k_scaled = bessel_k_scaled(s, z);
    front * math::exp(s * math::ln(z) - z) * k_scaled
}

/// Derivative `d/dz h_s(z)`, from `(z^s K_s(z))' = -z^s K_{s-1}(z)` and the
/// even symmetry `K_{s-1} = K_{1-s}`.
pub fn extension_profile_deriv(s: f64, z: f64) -> f64 {
    debug_assert!(s > 0.0 && s < 1.0);
    debug_assert!(z > 0.0);
    if z > 740.0 {
        return 0.0;
    }
    let front = math::powf(2.0, 1.0 - s) / gamma(s);
    let k_scaled = bessel_k_scaled(1.0 - s, z);
    -front * math::exp(s * math::ln(z) - z) * k_scaled
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn profile_half_is_exponential() {
        for &z in &[1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0] {
            let exact = math::exp(-z);
            let got = extension_profile(0.5, z);
            assert!(
                math::abs(got - exact) <= 1e-12 * exact,
                "z={z}: got {got}, want {exact}"
            );
        }
    }

    #[test]
    fn profile_deriv_half() {
        for &z in &[0.2, 1.0, 3.0] {
            let got = extension_profile_deriv(0.5, z);
            let exact = -math::exp(-z);
            assert!(math::abs(got - exact) <= 1e-12 * math::abs(exact));
        }
    }

    #[test]
    fn profile_tends_to_one_at_origin() {
        for &s in &[0.25, 0.3, 0.5, 0.7, 0.9] {
            let v = extension_profile(s, 1e-9);
            // h_s(z) = 1 + O(z^{2s}); at z = 1e-9 the correction is tiny for
            // every s bounded away from 0.
            assert!(math::abs(v - 1.0) < 1e-4, "s={s}: {v}");
        }
    }

    #[test]
    fn profile_small_z_expansion() {
        // h_s(z) = 1 + Γ(-s)/(2^{2s} Γ(s)) z^{2s} + O(z²) for small z.
        for &s in &[0.3, 0.7] {
            let gamma_minus_s = -gamma(1.0 - s) / s;
            let c = gamma_minus_s / (math::powf(2.0, 2.0 * s) * gamma(s));
            let z = 1e-4;
            let approx = 1.0 + c * math::powf(z, 2.0 * s);
            let got = extension_profile(s, z);
            // Residual budget: the next expansion term is O(z²) = 1e-8.
            assert!(
                math::abs(got - approx) < 3e-8,
                "s={s}: got {got}, expansion {approx}"
            );
        }
    }

    #[test]
    fn profile_matches_quadrature_identity() {
        // h_s(√λ y)/λ^s = 1/Γ(s) ∫_0^∞ τ^{s-1} e^{-λτ - y²/(4τ)} dτ.
        // Crude midpoint check in log τ, enough to pin conventions.
        let s = 0.7;
        let lambda = 2.0;
        let y = 0.8;
        let mut sum = 0.0;
        let n = 40_000;
        let (u0, u1) = (-30.0, 10.0);
        let du = (u1 - u0) / n as f64;
        for i in 0..n {
            let u = u0 + (i as f64 + 0.5) * du;
            let tau = math::exp(u);
            sum += math::powf(tau, s) * math::exp(-lambda * tau - y * y / (4.0 * tau)) * du;
        }
        let lhs = extension_profile(s, math::sqrt(lambda) * y) / math::powf(lambda, s);
        let rhs = sum / gamma(s);
        assert!(
            math::abs(lhs - rhs) < 1e-8 * lhs,
            "lhs {lhs} vs rhs {rhs}"
        );
        let _ = PI;
    }
}
