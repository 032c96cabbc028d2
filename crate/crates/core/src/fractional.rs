//! Fractional order bookkeeping: the constants attached to a pair `(N, s)`.

use core::fmt;

use crate::math;
use crate::special::gamma;
use core::f64::consts::PI;

/// Errors raised when constructing [`FractionalParams`].
#[derive(Debug, Clone, PartialEq)]
pub enum FractionalError {
    /// `s` outside the open interval `(0, 1)`.
    OrderOutOfRange(f64),
    /// Unsupported dimension (only 1 and 2 are implemented).
    UnsupportedDimension(usize),
    /// The standing constraint `N > 2s` is violated.
    DimensionConstraint { dim: usize, s: f64 },
}

impl fmt::Display for FractionalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OrderOutOfRange(s) => {
                write!(f, "fractional order s = {s} must lie strictly in (0, 1)")
            }
            Self::UnsupportedDimension(n) => write!(f, "dimension {n} not supported (use 1 or 2)"),
            Self::DimensionConstraint { dim, s } => write!(
                f,
                "constraint N > 2s violated: N = {dim}, s = {s} (for N = 1 this requires s < 1/2)"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FractionalError {}

/// Order, dimension and the derived constants of `(-Δ)^s`.
///
/// `c_fund` is the coefficient of the free-space kernel
/// `c_{N,s} |x - t|^{2s-N}`; `kappa` is the normalization that makes the
/// harmonic extension an energy isometry and turns its weighted conormal
/// trace into `(-Δ)^s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalParams {
    pub s: f64,
    pub dim: usize,
    pub c_fund: f64,
    pub kappa: f64,
}

impl FractionalParams {
    /// Build the constants for dimension `dim ∈ {1, 2}` and order
    /// `s ∈ (0, 1)` with `dim > 2s`.
    pub fn new(dim: usize, s: f64) -> Result<Self, FractionalError> {
        if !(s > 0.0 && s < 1.0) {
            return Err(FractionalError::OrderOutOfRange(s));
        }
        if dim != 1 && dim != 2 {
            return Err(FractionalError::UnsupportedDimension(dim));
        }
        if dim as f64 <= 2.0 * s {
            return Err(FractionalError::DimensionConstraint { dim, s });
        }
        let n = dim as f64;
        let c_fund =
            gamma((n - 2.0 * s) / 2.0) / (math::powf(2.0, 2.0 * s) * math::powf(PI, n / 2.0) * gamma(s));
        // Pinned by requiring -κ_s lim_{y→0} y^{1-2s} ∂_y h_s(√λ y) = λ^s for
        // the single-mode extension profile; the same value makes the
        // extension an exact energy isometry. Equals 1 at s = 1/2.
        let kappa = math::powf(2.0, 2.0 * s - 1.0) * gamma(s) / gamma(1.0 - s);
        Ok(Self {
            s,
            dim,
            c_fund,
            kappa,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_constant_known_cases() {
        // N = 2, s = 1/2: c = Γ(1/2) / (2 π Γ(1/2)) = 1/(2π).
        let p = FractionalParams::new(2, 0.5).unwrap();
        assert!(math::abs(p.c_fund - 1.0 / (2.0 * PI)) < 1e-14);
        // N = 1, s = 1/4: the Γ(1/4) factors cancel, leaving 1/√(2π).
        let p = FractionalParams::new(1, 0.25).unwrap();
        assert!(math::abs(p.c_fund - 1.0 / math::sqrt(2.0 * PI)) < 1e-14);
    }

    #[test]
    fn kappa_is_one_at_half() {
        let p = FractionalParams::new(2, 0.5).unwrap();
        assert!(math::abs(p.kappa - 1.0) < 1e-14);
    }

    #[test]
    fn kappa_matches_profile_energy() {
        // κ_s must be the reciprocal of I_s = ∫_0^∞ r^{1-2s}(h_s² + h_s'²) dr,
        // the single-mode extension energy at λ = 1. Checked by quadrature.
        use crate::quadrature::LogQuadrature;
        use crate::special::{extension_profile, extension_profile_deriv};
        for &s in &[0.3, 0.5, 0.75] {
            let p = FractionalParams::new(2, s).unwrap();
            // Left-tail mass scales like r^{2s} (gradient part) and
            // r^{2-2s} (weight part); cover both exponents.
            let u_lo = -40.0 / f64::min(2.0 * s, 2.0 - 2.0 * s);
            let rule = LogQuadrature::new(u_lo, math::ln(60.0), 32);
            let energy = rule.integrate(|r| {
                let h = extension_profile(s, r);
                let dh = extension_profile_deriv(s, r);
                math::powf(r, 1.0 - 2.0 * s) * (h * h + dh * dh)
            });
            assert!(
                math::abs(p.kappa * energy - 1.0) < 1e-8,
                "s={s}: κ·I = {}",
                p.kappa * energy
            );
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            FractionalParams::new(1, 0.8),
            Err(FractionalError::DimensionConstraint { .. })
        ));
        assert!(matches!(
            FractionalParams::new(1, 0.5),
            Err(FractionalError::DimensionConstraint { .. })
        ));
        assert!(matches!(
            FractionalParams::new(2, 1.0),
            Err(FractionalError::OrderOutOfRange(_))
        ));
        assert!(matches!(
            FractionalParams::new(2, 0.0),
            Err(FractionalError::OrderOutOfRange(_))
        ));
        assert!(matches!(
            FractionalParams::new(3, 0.5),
            Err(FractionalError::UnsupportedDimension(3))
        ));
    }
}
