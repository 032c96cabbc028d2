//! Green and Robin functions of the spectral fractional Laplacian on
//! symmetric bounded domains.
//!
//! The operator `(-Δ)^s`, `0 < s < 1`, is defined through the Dirichlet
//! spectrum of the Laplacian: if `(φ_j, λ_j)` are the Dirichlet eigenpairs of
//! `-Δ` on `Ω`, then `(-Δ)^s` acts as `λ_j^s` on each mode. This crate builds
//! eigenbases for intervals, rectangles and ellipses, computes the Green
//! function `G`, the regular part `H = G_free - G`, and the Robin function
//! `R(t) = H(t, t)`, and evaluates the gradient and Hessian of `R` by three
//! mutually independent routes:
//!
//! * a heat-kernel (Mellin) route that renders `R` and its derivatives as
//!   smooth integrals over the diagonal heat kernel,
//! * plain finite differencing of Robin values,
//! * the boundary-flux representation on the harmonic-extension cylinder
//!   `Ω × (0, ∞)` with the degenerate weight `y^{1-2s}`.
//!
//! The `verify` module packages the route comparisons into named scenarios
//! with machine-readable reports; the companion CLI crate exposes them as
//! subcommands.
//!
//! The crate is `no_std`-compatible (requires `alloc`); enable the `libm`
//! feature instead of `std` for builds without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("robinfrac-core requires either the `std` or the `libm` feature");

pub(crate) mod math;

pub mod basis;
pub mod domain;
pub mod extension;
pub mod fractional;
pub mod green;
pub mod linalg;
pub mod quadrature;
pub mod robin;
pub mod special;
pub mod verify;

pub use basis::{apply_fractional, eigenbasis, hs_norm_sq, EigenBasis, PointEval};
pub use domain::{build_domain, verify_normal_condition, Domain, DomainKind, DomainSpec, Grid};
pub use extension::{
    extend, extension_energy, green_extension_value, green_lateral_flux, lateral_flux,
    neumann_trace, robin_gradient_boundary,
    robin_hessian_boundary, solve_ui, u1_representation, Cylinder, CylinderParams, ExtField,
    FluxField,
};
pub use fractional::FractionalParams;
pub use green::{
    free_green, free_kernel_heat_value, green_solve, green_value, robin_value, Accuracy, GreenField, GreenRoute, QuadratureSpec,
    RobinRoute, RobinValue,
};
pub use robin::{robin_gradient, robin_hessian, symmetry_scan, GradRoute, RobinReport};
pub use verify::{run_scenario, ScenarioConfig, ScenarioKind, VerificationReport};
