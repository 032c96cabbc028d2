//! Property tests for the structural invariants: semigroup law of the
//! fractional power, kernel scaling, grid symmetry, and the geometric
//! condition on sampled boundaries.

use core::f64::consts::PI;
use proptest::prelude::*;

use robinfrac_core::{
    apply_fractional, build_domain, eigenbasis, free_green, hs_norm_sq, robin_value,
    verify_normal_condition, Accuracy, DomainKind, DomainSpec, FractionalParams, QuadratureSpec,
    RobinRoute,
};

fn interval_basis(modes: usize) -> robinfrac_core::EigenBasis {
    let (dom, grid) = build_domain(&DomainSpec {
        kind: DomainKind::Interval,
        half_extents: vec![PI / 2.0],
        spacing: PI / 64.0,
    })
    .unwrap();
    eigenbasis(&dom, &grid, modes).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fractional_semigroup(
        s1 in 0.05f64..0.85,
        frac in 0.05f64..0.95,
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..12),
    ) {
        let s2 = (1.0 - s1) * frac;
        let basis = interval_basis(coeffs.len());
        let once = apply_fractional(&basis, &apply_fractional(&basis, &coeffs, s1).unwrap(), s2).unwrap();
        let direct = apply_fractional(&basis, &coeffs, s1 + s2).unwrap();
        for (a, b) in once.iter().zip(&direct) {
            prop_assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0));
        }
    }

    #[test]
    fn hs_norm_matches_half_application(
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..10),
        s in 0.1f64..0.9,
    ) {
        // ‖u‖²_{H^s} = ‖(-Δ)^{s/2} u‖²_{L²}.
        let basis = interval_basis(coeffs.len());
        let norm = hs_norm_sq(&basis, &coeffs, s).unwrap();
        let half = apply_fractional(&basis, &coeffs, s / 2.0).unwrap();
        let via_half: f64 = half.iter().map(|c| c * c).sum();
        prop_assert!((norm - via_half).abs() <= 1e-12 * norm.max(1e-12));
    }

    #[test]
    fn free_kernel_scaling(r in 0.05f64..20.0, s in 0.05f64..0.45) {
        // c r^{2s-N} obeys the pure power law in |x - t|.
        let params = FractionalParams::new(1, s).unwrap();
        let at_r = free_green([r, 0.0], [0.0, 0.0], &params).unwrap();
        let at_1 = free_green([1.0, 0.0], [0.0, 0.0], &params).unwrap();
        let expect = r.powf(2.0 * s - 1.0);
        prop_assert!((at_r / at_1 - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn grid_masks_are_mirror_symmetric(
        a in 0.5f64..2.0,
        b in 0.4f64..1.5,
        kind_pick in 0usize..2,
    ) {
        let kind = if kind_pick == 0 { DomainKind::Rectangle } else { DomainKind::Ellipse };
        let spacing = b.min(a) / 20.0;
        let (_, grid) = build_domain(&DomainSpec {
            kind,
            half_extents: vec![a, b],
            spacing,
        }).unwrap();
        let nx = grid.xs.len();
        let ny = grid.ys.len();
        for iy in 0..ny {
            for ix in 0..nx {
                let m = grid.mask[iy * nx + ix];
                prop_assert_eq!(m, grid.mask[iy * nx + (nx - 1 - ix)]);
                prop_assert_eq!(m, grid.mask[(ny - 1 - iy) * nx + ix]);
            }
        }
    }

    #[test]
    fn convex_symmetric_domains_satisfy_normal_condition(
        a in 0.5f64..2.0,
        b in 0.4f64..1.5,
        kind_pick in 0usize..2,
    ) {
        let kind = if kind_pick == 0 { DomainKind::Rectangle } else { DomainKind::Ellipse };
        let spacing = b.min(a) / 18.0;
        let (_, grid) = build_domain(&DomainSpec {
            kind,
            half_extents: vec![a, b],
            spacing,
        }).unwrap();
        for axis in 0..2 {
            let rep = verify_normal_condition(&grid.boundary, axis);
            prop_assert!(rep.pass, "axis {}: max violation {}", axis, rep.max_value);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn robin_reflection_symmetry(tx in 0.05f64..0.5, ty in -0.5f64..0.5) {
        // Heat-route Robin values are exactly reflection symmetric on the
        // square (per-mode parity cancels in φ_j(t)²).
        let (dom, grid) = build_domain(&DomainSpec {
            kind: DomainKind::Rectangle,
            half_extents: vec![PI / 2.0, PI / 2.0],
            spacing: PI / 64.0,
        }).unwrap();
        let basis = eigenbasis(&dom, &grid, 300).unwrap();
        let params = FractionalParams::new(2, 0.5).unwrap();
        let t = [tx, ty];
        let d = dom.distance_to_boundary(t);
        let quad = QuadratureSpec::build(&basis, d, Accuracy::Best).unwrap();
        let r = robin_value(&basis, t, 0.5, &params, &quad, RobinRoute::Heat).unwrap().value;
        for mirrored in [[-tx, ty], [tx, -ty]] {
            let rm = robin_value(&basis, mirrored, 0.5, &params, &quad, RobinRoute::Heat)
                .unwrap()
                .value;
            prop_assert!((r - rm).abs() <= 1e-12 * r.abs());
        }
        prop_assert!(r > 0.0);
    }
}
