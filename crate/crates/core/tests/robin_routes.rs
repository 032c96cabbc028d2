//! Route-triangle checks for the Robin derivatives on the square: the
//! spectral (interior heat), finite-difference, and boundary-flux routes
//! must agree, and parity must silence the symmetry-forbidden entries.

use core::f64::consts::PI;
use robinfrac_core::robin::{GradRoute, RobinError, ScanTolerances};
use robinfrac_core::{
    build_domain, eigenbasis, robin_gradient, robin_hessian, symmetry_scan, Cylinder,
    CylinderParams, DomainKind, DomainSpec, EigenBasis, FractionalParams,
};

fn square(modes: usize) -> EigenBasis {
    let (dom, grid) = build_domain(&DomainSpec {
        kind: DomainKind::Rectangle,
        half_extents: vec![PI / 2.0, PI / 2.0],
        spacing: PI / 64.0,
    })
    .unwrap();
    eigenbasis(&dom, &grid, modes).unwrap()
}

#[test]
fn gradient_route_triangle() {
    let basis = square(2000);
    let cyl = Cylinder::new(&basis, &CylinderParams::default()).unwrap();
    let points = [[0.3, 0.4], [-0.55, 0.2]];
    for &s in &[0.3, 0.5, 0.7] {
        let params = FractionalParams::new(2, s).unwrap();
        for &t in &points {
            let gs = robin_gradient(&basis, t, s, &params, GradRoute::Spectral).unwrap();
            let gf = robin_gradient(&basis, t, s, &params, GradRoute::Fd).unwrap();
            let gb = robin_gradient(&basis, t, s, &params, GradRoute::Boundary(&cyl)).unwrap();
            let norm = (gs[0] * gs[0] + gs[1] * gs[1]).sqrt();
            let efd = ((gf[0] - gs[0]).powi(2) + (gf[1] - gs[1]).powi(2)).sqrt() / norm;
            let ebd = ((gb[0] - gs[0]).powi(2) + (gb[1] - gs[1]).powi(2)).sqrt() / norm;
            assert!(efd <= 1e-2, "fd vs spectral at s={s}, t={t:?}: {efd:.3e}");
            assert!(ebd <= 2e-2, "boundary vs spectral at s={s}, t={t:?}: {ebd:.3e}");
        }
    }
}

#[test]
fn hessian_routes_and_symmetry() {
    let basis = square(2000);
    let cyl = Cylinder::new(&basis, &CylinderParams::default()).unwrap();
    let t = [0.3, 0.4];
    for &s in &[0.3, 0.7] {
        let params = FractionalParams::new(2, s).unwrap();
        let hs = robin_hessian(&basis, t, s, &params, GradRoute::Spectral).unwrap();
        let hf = robin_hessian(&basis, t, s, &params, GradRoute::Fd).unwrap();
        let hb = robin_hessian(&basis, t, s, &params, GradRoute::Boundary(&cyl)).unwrap();
        // Spectral Hessian is symmetric to roundoff.
        assert!((hs[0][1] - hs[1][0]).abs() <= 1e-10 * hs[0][0].abs());
        let scale = hs[0][0].abs().max(hs[1][1].abs());
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (hf[i][j] - hs[i][j]).abs() <= 5e-2 * scale,
                    "fd Hessian entry ({i},{j}) at s={s}"
                );
                assert!(
                    (hb[i][j] - hs[i][j]).abs() <= 2e-2 * scale,
                    "boundary Hessian entry ({i},{j}) at s={s}"
                );
            }
        }
    }
}

#[test]
fn gradient_parity_on_symmetry_plane() {
    let basis = square(400);
    let params = FractionalParams::new(2, 0.5).unwrap();
    // Each term φ_j ∂₁φ_j vanishes at t₁ = 0 by parity: the spectral route
    // is exactly zero, not merely small.
    let t = [0.0, 0.4];
    let g = robin_gradient(&basis, t, 0.5, &params, GradRoute::Spectral).unwrap();
    assert!(g[0].abs() <= 1e-15, "spectral parity: {:.3e}", g[0]);
    assert!(g[1].abs() > 1e-3, "in-plane component must be nonzero");
    let gf = robin_gradient(&basis, t, 0.5, &params, GradRoute::Fd).unwrap();
    assert!(gf[0].abs() <= 1e-6 * gf[1].abs(), "fd parity: {:.3e}", gf[0]);
}

#[test]
fn gradient_is_odd_under_reflection() {
    let basis = square(900);
    let params = FractionalParams::new(2, 0.4).unwrap();
    for &t in &[[0.25, 0.3], [0.5, -0.2]] {
        let g = robin_gradient(&basis, t, 0.4, &params, GradRoute::Spectral).unwrap();
        let gm = robin_gradient(&basis, [-t[0], t[1]], 0.4, &params, GradRoute::Spectral).unwrap();
        assert!((g[0] + gm[0]).abs() <= 1e-12 * g[0].abs().max(1e-300));
        assert!((g[1] - gm[1]).abs() <= 1e-12 * g[1].abs().max(1e-300));
    }
}

#[test]
fn center_hessian_square_and_rectangle() {
    let params = FractionalParams::new(2, 0.5).unwrap();
    let basis = square(900);
    let h = robin_hessian(&basis, [0.0, 0.0], 0.5, &params, GradRoute::Spectral).unwrap();
    assert!(h[0][0] > 0.0 && h[1][1] > 0.0);
    assert!((h[0][0] - h[1][1]).abs() <= 1e-10 * h[0][0]);
    assert!(h[0][1].abs() <= 1e-13 * h[0][0]);

    let (dom, grid) = build_domain(&DomainSpec {
        kind: DomainKind::Rectangle,
        half_extents: vec![PI / 2.0, PI / 4.0],
        spacing: PI / 80.0,
    })
    .unwrap();
    let rect = eigenbasis(&dom, &grid, 900).unwrap();
    let h = robin_hessian(&rect, [0.0, 0.0], 0.5, &params, GradRoute::Spectral).unwrap();
    assert!(h[0][0] > 0.0 && h[1][1] > 0.0);
    let gap = (h[0][0] - h[1][1]).abs() / h[0][0].max(h[1][1]);
    assert!(gap > 0.05, "anisotropy must separate the diagonal: {gap:.3}");
    assert!(h[0][1].abs() <= 1e-3 * h[0][0].min(h[1][1]));
    // fd route agrees on the leading entries.
    let hf = robin_hessian(&rect, [0.0, 0.0], 0.5, &params, GradRoute::Fd).unwrap();
    assert!((hf[0][0] - h[0][0]).abs() <= 5e-2 * h[0][0]);
    assert!((hf[1][1] - h[1][1]).abs() <= 5e-2 * h[1][1]);
}

#[test]
fn scan_rejects_off_plane_points() {
    let basis = square(100);
    let params = FractionalParams::new(2, 0.5).unwrap();
    let err = symmetry_scan(
        &basis,
        0.5,
        &params,
        0,
        &[[0.01, 0.2]],
        None,
        &ScanTolerances::analytic(),
    );
    assert!(matches!(err, Err(RobinError::OffHyperplane { .. })));
}

#[test]
fn scan_reports_on_square() {
    let basis = square(400);
    let params = FractionalParams::new(2, 0.5).unwrap();
    let pts: Vec<[f64; 2]> = (-2..=2).map(|k| [0.0, k as f64 * 0.2]).collect();
    let reports = symmetry_scan(
        &basis,
        0.5,
        &params,
        0,
        &pts,
        None,
        &ScanTolerances::analytic(),
    )
    .unwrap();
    assert_eq!(reports.len(), 5);
    for r in &reports {
        assert!(r.pass(), "report at {:?} failed: {r:?}", r.t);
        assert!(r.alpha > 0.0);
    }
    // Reflected pair consistency: α at (0, 0.2) equals α at (0, -0.2).
    let a_plus = reports[3].alpha;
    let a_minus = reports[1].alpha;
    assert!((a_plus - a_minus).abs() <= 1e-10 * a_plus.abs());
    // α varies along the line.
    assert!((reports[2].alpha - reports[0].alpha).abs() > 1e-4);
}
