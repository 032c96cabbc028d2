//! Numeric (ellipse) eigenbasis: spectrum quality against refined-grid
//! oracles, basis invariants, and the symmetry-plane theorems on a curved
//! domain.

use robinfrac_core::basis::BasisError;
use robinfrac_core::robin::{GradRoute, ScanTolerances};
use robinfrac_core::{
    build_domain, eigenbasis, robin_gradient, robin_hessian, solve_ui, symmetry_scan, Cylinder,
    CylinderParams, Domain, DomainKind, DomainSpec, FractionalParams, Grid,
};

fn ellipse(h: f64) -> (Domain, Grid) {
    build_domain(&DomainSpec {
        kind: DomainKind::Ellipse,
        half_extents: vec![1.0, 0.6],
        spacing: h,
    })
    .unwrap()
}

#[test]
fn ground_eigenvalue_against_refined_oracle() {
    // The production basis extrapolates (h, h/2); the oracle extrapolates
    // (h/2, h/4) by building on the refined grid. Agreement within 1%.
    let (dom, grid) = ellipse(0.0375);
    let basis = eigenbasis(&dom, &grid, 6).unwrap();
    let (dom_f, grid_f) = ellipse(0.0375 / 2.0);
    let oracle = eigenbasis(&dom_f, &grid_f, 6).unwrap();
    for j in 0..6 {
        let rel = ((basis.lambda(j) - oracle.lambda(j)) / oracle.lambda(j)).abs();
        assert!(
            rel < 1e-2,
            "mode {j}: {} vs oracle {} (rel {rel:.3e})",
            basis.lambda(j),
            oracle.lambda(j)
        );
    }
    // The ground eigenvalue is tighter than 1% by a wide margin.
    let rel = ((basis.lambda(0) - oracle.lambda(0)) / oracle.lambda(0)).abs();
    assert!(rel < 1e-4, "λ₁ agreement {rel:.3e}");
}

#[test]
fn spectrum_refinement_is_monotone_and_first_order_bounded() {
    // |λ_j(h) - λ_j(h/2)|/λ_j ≤ C·h for the first modes, and refinement
    // moves each retained eigenvalue monotonically toward the extrapolated
    // value.
    let (dom, grid) = ellipse(0.0375);
    let coarse = eigenbasis(&dom, &grid, 10).unwrap();
    let (dom_f, grid_f) = ellipse(0.0375 / 2.0);
    let fine = eigenbasis(&dom_f, &grid_f, 10).unwrap();
    let c_bound = 1.0;
    for j in 0..10 {
        let rel = ((coarse.lambda(j) - fine.lambda(j)) / fine.lambda(j)).abs();
        assert!(rel <= c_bound * 0.0375, "mode {j}: rel change {rel:.3e}");
        // Both extrapolations approach the (better) fine value from the
        // same side: the coarse error has the larger magnitude.
        let gap_coarse = coarse.lambda(j) - fine.lambda(j);
        assert!(
            gap_coarse.abs() <= 0.05 * fine.lambda(j),
            "mode {j}: suspicious extrapolation gap"
        );
    }
}

#[test]
fn orthonormality_and_ground_sign() {
    let (dom, grid) = ellipse(0.0375);
    let basis = eigenbasis(&dom, &grid, 40).unwrap();
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!(
                (basis.l2_inner(i, j) - want).abs() <= 1e-6,
                "({i},{j}): {}",
                basis.l2_inner(i, j)
            );
        }
    }
    // Ground mode keeps one sign across the interior.
    let grid = basis.grid();
    for &(ix, iy) in &grid.interior {
        let v = basis.values_at(grid.node(ix, iy))[0];
        assert!(v > 0.0, "ground mode sign at {:?}", grid.node(ix, iy));
    }
}

#[test]
fn mode_cap_enforced() {
    let (dom, grid) = ellipse(0.0375);
    let cap = grid.interior_count() / 4;
    assert!(matches!(
        eigenbasis(&dom, &grid, cap + 1),
        Err(BasisError::TooManyModes { .. })
    ));
}

#[test]
fn laplacian_consistency_of_evaluators() {
    // tr Hess φ_j ≈ -λ_j φ_j for the fitted evaluators at interior points.
    let (dom, grid) = ellipse(0.0375);
    let basis = eigenbasis(&dom, &grid, 20).unwrap();
    for &p in &[[0.0, 0.0], [0.3, 0.1], [-0.2, -0.15]] {
        let ev = basis.point_eval(p);
        for j in 0..basis.len() {
            let tr = ev.hess[j][0] + ev.hess[j][2];
            let want = -basis.lambda(j) * ev.phi[j];
            let scale = basis.lambda(j) * ev.phi[j].abs().max(0.1);
            assert!(
                (tr - want).abs() <= 2e-2 * scale,
                "mode {j} at {p:?}: tr {tr} vs {want}"
            );
        }
    }
}

#[test]
fn symmetry_plane_theorem_on_ellipse() {
    // Criterion-level run: three hyperplane points at 0.5% relative
    // tolerance, numeric basis.
    let (dom, grid) = ellipse(0.025);
    let basis = eigenbasis(&dom, &grid, 240).unwrap();
    let s = 0.3;
    let params = FractionalParams::new(2, s).unwrap();
    let points = [[0.0, 0.0], [0.0, 0.25], [0.0, -0.25]];
    let tols = ScanTolerances::numeric();
    let reports = symmetry_scan(&basis, s, &params, 0, &points, None, &tols).unwrap();
    for r in &reports {
        assert!(r.th1a_pass, "normal gradient at {:?}: {:?}", r.t, r.grad_spectral);
        assert!(r.th1b_pass, "Hessian row at {:?}", r.t);
        assert!(r.alpha > 0.0);
        assert!(r.route_agree_pass, "route agreement at {:?}", r.t);
    }
    // Center: gradient vanishes in both axes, Hessian diagonal positive.
    let g = robin_gradient(&basis, [0.0, 0.0], s, &params, GradRoute::Spectral).unwrap();
    let h = robin_hessian(&basis, [0.0, 0.0], s, &params, GradRoute::Spectral).unwrap();
    let gscale = h[0][0].abs() * dom.diameter();
    assert!(g[0].abs() <= 5e-3 * gscale && g[1].abs() <= 5e-3 * gscale);
    assert!(h[0][0] > 0.0 && h[1][1] > 0.0);
    assert!(h[0][1].abs() <= 5e-3 * h[0][0].min(h[1][1]));
}

#[test]
fn theorem1_scenario_on_ellipse() {
    // Scenario-level run on the curved domain at numeric tolerances,
    // including the boundary-flux route and the auxiliary sign checks.
    use robinfrac_core::{run_scenario, CylinderParams, ScenarioConfig, ScenarioKind};
    let mut cfg = ScenarioConfig::new(
        ScenarioKind::Theorem1,
        DomainSpec {
            kind: DomainKind::Ellipse,
            half_extents: vec![1.0, 0.6],
            spacing: 0.025,
        },
    );
    cfg.s_values = vec![0.3];
    cfg.modes = 240;
    cfg.cylinder = CylinderParams {
        levels: 96,
        grading: 2.0,
        y_max: None,
    };
    let report = run_scenario(&cfg).unwrap();
    let failures: Vec<_> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} [{}]: {} vs {} (tol {})", c.claim_id, c.route, c.value, c.reference, c.tolerance))
        .collect();
    assert!(report.pass, "{failures:#?}");
}

#[test]
fn hopf_signs_on_ellipse() {
    // Sign-only checks for the auxiliary odd problem on the curved domain.
    let (dom, grid) = ellipse(0.0375);
    let basis = eigenbasis(&dom, &grid, 120).unwrap();
    let s = 0.3;
    let params = FractionalParams::new(2, s).unwrap();
    let cyl = Cylinder::new(
        &basis,
        &CylinderParams {
            levels: 96,
            grading: 2.0,
            y_max: None,
        },
    )
    .unwrap();
    let t_bar = [0.0, 0.0];
    let u1 = solve_ui(&basis, t_bar, 0, s, &cyl, &params).unwrap();
    let grid = basis.grid();
    let trace = u1.trace();
    let sup = trace.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    // Zero on the plane.
    let c = grid.nearest_interior(t_bar).unwrap();
    assert!(trace[c].abs() <= 1e-6 * sup);
    // Positive on the negative half (sign-only, away from the boundary).
    let hx = grid.spacing[0];
    for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
        let p = grid.node(ix, iy);
        if p[0] <= -2.0 * hx && dom.distance_to_boundary(p) > 2.0 * hx {
            assert!(trace[i] > 0.0, "positivity at {p:?}");
        }
    }
    // Hopf: strictly negative slope across the plane.
    let (cx, cy) = grid.interior[c];
    let l = grid.interior_index(cx - 1, cy).unwrap();
    let r = grid.interior_index(cx + 1, cy).unwrap();
    let d1 = (trace[r] - trace[l]) / (2.0 * hx);
    assert!(d1 < 0.0, "Hopf sign: {d1}");
}
