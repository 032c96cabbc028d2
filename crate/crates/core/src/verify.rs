//! Scenario runner: executes named verification suites and aggregates
//! per-check records into a deterministic report.
//!
//! Every check row carries a stable claim id, a plain-language statement of
//! the mathematical property being tested, the route it was computed by,
//! the computed value, the reference value, and the tolerance. Numerical
//! route failures are recorded as failed checks; they never escape as
//! panics from `run_scenario`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::basis::{eigenbasis, EigenBasis};
use crate::domain::{build_domain, verify_normal_condition, DomainError, DomainKind, DomainSpec};
use crate::extension::{
    extend, extension_energy, neumann_trace, robin_hessian_boundary, solve_ui,
    u1_representation, Cylinder, CylinderParams, ExtRoute, ExtSource,
};
use crate::fractional::{FractionalError, FractionalParams};
use crate::green::{free_green, free_kernel_heat_value, green_value, GreenRoute};
use crate::math;
use crate::robin::{robin_gradient, robin_hessian, symmetry_scan, GradRoute, ScanTolerances};
use crate::special::{extension_profile, extension_profile_deriv};

/// Named verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Symmetry-plane scan: normal gradient vanishes, Hessian row through
    /// the axis is `α δ` with `α > 0`; includes boundary-route cross-checks
    /// and the auxiliary-problem sign checks.
    Theorem1,
    /// Full-symmetry center point: vanishing gradient, diagonal positive
    /// Hessian.
    Theorem2,
    /// Reflection symmetry of the Green function and its extension.
    LemmaSymmetry,
    /// Auxiliary odd problem: zero trace on the plane, positivity, Hopf
    /// sign, boundary-integral representation.
    LemmaU1,
    /// Boundary-flux representation of the gradient and Hessian against
    /// the interior routes.
    LemmaGradFormula,
    /// Extension machinery self-test: closed forms, isometry, conormal
    /// trace.
    ExtensionSelftest,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Theorem1 => "theorem1",
            Self::Theorem2 => "theorem2",
            Self::LemmaSymmetry => "lemma_symmetry",
            Self::LemmaU1 => "lemma_u1",
            Self::LemmaGradFormula => "lemma_grad_formula",
            Self::ExtensionSelftest => "extension_selftest",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "theorem1" => Self::Theorem1,
            "theorem2" => Self::Theorem2,
            "lemma_symmetry" => Self::LemmaSymmetry,
            "lemma_u1" => Self::LemmaU1,
            "lemma_grad_formula" => Self::LemmaGradFormula,
            "extension_selftest" => Self::ExtensionSelftest,
            _ => return None,
        })
    }

    pub fn all() -> [Self; 6] {
        [
            Self::Theorem1,
            Self::Theorem2,
            Self::LemmaSymmetry,
            Self::LemmaU1,
            Self::LemmaGradFormula,
            Self::ExtensionSelftest,
        ]
    }
}

/// Tolerances per route class; defaults follow the dominant discretization
/// error of each route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSet {
    /// Closed-form identities on analytic bases.
    pub analytic_identity: f64,
    /// fd-vs-spectral agreement.
    pub fd_vs_spectral: f64,
    /// Boundary-route agreement.
    pub boundary_vs_spectral: f64,
    /// Numeric-basis (grid eigenfunctions) relative tolerance.
    pub numeric_relative: f64,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        Self {
            analytic_identity: 1e-10,
            fd_vs_spectral: 1e-2,
            boundary_vs_spectral: 2e-2,
            numeric_relative: 5e-3,
        }
    }
}

/// Configuration of one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub domain: DomainSpec,
    pub s_values: Vec<f64>,
    pub modes: usize,
    pub cylinder: CylinderParams,
    /// Test points; scenario-specific defaults are used when empty.
    pub points: Vec<[f64; 2]>,
    pub tolerances: ToleranceSet,
}

impl ScenarioConfig {
    /// A ready-to-run configuration with per-scenario defaults.
    pub fn new(scenario: ScenarioKind, domain: DomainSpec) -> Self {
        let modes = match scenario {
            ScenarioKind::Theorem1 => 400,
            ScenarioKind::Theorem2 => 400,
            ScenarioKind::LemmaGradFormula => 2000,
            ScenarioKind::LemmaSymmetry => 400,
            ScenarioKind::LemmaU1 => 400,
            ScenarioKind::ExtensionSelftest => 64,
        };
        Self {
            scenario,
            domain,
            s_values: alloc::vec![0.5],
            modes,
            cylinder: CylinderParams::default(),
            points: Vec::new(),
            tolerances: ToleranceSet::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    UnknownScenario(String),
    Domain(DomainError),
    Fractional(FractionalError),
    Basis(String),
    Cylinder(String),
    EmptySList,
    NonPositiveTolerance,
    PointNotInterior([f64; 2]),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownScenario(s) => write!(f, "unknown scenario '{s}'"),
            Self::Domain(e) => write!(f, "invalid domain: {e}"),
            Self::Fractional(e) => write!(f, "invalid fractional order: {e}"),
            Self::Basis(e) => write!(f, "eigenbasis construction failed: {e}"),
            Self::Cylinder(e) => write!(f, "invalid cylinder mesh: {e}"),
            Self::EmptySList => write!(f, "at least one value of s is required"),
            Self::NonPositiveTolerance => write!(f, "tolerances must be positive"),
            Self::PointNotInterior(p) => {
                write!(f, "test point ({}, {}) is not interior", p[0], p[1])
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConfigError {}

/// One pass/fail record.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub claim_id: String,
    /// Plain-language statement of the property checked.
    pub statement: String,
    pub route: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Present when a numerical route failed outright.
    pub note: Option<String>,
}

/// Grid/mesh fingerprint of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentStamp {
    pub domain_kind: String,
    pub half_extents: Vec<f64>,
    pub spacing: [f64; 2],
    pub interior_nodes: usize,
    pub modes: usize,
    pub cylinder_levels: usize,
    pub cylinder_grading: f64,
    pub cylinder_height: f64,
    pub s_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub scenario: String,
    pub checks: Vec<CheckRecord>,
    pub environment: EnvironmentStamp,
    pub pass: bool,
}

struct Ctx {
    basis: EigenBasis,
    cylinder: Cylinder,
    tols: ToleranceSet,
    points: Vec<[f64; 2]>,
    checks: Vec<CheckRecord>,
}

impl Ctx {
    fn numeric_basis(&self) -> bool {
        self.basis.domain().kind == DomainKind::Ellipse
    }

    fn scan_tols(&self) -> ScanTolerances {
        if self.numeric_basis() {
            let mut t = ScanTolerances::numeric();
            t.grad_spec_ratio = self.tols.numeric_relative;
            t.grad_fd_ratio = self.tols.numeric_relative;
            t.hess_offdiag_ratio = self.tols.numeric_relative;
            t.route_rel = self.tols.numeric_relative;
            t
        } else {
            ScanTolerances::analytic()
        }
    }

    fn push(
        &mut self,
        claim_id: impl Into<String>,
        statement: &str,
        route: &str,
        value: f64,
        reference: f64,
        tolerance: f64,
        pass: bool,
    ) {
        self.checks.push(CheckRecord {
            claim_id: claim_id.into(),
            statement: statement.to_string(),
            route: route.to_string(),
            value,
            reference,
            tolerance,
            pass,
            note: None,
        });
    }

    /// Absolute-difference check.
    fn check_abs(
        &mut self,
        claim_id: impl Into<String>,
        statement: &str,
        route: &str,
        value: f64,
        reference: f64,
        tolerance: f64,
    ) {
        let pass = math::abs(value - reference) <= tolerance;
        self.push(claim_id, statement, route, value, reference, tolerance, pass);
    }

    /// Relative-difference check.
    fn check_rel(
        &mut self,
        claim_id: impl Into<String>,
        statement: &str,
        route: &str,
        value: f64,
        reference: f64,
        tolerance: f64,
    ) {
        let denom = f64::max(math::abs(reference), 1e-300);
        let pass = math::abs(value - reference) <= tolerance * denom;
        self.push(claim_id, statement, route, value, reference, tolerance, pass);
    }

    /// Sign-only check: pass iff `value` has the sign of `reference`.
    fn check_sign(
        &mut self,
        claim_id: impl Into<String>,
        statement: &str,
        route: &str,
        value: f64,
        reference: f64,
    ) {
        let pass = value * reference > 0.0;
        self.push(claim_id, statement, route, value, reference, 0.0, pass);
    }

    fn record_failure(&mut self, claim_id: impl Into<String>, statement: &str, err: impl fmt::Display) {
        self.checks.push(CheckRecord {
            claim_id: claim_id.into(),
            statement: statement.to_string(),
            route: "n/a".to_string(),
            value: f64::NAN,
            reference: 0.0,
            tolerance: 0.0,
            pass: false,
            note: Some(format!("route failed: {err}")),
        });
    }
}

fn default_points(scenario: ScenarioKind, domain: &DomainSpec) -> Vec<[f64; 2]> {
    let dim = domain.kind.dim();
    match scenario {
        ScenarioKind::Theorem1 => {
            if dim == 1 {
                alloc::vec![[0.0, 0.0]]
            } else if domain.kind == DomainKind::Ellipse {
                let b = domain.half_extents[1];
                alloc::vec![[0.0, 0.0], [0.0, 0.4 * b], [0.0, -0.4 * b]]
            } else {
                // Five points on the plane, matching (0, ±0.4), (0, ±0.2),
                // (0, 0) on the standard square and scaling with b.
                let b = domain.half_extents[1];
                (-2..=2).map(|k| [0.0, k as f64 * 0.127 * b]).collect()
            }
        }
        ScenarioKind::Theorem2 => alloc::vec![[0.0, 0.0]],
        ScenarioKind::LemmaSymmetry | ScenarioKind::LemmaU1 => {
            if dim == 1 {
                alloc::vec![[0.0, 0.0], [0.3, 0.0]]
            } else {
                let b = domain.half_extents[1];
                alloc::vec![[0.0, 0.25 * b], [0.2 * domain.half_extents[0], 0.25 * b]]
            }
        }
        ScenarioKind::LemmaGradFormula => {
            if dim == 1 {
                alloc::vec![[0.2, 0.0], [-0.35, 0.0]]
            } else {
                let [a, b] = [domain.half_extents[0], domain.half_extents[1]];
                alloc::vec![
                    [0.19 * a, 0.25 * b],
                    [-0.32 * a, 0.13 * b],
                    [0.45 * a, -0.19 * b],
                    [-0.13 * a, -0.38 * b],
                    [0.29 * a, 0.35 * b],
                    [-0.41 * a, -0.10 * b],
                ]
            }
        }
        ScenarioKind::ExtensionSelftest => alloc::vec![[0.0, 0.0]],
    }
}

fn validate(config: &ScenarioConfig) -> Result<(), ConfigError> {
    if config.s_values.is_empty() {
        return Err(ConfigError::EmptySList);
    }
    let dim = config.domain.kind.dim();
    for &s in &config.s_values {
        FractionalParams::new(dim, s).map_err(ConfigError::Fractional)?;
    }
    let t = config.tolerances;
    if !(t.analytic_identity > 0.0
        && t.fd_vs_spectral > 0.0
        && t.boundary_vs_spectral > 0.0
        && t.numeric_relative > 0.0)
    {
        return Err(ConfigError::NonPositiveTolerance);
    }
    Ok(())
}

/// Run one scenario. Configuration problems are errors; numerical route
/// failures are recorded in the report and fail it.
pub fn run_scenario(config: &ScenarioConfig) -> Result<VerificationReport, ConfigError> {
    validate(config)?;
    let (domain, grid) = build_domain(&config.domain).map_err(ConfigError::Domain)?;
    let basis = eigenbasis(&domain, &grid, config.modes)
        .map_err(|e| ConfigError::Basis(e.to_string()))?;
    let cylinder = Cylinder::new(&basis, &config.cylinder)
        .map_err(|e| ConfigError::Cylinder(e.to_string()))?;
    let points = if config.points.is_empty() {
        default_points(config.scenario, &config.domain)
    } else {
        config.points.clone()
    };
    for p in &points {
        if !domain.contains(*p) {
            return Err(ConfigError::PointNotInterior(*p));
        }
    }
    let environment = EnvironmentStamp {
        domain_kind: config.domain.kind.name().to_string(),
        half_extents: config.domain.half_extents.clone(),
        spacing: grid.spacing,
        interior_nodes: grid.interior_count(),
        modes: basis.len(),
        cylinder_levels: cylinder.levels(),
        cylinder_grading: cylinder.grading,
        cylinder_height: cylinder.y_max,
        s_values: config.s_values.clone(),
    };
    let mut ctx = Ctx {
        basis,
        cylinder,
        tols: config.tolerances,
        points,
        checks: Vec::new(),
    };
    for &s in &config.s_values {
        let params = FractionalParams::new(domain.dim(), s).map_err(ConfigError::Fractional)?;
        match config.scenario {
            ScenarioKind::Theorem1 => scenario_theorem1(&mut ctx, s, &params),
            ScenarioKind::Theorem2 => scenario_theorem2(&mut ctx, s, &params),
            ScenarioKind::LemmaSymmetry => scenario_lemma_symmetry(&mut ctx, s, &params),
            ScenarioKind::LemmaU1 => scenario_lemma_u1(&mut ctx, s, &params),
            ScenarioKind::LemmaGradFormula => scenario_lemma_grad(&mut ctx, s, &params),
            ScenarioKind::ExtensionSelftest => scenario_selftest(&mut ctx, s, &params),
        }
    }
    let pass = ctx.checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        scenario: config.scenario.name().to_string(),
        checks: ctx.checks,
        environment,
        pass,
    })
}

fn scenario_theorem1(ctx: &mut Ctx, s: f64, params: &FractionalParams) {
    // Geometric hypothesis first.
    let rep = verify_normal_condition(&ctx.basis.grid().boundary, 0);
    ctx.push(
        format!("normal-condition-s{s}"),
        "boundary satisfies x₁ν₁ ≤ 0 (convexity toward the symmetry axis)",
        "geometry",
        rep.max_value,
        0.0,
        1e-12,
        rep.pass,
    );
    let tols = ctx.scan_tols();
    let points = ctx.points.clone();
    let cyl = ctx.cylinder.clone();
    match symmetry_scan(&ctx.basis, s, params, 0, &points, Some(&cyl), &tols) {
        Ok(reports) => {
            for (i, r) in reports.iter().enumerate() {
                let tag = format!("s{s}-pt{i}");
                ctx.push(
                    format!("grad-normal-vanishes-{tag}"),
                    "Robin gradient component normal to the symmetry plane vanishes",
                    "spectral+fd+boundary",
                    math::abs(r.grad_spectral[0]),
                    0.0,
                    f64::max(tols.grad_spec_abs, tols.grad_spec_ratio),
                    r.th1a_pass,
                );
                ctx.push(
                    format!("hessian-row-diagonal-{tag}"),
                    "Hessian row through the symmetry axis is α·δ with α > 0",
                    "spectral+fd",
                    r.alpha,
                    r.alpha,
                    tols.hess_offdiag_ratio,
                    r.th1b_pass,
                );
                ctx.push(
                    format!("route-agreement-{tag}"),
                    "interior and finite-difference routes agree on the nonzero entries",
                    "spectral/fd",
                    if r.route_agree_pass { 0.0 } else { 1.0 },
                    0.0,
                    tols.route_rel,
                    r.route_agree_pass,
                );
            }
        }
        Err(e) => ctx.record_failure(
            format!("symmetry-scan-s{s}"),
            "symmetry-plane scan",
            e,
        ),
    }
    // Auxiliary odd-problem sign checks at the first hyperplane point.
    let t_bar = ctx.points[0];
    scenario_u1_signs(ctx, t_bar, s, params, &format!("s{s}"));
}

fn scenario_u1_signs(ctx: &mut Ctx, t_bar: [f64; 2], s: f64, params: &FractionalParams, tag: &str) {
    let cyl = ctx.cylinder.clone();
    let u1 = match solve_ui(&ctx.basis, t_bar, 0, s, &cyl, params) {
        Ok(f) => f,
        Err(e) => {
            ctx.record_failure(
                format!("aux-problem-{tag}"),
                "auxiliary odd-problem solve",
                e,
            );
            return;
        }
    };
    let grid = ctx.basis.grid().clone();
    let trace = u1.trace();
    let sup: f64 = trace.iter().fold(0.0, |m, &v| f64::max(m, math::abs(v)));
    // Zero on the plane.
    let center = grid.nearest_interior(t_bar).unwrap();
    ctx.check_abs(
        format!("aux-zero-on-plane-{tag}"),
        "auxiliary trace vanishes at the hyperplane point",
        "fd-cylinder",
        math::abs(trace[center]) / sup,
        0.0,
        1e-6,
    );
    // Positive on the negative half (two cells away from the boundary).
    let hx = grid.spacing[0];
    let mut min_pos = f64::INFINITY;
    for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
        let p = grid.node(ix, iy);
        if p[0] <= -hx && ctx.basis.domain().distance_to_boundary(p) > 1.5 * hx {
            min_pos = f64::min(min_pos, trace[i]);
        }
    }
    ctx.push(
        format!("aux-positive-negative-half-{tag}"),
        "auxiliary trace is positive on the negative half-domain",
        "fd-cylinder",
        min_pos / sup,
        1.0,
        0.0,
        min_pos > 0.0,
    );
    // Hopf sign: ∂₁U₁ < 0 at the plane (central difference of the trace).
    let (cx, cy) = grid.interior[center];
    let left = grid.interior_index(cx - 1, cy).unwrap();
    let right = grid.interior_index(cx + 1, cy).unwrap();
    let d1 = (trace[right] - trace[left]) / (2.0 * hx);
    ctx.check_sign(
        format!("aux-hopf-sign-{tag}"),
        "normal slope of the auxiliary trace at the plane is negative",
        "fd-cylinder",
        d1,
        -1.0,
    );
    // Oddness of the trace. Numeric bases go through interpolated lateral
    // data whose stencils are not bitwise mirror images, so their parity
    // floor sits above the solver tolerance.
    let nx = grid.xs.len();
    let mut worst = 0.0;
    for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
        let j = grid.index[iy * nx + (nx - 1 - ix)];
        worst = f64::max(worst, math::abs(trace[i] + trace[j]));
    }
    let odd_tol = if ctx.numeric_basis() { 1e-5 } else { 1e-6 };
    ctx.check_abs(
        format!("aux-trace-odd-{tag}"),
        "auxiliary trace is odd across the symmetry plane",
        "fd-cylinder",
        worst / sup,
        0.0,
        odd_tol,
    );
}

fn scenario_theorem2(ctx: &mut Ctx, s: f64, params: &FractionalParams) {
    let dim = ctx.basis.domain().dim();
    for axis in 0..dim {
        let rep = verify_normal_condition(&ctx.basis.grid().boundary, axis);
        ctx.push(
            format!("normal-condition-axis{axis}-s{s}"),
            "boundary satisfies x_iν_i ≤ 0 on every symmetry axis",
            "geometry",
            rep.max_value,
            0.0,
            1e-12,
            rep.pass,
        );
    }
    let t = [0.0, 0.0];
    let diam = ctx.basis.domain().diameter();
    let g_spec = robin_gradient(&ctx.basis, t, s, params, GradRoute::Spectral);
    let g_fd = robin_gradient(&ctx.basis, t, s, params, GradRoute::Fd);
    let h_spec = robin_hessian(&ctx.basis, t, s, params, GradRoute::Spectral);
    let h_fd = robin_hessian(&ctx.basis, t, s, params, GradRoute::Fd);
    let (g_spec, g_fd, h_spec, h_fd) = match (g_spec, g_fd, h_spec, h_fd) {
        (Ok(a), Ok(b), Ok(c), Ok(d)) => (a, b, c, d),
        (Err(e), ..) | (_, Err(e), ..) => {
            ctx.record_failure(format!("center-critical-s{s}"), "center derivatives", e);
            return;
        }
        (_, _, Err(e), _) | (_, _, _, Err(e)) => {
            ctx.record_failure(format!("center-critical-s{s}"), "center derivatives", e);
            return;
        }
    };
    let alpha_min = if dim == 2 {
        f64::min(h_spec[0][0], h_spec[1][1])
    } else {
        h_spec[0][0]
    };
    let gscale = f64::max(math::abs(alpha_min) * diam, 1e-300);
    for axis in 0..dim {
        ctx.check_abs(
            format!("grad-zero-axis{axis}-s{s}"),
            "Robin gradient vanishes at the center",
            "spectral",
            math::abs(g_spec[axis]),
            0.0,
            if ctx.numeric_basis() {
                ctx.tols.numeric_relative * gscale
            } else {
                1e-12
            },
        );
        ctx.check_abs(
            format!("grad-zero-fd-axis{axis}-s{s}"),
            "Robin gradient vanishes at the center",
            "fd",
            math::abs(g_fd[axis]),
            0.0,
            1e-6 * gscale,
        );
    }
    for axis in 0..dim {
        let diag = h_spec[axis][axis];
        ctx.push(
            format!("hessian-diag-positive-axis{axis}-s{s}"),
            "diagonal Hessian entry at the center is positive",
            "spectral",
            diag,
            1.0,
            0.0,
            diag > 0.0,
        );
    }
    if dim == 2 {
        ctx.check_abs(
            format!("hessian-offdiag-zero-s{s}"),
            "Hessian at the center is diagonal",
            "spectral",
            math::abs(h_spec[0][1]),
            0.0,
            1e-3 * math::abs(alpha_min),
        );
        ctx.check_abs(
            format!("hessian-offdiag-zero-fd-s{s}"),
            "Hessian at the center is diagonal",
            "fd",
            math::abs(h_fd[0][1]),
            0.0,
            1e-3 * math::abs(alpha_min),
        );
        let [a, b] = ctx.basis.domain().half_extents;
        if math::abs(a - b) < 1e-12 {
            ctx.check_abs(
                format!("hessian-equal-diagonals-s{s}"),
                "swap symmetry makes the two diagonal entries equal",
                "spectral",
                h_spec[0][0] - h_spec[1][1],
                0.0,
                1e-10 * math::abs(alpha_min),
            );
        } else {
            let gap = math::abs(h_spec[0][0] - h_spec[1][1])
                / f64::max(h_spec[0][0], h_spec[1][1]);
            ctx.push(
                format!("hessian-distinct-diagonals-s{s}"),
                "anisotropic extents separate the diagonal entries by more than 5%",
                "spectral",
                gap,
                0.05,
                0.0,
                gap > 0.05,
            );
        }
        // Plain 4h second differences carry a few-percent truncation; the
        // declared agreement level for the fd Hessian reflects that.
        ctx.check_rel(
            format!("hessian-route-agreement-s{s}"),
            "fd and spectral routes agree on the leading diagonal entry",
            "fd/spectral",
            h_fd[0][0],
            h_spec[0][0],
            5.0 * ctx.tols.fd_vs_spectral,
        );
    }
}

fn scenario_lemma_symmetry(ctx: &mut Ctx, s: f64, _params: &FractionalParams) {
    let t_bar = ctx.points[0];
    let grid = ctx.basis.grid().clone();
    let nx = grid.xs.len();
    // Green field reflection symmetry for a source on the plane.
    match crate::green::green_solve(&ctx.basis, t_bar, s, GreenRoute::Spectral) {
        Ok(field) => {
            let mut worst = 0.0;
            let mut scale = 0.0;
            for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
                let j = grid.index[iy * nx + (nx - 1 - ix)];
                worst = f64::max(worst, math::abs(field.values[i] - field.values[j]));
                scale = f64::max(scale, math::abs(field.values[i]));
            }
            let tol = if ctx.numeric_basis() { 1e-6 } else { 1e-12 };
            ctx.check_abs(
                format!("green-reflection-s{s}"),
                "Green function with source on the plane is even across it",
                "spectral",
                worst / scale,
                0.0,
                tol,
            );
        }
        Err(e) => ctx.record_failure(
            format!("green-reflection-s{s}"),
            "Green field reflection symmetry",
            e,
        ),
    }
    // Extension field symmetry (sampled at a few levels).
    let cyl = ctx.cylinder.clone();
    match extend(&ctx.basis, &ExtSource::Green { t: t_bar }, s, &cyl, ExtRoute::Spectral) {
        Ok(ext) => {
            let mut worst = 0.0;
            let mut scale = 0.0;
            for k in [1usize, cyl.levels() / 8, cyl.levels() / 3] {
                let plane = ext.level(k);
                for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
                    let j = grid.index[iy * nx + (nx - 1 - ix)];
                    worst = f64::max(worst, math::abs(plane[i] - plane[j]));
                    scale = f64::max(scale, math::abs(plane[i]));
                }
            }
            let tol = if ctx.numeric_basis() { 1e-6 } else { 1e-12 };
            ctx.check_abs(
                format!("extension-reflection-s{s}"),
                "cylinder extension of the plane-source Green function is even",
                "spectral",
                worst / scale,
                0.0,
                tol,
            );
        }
        Err(e) => ctx.record_failure(
            format!("extension-reflection-s{s}"),
            "extension reflection symmetry",
            e,
        ),
    }
    // Symmetry in the arguments: G(x; t) = G(t; x).
    let t = ctx.points[ctx.points.len() - 1];
    let x = [
        -0.5 * t[0] - 0.1 * ctx.basis.domain().half_extents[0],
        0.5 * t[1],
    ];
    match (
        green_value(&ctx.basis, t, x, s, GreenRoute::Spectral),
        green_value(&ctx.basis, x, t, s, GreenRoute::Spectral),
    ) {
        (Ok(a), Ok(b)) => ctx.check_rel(
            format!("green-argument-symmetry-s{s}"),
            "Green function is symmetric in source and evaluation points",
            "spectral",
            a,
            b,
            1e-6,
        ),
        (Err(e), _) | (_, Err(e)) => ctx.record_failure(
            format!("green-argument-symmetry-s{s}"),
            "Green argument symmetry",
            e,
        ),
    }
}

fn scenario_lemma_u1(ctx: &mut Ctx, s: f64, params: &FractionalParams) {
    let t_bar = ctx.points[0];
    let t = ctx.points[ctx.points.len() - 1];
    scenario_u1_signs(ctx, t_bar, s, params, &format!("s{s}"));
    let cyl = ctx.cylinder.clone();
    // Representation formula against the direct solve, compared at a grid
    // node so both sides see the same point.
    let (t_node, t_idx) = {
        let grid = ctx.basis.grid();
        let idx = grid.nearest_interior(t).expect("interior test point");
        let (ix, iy) = grid.interior[idx];
        (grid.node(ix, iy), idx)
    };
    let direct = solve_ui(&ctx.basis, t_bar, 0, s, &cyl, params);
    let repr = u1_representation(&ctx.basis, t_bar, 0, t_node, s, &cyl, params);
    match (direct, repr) {
        (Ok(field), Ok(integral)) => {
            ctx.check_rel(
                format!("representation-matches-solve-s{s}"),
                "boundary-integral representation matches the cylinder solve",
                "boundary/fd-cylinder",
                integral,
                field.trace()[t_idx],
                ctx.tols.boundary_vs_spectral,
            );
        }
        (Err(e), _) => ctx.record_failure(
            format!("representation-matches-solve-s{s}"),
            "auxiliary solve",
            e,
        ),
        (_, Err(e)) => ctx.record_failure(
            format!("representation-matches-solve-s{s}"),
            "boundary representation",
            e,
        ),
    }
    // Antisymmetry of the representation and the zero at t̄.
    let t_mirror = [-t[0], t[1]];
    match (
        u1_representation(&ctx.basis, t_bar, 0, t, s, &cyl, params),
        u1_representation(&ctx.basis, t_bar, 0, t_mirror, s, &cyl, params),
        u1_representation(&ctx.basis, t_bar, 0, t_bar, s, &cyl, params),
    ) {
        (Ok(v), Ok(vm), Ok(v0)) => {
            ctx.check_rel(
                format!("representation-odd-s{s}"),
                "representation value is odd under reflection of the target point",
                "boundary",
                vm,
                -v,
                1e-9,
            );
            ctx.check_abs(
                format!("representation-zero-at-plane-s{s}"),
                "representation vanishes when the target lies on the plane",
                "boundary",
                math::abs(v0),
                0.0,
                1e-10 * f64::max(math::abs(v), 1e-300),
            );
        }
        _ => ctx.record_failure(
            format!("representation-odd-s{s}"),
            "representation antisymmetry",
            "flux evaluation failed",
        ),
    }
    // Cross identity: ∂_i U₁(t̄, 0) = -½ ∂²R/∂t₁∂t_i(t̄).
    let direct = solve_ui(&ctx.basis, t_bar, 0, s, &cyl, params).map_err(|e| e.to_string());
    let hess = robin_hessian(&ctx.basis, t_bar, s, params, GradRoute::Spectral)
        .map_err(|e| e.to_string());
    match (direct, hess) {
        (Ok(field), Ok(hess)) => {
            let grid = ctx.basis.grid().clone();
            let trace = field.trace();
            let center = grid.nearest_interior(t_bar).unwrap();
            let (cx, cy) = grid.interior[center];
            let hx = grid.spacing[0];
            let left = grid.interior_index(cx - 1, cy).unwrap();
            let right = grid.interior_index(cx + 1, cy).unwrap();
            let d1 = (trace[right] - trace[left]) / (2.0 * hx);
            ctx.check_rel(
                format!("cross-identity-d1-s{s}"),
                "plane slope of the auxiliary trace equals -½ of the Hessian diagonal",
                "fd-cylinder/spectral",
                d1,
                -0.5 * hess[0][0],
                ctx.tols.boundary_vs_spectral,
            );
            if ctx.basis.domain().dim() == 2 {
                let hy = grid.spacing[1];
                let down = grid.interior_index(cx, cy - 1).unwrap();
                let up = grid.interior_index(cx, cy + 1).unwrap();
                let d2 = (trace[up] - trace[down]) / (2.0 * hy);
                ctx.check_abs(
                    format!("cross-identity-d2-s{s}"),
                    "tangential slope of the auxiliary trace matches the vanishing mixed entry",
                    "fd-cylinder/spectral",
                    math::abs(d2 - (-0.5 * hess[0][1])),
                    0.0,
                    ctx.tols.boundary_vs_spectral * math::abs(d1),
                );
            }
        }
        (Err(e), _) | (_, Err(e)) => {
            ctx.record_failure(format!("cross-identity-s{s}"), "cross identity", e)
        }
    }
}

fn scenario_lemma_grad(ctx: &mut Ctx, s: f64, params: &FractionalParams) {
    let cyl = ctx.cylinder.clone();
    let points = ctx.points.clone();
    for (pi, &t) in points.iter().enumerate() {
        let tag = format!("s{s}-pt{pi}");
        let spec = robin_gradient(&ctx.basis, t, s, params, GradRoute::Spectral);
        let fd = robin_gradient(&ctx.basis, t, s, params, GradRoute::Fd);
        let bdy = robin_gradient(&ctx.basis, t, s, params, GradRoute::Boundary(&cyl));
        match (spec, fd, bdy) {
            (Ok(gs), Ok(gf), Ok(gb)) => {
                let norm = math::norm2(gs);
                let dim = ctx.basis.domain().dim();
                let err_fd = grad_gap(gs, gf, dim);
                let err_bd = grad_gap(gs, gb, dim);
                ctx.check_abs(
                    format!("gradient-fd-agreement-{tag}"),
                    "finite-difference gradient matches the interior route",
                    "fd/spectral",
                    err_fd / norm,
                    0.0,
                    ctx.tols.fd_vs_spectral,
                );
                ctx.check_abs(
                    format!("gradient-boundary-agreement-{tag}"),
                    "boundary-flux gradient matches the interior route",
                    "boundary/spectral",
                    err_bd / norm,
                    0.0,
                    ctx.tols.boundary_vs_spectral,
                );
            }
            (Err(e), ..) | (_, Err(e), _) | (_, _, Err(e)) => {
                ctx.record_failure(format!("gradient-triangle-{tag}"), "gradient routes", e)
            }
        }
    }
    // Hessian: boundary representation against the interior route at the
    // first point.
    let t = points[0];
    let hs = robin_hessian(&ctx.basis, t, s, params, GradRoute::Spectral)
        .map_err(|e| e.to_string());
    let hb = robin_hessian_boundary(&ctx.basis, t, s, &cyl, params).map_err(|e| e.to_string());
    match (hs, hb) {
        (Ok(hs), Ok(hb)) => {
            let dim = ctx.basis.domain().dim();
            let mut scale: f64 = 0.0;
            let mut gap: f64 = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    scale = f64::max(scale, math::abs(hs[i][j]));
                    gap = f64::max(gap, math::abs(hs[i][j] - hb[i][j]));
                }
            }
            ctx.check_abs(
                format!("hessian-boundary-agreement-s{s}"),
                "boundary-flux Hessian matches the interior route",
                "boundary/spectral",
                gap / scale,
                0.0,
                ctx.tols.boundary_vs_spectral,
            );
        }
        (Err(e), _) | (_, Err(e)) => ctx.record_failure(
            format!("hessian-boundary-agreement-s{s}"),
            "Hessian routes",
            e,
        ),
    }
}

fn scenario_selftest(ctx: &mut Ctx, s: f64, params: &FractionalParams) {
    // Closed-form profile at s = 1/2.
    let mut worst = 0.0;
    for k in 1..40 {
        let z = k as f64 * 0.35;
        let gap = math::abs(extension_profile(0.5, z) - math::exp(-z)) / math::exp(-z);
        worst = f64::max(worst, gap);
    }
    ctx.check_abs(
        "profile-half-closed-form",
        "extension profile at s = 1/2 is the decaying exponential",
        "spectral",
        worst,
        0.0,
        ctx.tols.analytic_identity,
    );
    // Conormal-trace normalization: -κ_s y^{1-2s} ∂_y h_s(√λ y) → λ^s.
    let lam = ctx.basis.lambda(0);
    let trace_limit = |y: f64| -> f64 {
        -params.kappa
            * math::powf(y, 1.0 - 2.0 * s)
            * math::sqrt(lam)
            * extension_profile_deriv(s, math::sqrt(lam) * y)
    };
    let (y1, y2) = (1e-6, 5e-7);
    let q = math::powf(0.5, 2.0 - 2.0 * s);
    let extrapolated = (trace_limit(y2) - q * trace_limit(y1)) / (1.0 - q);
    ctx.check_rel(
        format!("conormal-normalization-s{s}"),
        "weighted conormal limit of the mode profile returns λ^s",
        "analytic",
        extrapolated,
        math::powf(lam, s),
        1e-8,
    );
    // Spectral trace of the ground mode.
    let cyl = ctx.cylinder.clone();
    let e1 = ExtSource::Coeffs(alloc::vec![1.0]);
    match extend(&ctx.basis, &e1, s, &cyl, ExtRoute::Spectral) {
        Ok(field) => {
            let trace = neumann_trace(&ctx.basis, &field, &cyl, params).unwrap();
            let grid = ctx.basis.grid().clone();
            let lam_s = math::powf(lam, s);
            let mut worst = 0.0;
            let mut scale = 0.0;
            for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
                let phi = ctx.basis.values_at(grid.node(ix, iy))[0];
                worst = f64::max(worst, math::abs(trace[i] - lam_s * phi));
                scale = f64::max(scale, math::abs(lam_s * phi));
            }
            ctx.check_abs(
                format!("trace-eigenmode-exact-s{s}"),
                "conormal trace of a single mode extension returns λ^s times the mode",
                "spectral",
                worst / scale,
                0.0,
                ctx.tols.analytic_identity,
            );
            // Isometry.
            let energy = extension_energy(&ctx.basis, &field, &cyl, params);
            ctx.check_rel(
                format!("isometry-single-mode-s{s}"),
                "weighted extension energy of a single mode equals λ^s",
                "spectral",
                energy,
                lam_s,
                2e-3,
            );
        }
        Err(e) => ctx.record_failure(
            format!("trace-eigenmode-exact-s{s}"),
            "spectral extension",
            e,
        ),
    }
    // fd path: trace accuracy and two-mode isometry.
    match extend(&ctx.basis, &e1, s, &cyl, ExtRoute::Fd) {
        Ok(field) => match neumann_trace(&ctx.basis, &field, &cyl, params) {
            Ok(trace) => {
                let grid = ctx.basis.grid().clone();
                let lam_s = math::powf(lam, s);
                let mut worst = 0.0;
                let mut scale = 0.0;
                for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
                    let phi = ctx.basis.values_at(grid.node(ix, iy))[0];
                    worst = f64::max(worst, math::abs(trace[i] - lam_s * phi));
                    scale = f64::max(scale, math::abs(lam_s * phi));
                }
                ctx.check_abs(
                    format!("trace-fd-path-s{s}"),
                    "discrete conormal trace of the solved extension matches λ^s times the mode",
                    "fd",
                    worst / scale,
                    0.0,
                    1e-3,
                );
            }
            Err(e) => ctx.record_failure(format!("trace-fd-path-s{s}"), "fd trace", e),
        },
        Err(e) => ctx.record_failure(format!("trace-fd-path-s{s}"), "fd extension", e),
    }
    let two = ExtSource::Coeffs(alloc::vec![1.0, 1.0]);
    if let Ok(field) = extend(&ctx.basis, &two, s, &cyl, ExtRoute::Spectral) {
        let energy = extension_energy(&ctx.basis, &field, &cyl, params);
        let expect = math::powf(ctx.basis.lambda(0), s) + math::powf(ctx.basis.lambda(1), s);
        ctx.check_rel(
            format!("isometry-two-modes-s{s}"),
            "extension energy is additive over orthogonal modes",
            "spectral",
            energy,
            expect,
            2e-3,
        );
    }
    // Heat-route free-part identity.
    for &r in &[0.5, 1.0, 2.0] {
        let got = free_kernel_heat_value(params, r);
        let want = free_green([r, 0.0], [0.0, 0.0], params).unwrap();
        ctx.check_rel(
            format!("free-kernel-identity-r{r}-s{s}"),
            "heat quadrature reproduces the free kernel",
            "heat",
            got,
            want,
            1e-10,
        );
    }
    let _ = params;
}

fn grad_gap(a: [f64; 2], b: [f64; 2], dim: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..dim {
        acc += (a[i] - b[i]) * (a[i] - b[i]);
    }
    math::sqrt(acc)
}
