//! Symmetric bounded domains, tensor grids with mirrored-exact interior
//! masks, and boundary sampling with outward unit normals.
//!
//! All supported domains are centered at the origin and symmetric under
//! every axis reflection `x_i ↦ -x_i`; grids are built so the reflection
//! symmetry of node coordinates and masks is exact in floating point, not
//! merely up to rounding.

use alloc::vec::Vec;
use core::fmt;

use crate::math;
use core::f64::consts::PI;

/// Supported domain shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    /// `(-a, a)` in one dimension.
    Interval,
    /// `(-a, a) × (-b, b)`.
    Rectangle,
    /// `(x/a)² + (y/b)² < 1`.
    Ellipse,
}

impl DomainKind {
    pub fn dim(self) -> usize {
        match self {
            DomainKind::Interval => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DomainKind::Interval => "interval",
            DomainKind::Rectangle => "rectangle",
            DomainKind::Ellipse => "ellipse",
        }
    }
}

/// Requested geometry: shape, half-extents and target grid spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    /// `[a]` for intervals, `[a, b]` otherwise.
    pub half_extents: Vec<f64>,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainError {
    NonPositiveExtent(f64),
    /// Fewer than 16 cells across the smallest half-extent.
    SpacingTooCoarse { cells: usize },
    ExtentCount { expected: usize, got: usize },
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveExtent(v) => write!(f, "half-extent {v} must be positive"),
            Self::SpacingTooCoarse { cells } => write!(
                f,
                "spacing too coarse: {cells} cells across the smallest half-extent (need at least 16)"
            ),
            Self::ExtentCount { expected, got } => {
                write!(f, "expected {expected} half-extents, got {got}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DomainError {}

/// A symmetric bounded domain centered at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub kind: DomainKind,
    pub half_extents: [f64; 2],
}

impl Domain {
    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    /// Diameter of the domain.
    pub fn diameter(&self) -> f64 {
        let [a, b] = self.half_extents;
        match self.kind {
            DomainKind::Interval => 2.0 * a,
            DomainKind::Rectangle => 2.0 * math::hypot(a, b),
            DomainKind::Ellipse => 2.0 * if a > b { a } else { b },
        }
    }

    /// True if the point lies strictly inside the domain.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let [a, b] = self.half_extents;
        match self.kind {
            DomainKind::Interval => math::abs(p[0]) < a,
            DomainKind::Rectangle => math::abs(p[0]) < a && math::abs(p[1]) < b,
            DomainKind::Ellipse => {
                let qx = p[0] / a;
                let qy = p[1] / b;
                qx * qx + qy * qy < 1.0
            }
        }
    }

    /// Euclidean distance from an interior point to the boundary.
    pub fn distance_to_boundary(&self, p: [f64; 2]) -> f64 {
        let [a, b] = self.half_extents;
        match self.kind {
            DomainKind::Interval => a - math::abs(p[0]),
            DomainKind::Rectangle => {
                let dx = a - math::abs(p[0]);
                let dy = b - math::abs(p[1]);
                if dx < dy {
                    dx
                } else {
                    dy
                }
            }
            DomainKind::Ellipse => ellipse_distance(a, b, p),
        }
    }
}

/// Closest-point distance from an interior point to the ellipse
/// `(x/a)² + (y/b)² = 1`, by Newton iteration on the standard rational
/// parametrization of the foot point. Points on a major semi-axis inside
/// the evolute have their nearest boundary point off-axis and are handled
/// in closed form.
fn ellipse_distance(a: f64, b: f64, p: [f64; 2]) -> f64 {
    let px = math::abs(p[0]);
    let py = math::abs(p[1]);
    if px == 0.0 && py == 0.0 {
        return if a < b { a } else { b };
    }
    if py == 0.0 {
        let c = a * a - b * b;
        if c > 0.0 && a * px < c {
            // Inside the evolute: foot point off-axis.
            let xf = a * a * px / c;
            let yf = b * math::sqrt(1.0 - (xf / a) * (xf / a));
            return math::hypot(xf - px, yf);
        }
        return a - px;
    }
    if px == 0.0 {
        let c = b * b - a * a;
        if c > 0.0 && b * py < c {
            let yf = b * b * py / c;
            let xf = a * math::sqrt(1.0 - (yf / b) * (yf / b));
            return math::hypot(xf, yf - py);
        }
        return b - py;
    }
    // Foot point x = a²px/(t+a²), y = b²py/(t+b²); the nearest-point root
    // of F(t) = (a px/(t+a²))² + (b py/(t+b²))² - 1 lies in (-min(a,b)², 0]
    // for interior points, with F decreasing from +∞ at the pole. Newton
    // with a bisection safeguard keeps the iterate inside the bracket
    // (plain Newton overshoots the pole for points just past the evolute).
    let b_min = if a < b { a } else { b };
    let mut lo = -b_min * b_min * (1.0 - 1e-12); // F(lo) > 0
    let mut hi = 0.0; // F(hi) < 0 for interior points
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fa = a * px / (t + a * a);
        let fb = b * py / (t + b * b);
        let f = fa * fa + fb * fb - 1.0;
        if f > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let df = -2.0 * (fa * fa / (t + a * a) + fb * fb / (t + b * b));
        let mut next = t - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if math::abs(next - t) < 1e-15 * (a * a + b * b) {
            t = next;
            break;
        }
        t = next;
    }
    let qx = a * a * px / (t + a * a);
    let qy = b * b * py / (t + b * b);
    math::hypot(qx - px, qy - py)
}

/// A point on the boundary with its outward unit normal, a quadrature
/// weight (arclength measure) and the face it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub point: [f64; 2],
    pub normal: [f64; 2],
    pub weight: f64,
    /// Face tag: rectangle faces 0..4 (+x, -x, +y, -y), interval ends 0..2,
    /// ellipse uses 0 for the whole curve.
    pub face: u8,
}

/// Tensor grid with mirrored-exact symmetric coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dim: usize,
    /// Actual spacing per axis (second entry zero for 1-D grids).
    pub spacing: [f64; 2],
    pub xs: Vec<f64>,
    /// `[0.0]` for 1-D grids.
    pub ys: Vec<f64>,
    /// Row-major interior mask over the full node tensor.
    pub mask: Vec<bool>,
    /// `(ix, iy)` of interior nodes in row-major order.
    pub interior: Vec<(usize, usize)>,
    /// Full-tensor index → interior index, `usize::MAX` when exterior.
    pub index: Vec<usize>,
    pub boundary: Vec<BoundarySample>,
}

impl Grid {
    pub fn node(&self, ix: usize, iy: usize) -> [f64; 2] {
        [self.xs[ix], self.ys[iy]]
    }

    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }

    pub fn interior_index(&self, ix: usize, iy: usize) -> Option<usize> {
        let flat = iy * self.xs.len() + ix;
        let idx = self.index[flat];
        if idx == usize::MAX {
            None
        } else {
            Some(idx)
        }
    }

    /// Index of the interior node closest to `p`, if any lies within half a
    /// cell in each axis.
    pub fn nearest_interior(&self, p: [f64; 2]) -> Option<usize> {
        let ix = nearest_index(&self.xs, p[0])?;
        let iy = if self.dim == 1 {
            0
        } else {
            nearest_index(&self.ys, p[1])?
        };
        self.interior_index(ix, iy)
    }
}

fn nearest_index(coords: &[f64], v: f64) -> Option<usize> {
    if coords.is_empty() {
        return None;
    }
    let h = if coords.len() > 1 {
        coords[1] - coords[0]
    } else {
        1.0
    };
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &c) in coords.iter().enumerate() {
        let d = math::abs(c - v);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    if best_d <= 0.5 * h + 1e-12 {
        Some(best)
    } else {
        None
    }
}

/// Symmetric node coordinates over `[-c, c]` with `n` cells (`n` even).
/// Mirrored construction: `x_{n-i} = -x_i` holds exactly and `x_{n/2} = 0`.
fn symmetric_coords(c: f64, n: usize) -> Vec<f64> {
    debug_assert!(n % 2 == 0);
    let h = 2.0 * c / n as f64;
    let mut xs = alloc::vec![0.0; n + 1];
    for i in 0..n / 2 {
        let v = c - i as f64 * h;
        xs[i] = -v;
        xs[n - i] = v;
    }
    xs[n / 2] = 0.0;
    xs
}

fn even_cells(extent: f64, spacing: f64) -> usize {
    let n = math::ceil(2.0 * extent / spacing - 1e-9) as usize;
    if n % 2 == 0 {
        n.max(2)
    } else {
        n + 1
    }
}

/// Build a [`Domain`] and its [`Grid`] from a [`DomainSpec`].
pub fn build_domain(spec: &DomainSpec) -> Result<(Domain, Grid), DomainError> {
    let expected = if spec.kind == DomainKind::Interval { 1 } else { 2 };
    if spec.half_extents.len() != expected {
        return Err(DomainError::ExtentCount {
            expected,
            got: spec.half_extents.len(),
        });
    }
    for &e in &spec.half_extents {
        if !(e > 0.0) {
            return Err(DomainError::NonPositiveExtent(e));
        }
    }
    if !(spec.spacing > 0.0) {
        return Err(DomainError::NonPositiveExtent(spec.spacing));
    }
    let a = spec.half_extents[0];
    let b = if expected == 2 { spec.half_extents[1] } else { 0.0 };
    let min_ext = if expected == 2 && b < a { b } else { a };
    let half_cells = (min_ext / spec.spacing + 1e-9) as usize;
    if half_cells < 16 {
        return Err(DomainError::SpacingTooCoarse { cells: half_cells });
    }
    let domain = Domain {
        kind: spec.kind,
        half_extents: [a, b],
    };
    let grid = match spec.kind {
        DomainKind::Interval => build_interval_grid(a, spec.spacing),
        DomainKind::Rectangle => build_rectangle_grid(a, b, spec.spacing),
        DomainKind::Ellipse => build_ellipse_grid(a, b, spec.spacing),
    };
    Ok((domain, grid))
}

/// Rebuild the grid of `domain` with every cell halved (exact 2× cell
/// counts per axis), keeping coarse nodes as a subset of fine nodes.
pub(crate) fn refined_grid(domain: &Domain, grid: &Grid) -> Grid {
    let [a, b] = domain.half_extents;
    match domain.kind {
        DomainKind::Interval => interval_grid_cells(a, 2 * (grid.xs.len() - 1)),
        DomainKind::Rectangle => {
            rectangle_grid_cells(a, b, 2 * (grid.xs.len() - 1), 2 * (grid.ys.len() - 1))
        }
        DomainKind::Ellipse => {
            ellipse_grid_cells(a, b, 2 * (grid.xs.len() - 1), 2 * (grid.ys.len() - 1))
        }
    }
}

fn build_interval_grid(a: f64, spacing: f64) -> Grid {
    interval_grid_cells(a, even_cells(a, spacing))
}

fn interval_grid_cells(a: f64, n: usize) -> Grid {
    let xs = symmetric_coords(a, n);
    let h = 2.0 * a / n as f64;
    let mut mask = alloc::vec![false; n + 1];
    let mut interior = Vec::new();
    let mut index = alloc::vec![usize::MAX; n + 1];
    for i in 1..n {
        mask[i] = true;
        index[i] = interior.len();
        interior.push((i, 0));
    }
    let boundary = alloc::vec![
        BoundarySample {
            point: [a, 0.0],
            normal: [1.0, 0.0],
            weight: 1.0,
            face: 0,
        },
        BoundarySample {
            point: [-a, 0.0],
            normal: [-1.0, 0.0],
            weight: 1.0,
            face: 1,
        },
    ];
    Grid {
        dim: 1,
        spacing: [h, 0.0],
        xs,
        ys: alloc::vec![0.0],
        mask,
        interior,
        index,
        boundary,
    }
}

fn build_rectangle_grid(a: f64, b: f64, spacing: f64) -> Grid {
    rectangle_grid_cells(a, b, even_cells(a, spacing), even_cells(b, spacing))
}

fn rectangle_grid_cells(a: f64, b: f64, nx: usize, ny: usize) -> Grid {
    let xs = symmetric_coords(a, nx);
    let ys = symmetric_coords(b, ny);
    let hx = 2.0 * a / nx as f64;
    let hy = 2.0 * b / ny as f64;
    let n_nodes = (nx + 1) * (ny + 1);
    let mut mask = alloc::vec![false; n_nodes];
    let mut interior = Vec::new();
    let mut index = alloc::vec![usize::MAX; n_nodes];
    for iy in 1..ny {
        for ix in 1..nx {
            let flat = iy * (nx + 1) + ix;
            mask[flat] = true;
            index[flat] = interior.len();
            interior.push((ix, iy));
        }
    }
    // Face samples at grid nodes with trapezoid weights; corners get the
    // half weight of each adjacent face (flux integrands vanish there).
    let mut boundary = Vec::new();
    for (face, normal, fixed) in [
        (0u8, [1.0, 0.0], a),
        (1u8, [-1.0, 0.0], -a),
    ] {
        for (iy, &y) in ys.iter().enumerate() {
            let w = if iy == 0 || iy == ny { 0.5 * hy } else { hy };
            boundary.push(BoundarySample {
                point: [fixed, y],
                normal,
                weight: w,
                face,
            });
        }
    }
    for (face, normal, fixed) in [
        (2u8, [0.0, 1.0], b),
        (3u8, [0.0, -1.0], -b),
    ] {
        for (ix, &x) in xs.iter().enumerate() {
            let w = if ix == 0 || ix == nx { 0.5 * hx } else { hx };
            boundary.push(BoundarySample {
                point: [x, fixed],
                normal,
                weight: w,
                face,
            });
        }
    }
    Grid {
        dim: 2,
        spacing: [hx, hy],
        xs,
        ys,
        mask,
        interior,
        index,
        boundary,
    }
}

fn build_ellipse_grid(a: f64, b: f64, spacing: f64) -> Grid {
    ellipse_grid_cells(a, b, even_cells(a, spacing), even_cells(b, spacing))
}

fn ellipse_grid_cells(a: f64, b: f64, nx: usize, ny: usize) -> Grid {
    let xs = symmetric_coords(a, nx);
    let ys = symmetric_coords(b, ny);
    let hx = 2.0 * a / nx as f64;
    let hy = 2.0 * b / ny as f64;
    let n_nodes = (nx + 1) * (ny + 1);
    let mut mask = alloc::vec![false; n_nodes];
    let mut interior = Vec::new();
    let mut index = alloc::vec![usize::MAX; n_nodes];
    for iy in 0..=ny {
        for ix in 0..=nx {
            // |x| makes the test exactly reflection-symmetric.
            let qx = math::abs(xs[ix]) / a;
            let qy = math::abs(ys[iy]) / b;
            if qx * qx + qy * qy < 1.0 - 1e-12 {
                let flat = iy * (nx + 1) + ix;
                mask[flat] = true;
                index[flat] = interior.len();
                interior.push((ix, iy));
            }
        }
    }
    // Uniform-angle midpoint samples, generated in the first quadrant and
    // mirrored so the sample set is exactly symmetric.
    let h = if hx < hy { hx } else { hy };
    let perimeter = ellipse_perimeter(a, b);
    let per_quadrant = (math::ceil(perimeter / (4.0 * h)) as usize).max(48);
    let dtheta = 0.5 * PI / per_quadrant as f64;
    let mut boundary = Vec::new();
    for m in 0..per_quadrant {
        let theta = (m as f64 + 0.5) * dtheta;
        let (ct, st) = (math::cos(theta), math::sin(theta));
        let (x, y) = (a * ct, b * st);
        let arc = math::hypot(a * st, b * ct) * dtheta;
        let nraw = [x / (a * a), y / (b * b)];
        let nlen = math::norm2(nraw);
        let nx_ = nraw[0] / nlen;
        let ny_ = nraw[1] / nlen;
        for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
            boundary.push(BoundarySample {
                point: [sx * x, sy * y],
                normal: [sx * nx_, sy * ny_],
                weight: arc,
                face: 0,
            });
        }
    }
    Grid {
        dim: 2,
        spacing: [hx, hy],
        xs,
        ys,
        mask,
        interior,
        index,
        boundary,
    }
}

/// Ramanujan's approximation; only used to pick a boundary sample count.
fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    PI * (3.0 * (a + b) - math::sqrt((3.0 * a + b) * (a + 3.0 * b)))
}

/// One grid arm from an interior node toward a neighbor direction.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Arm {
    /// Arm length (the grid spacing, or shorter when cut by the boundary).
    pub len: f64,
    /// Interior index of the neighbor, or `usize::MAX` when the arm ends on
    /// the boundary.
    pub neighbor: usize,
    /// Boundary crossing point for cut arms.
    pub cut: Option<[f64; 2]>,
}

pub(crate) const ARM_MIN_FRACTION: f64 = 1e-3;

/// Arms of the interior node `(ix, iy)` in the order `+x, -x, +y, -y`,
/// with boundary-shortened lengths on cut cells. Lengths are computed from
/// `|x|, |y|`, so mirrored nodes get bit-identical arms.
pub(crate) fn cut_arms(domain: &Domain, grid: &Grid, ix: usize, iy: usize) -> [Arm; 4] {
    let [a, b] = domain.half_extents;
    let [hx, hy] = grid.spacing;
    let nx = grid.xs.len();
    let [x, y] = grid.node(ix, iy);
    let nb = |jx: usize, jy: usize| grid.index[jy * nx + jx];

    let full = |len: f64, neighbor: usize| Arm {
        len,
        neighbor,
        cut: None,
    };
    match domain.kind {
        DomainKind::Interval => {
            let e = if nb(ix + 1, iy) != usize::MAX {
                full(hx, nb(ix + 1, iy))
            } else {
                Arm {
                    len: hx,
                    neighbor: usize::MAX,
                    cut: Some([a, 0.0]),
                }
            };
            let w = if nb(ix - 1, iy) != usize::MAX {
                full(hx, nb(ix - 1, iy))
            } else {
                Arm {
                    len: hx,
                    neighbor: usize::MAX,
                    cut: Some([-a, 0.0]),
                }
            };
            [
                e,
                w,
                full(0.0, usize::MAX),
                full(0.0, usize::MAX),
            ]
        }
        DomainKind::Rectangle => {
            let arm = |jx: usize, jy: usize, len: f64, cut: [f64; 2]| {
                let n = nb(jx, jy);
                if n != usize::MAX {
                    full(len, n)
                } else {
                    Arm {
                        len,
                        neighbor: usize::MAX,
                        cut: Some(cut),
                    }
                }
            };
            [
                arm(ix + 1, iy, hx, [a, y]),
                arm(ix - 1, iy, hx, [-a, y]),
                arm(ix, iy + 1, hy, [x, b]),
                arm(ix, iy - 1, hy, [x, -b]),
            ]
        }
        DomainKind::Ellipse => {
            let x_cut = a * math::sqrt(f64::max(0.0, 1.0 - (math::abs(y) / b) * (math::abs(y) / b)));
            let y_cut = b * math::sqrt(f64::max(0.0, 1.0 - (math::abs(x) / a) * (math::abs(x) / a)));
            let arm = |jx: usize, jy: usize, len: f64, cut: [f64; 2]| {
                let n = nb(jx, jy);
                if n != usize::MAX {
                    full(len, n)
                } else {
                    Arm {
                        len,
                        neighbor: usize::MAX,
                        cut: Some(cut),
                    }
                }
            };
            let mut arms = [
                arm(ix + 1, iy, x_cut - x, [x_cut, y]),
                arm(ix - 1, iy, x - (-x_cut), [-x_cut, y]),
                arm(ix, iy + 1, y_cut - y, [x, y_cut]),
                arm(ix, iy - 1, y - (-y_cut), [x, -y_cut]),
            ];
            for (d, arm) in arms.iter_mut().enumerate() {
                let h = if d < 2 { hx } else { hy };
                if arm.neighbor != usize::MAX {
                    arm.len = h;
                } else {
                    arm.len = f64::max(arm.len, ARM_MIN_FRACTION * h).min(h);
                }
            }
            arms
        }
    }
}

/// Outward unit normal at a boundary point of the domain.
pub(crate) fn boundary_normal(domain: &Domain, p: [f64; 2]) -> [f64; 2] {
    let [a, b] = domain.half_extents;
    match domain.kind {
        DomainKind::Interval => [if p[0] > 0.0 { 1.0 } else { -1.0 }, 0.0],
        DomainKind::Rectangle => {
            let dx = a - math::abs(p[0]);
            let dy = b - math::abs(p[1]);
            if dx <= dy {
                [if p[0] > 0.0 { 1.0 } else { -1.0 }, 0.0]
            } else {
                [0.0, if p[1] > 0.0 { 1.0 } else { -1.0 }]
            }
        }
        DomainKind::Ellipse => {
            let raw = [p[0] / (a * a), p[1] / (b * b)];
            let len = math::norm2(raw);
            [raw[0] / len, raw[1] / len]
        }
    }
}

/// Result of checking the directional convexity hypothesis on the boundary:
/// with outward normals, a domain convex in the direction of axis `i` has
/// `x_i ν_i(x) ≥ 0` everywhere (a neck facing back toward the symmetry
/// plane violates it).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub axis: usize,
    /// Maximal violation `-x_i ν_i(x)` over the boundary samples; at most
    /// zero on convex-in-direction domains.
    pub max_value: f64,
    /// A sample attaining the maximal violation when the check fails.
    pub witness: Option<BoundarySample>,
    pub pass: bool,
}

/// Check the directional convexity condition over the sampled boundary.
/// The extension cylinder inherits the condition (its lateral normal is
/// `(ν, 0)`), so no separate cylinder check is needed.
pub fn verify_normal_condition(boundary: &[BoundarySample], axis: usize) -> ConditionReport {
    let mut max_value = f64::NEG_INFINITY;
    let mut witness = None;
    for s in boundary {
        let v = -s.point[axis] * s.normal[axis];
        if v > max_value {
            max_value = v;
            witness = Some(*s);
        }
    }
    if boundary.is_empty() {
        max_value = 0.0;
    }
    let pass = max_value <= 1e-12;
    ConditionReport {
        axis,
        max_value,
        witness: if pass { None } else { witness },
        pass,
    }
}
